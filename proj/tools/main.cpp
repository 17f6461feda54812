#include <iostream>

#include "uniax/cli.hpp"

int main(int argc, char** argv) { return uniax::run_cli(argc, argv, std::cout, std::cerr); }
