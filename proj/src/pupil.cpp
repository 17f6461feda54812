#include "uniax/pupil.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "uniax/errors.hpp"

namespace uniax {

PupilGrid make_pupil_grid(int rings, int spokes) {
  if (rings < 1 || spokes < 1) throw ConfigError("pupil grid needs at least one ring and spoke");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(rings)),
      &gsl_integration_glfixed_table_free);
  if (!table) throw NumericalError("Gauss-Legendre table allocation failed");

  std::vector<std::pair<double, double>> nodes(static_cast<std::size_t>(rings));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double u = 0.0;
    double w = 0.0;
    gsl_integration_glfixed_point(0.0, 1.0, i, &u, &w, table.get());
    nodes[i] = {u, w};
  }
  std::sort(nodes.begin(), nodes.end());

  PupilGrid g;
  g.spokes = spokes;
  g.rho.reserve(nodes.size());
  g.weight.reserve(nodes.size());
  for (const auto& [u, w] : nodes) {
    g.rho.push_back(std::sqrt(u));
    g.weight.push_back(w);
  }
  return g;
}

double RadialProfile::mean() const noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < value.size(); ++i) acc += weight[i] * value[i];
  return acc;
}

double PupilMap::mean() const noexcept {
  double acc = 0.0;
  for (int i = 0; i < grid.rings(); ++i) {
    double ring = 0.0;
    for (int k = 0; k < grid.spokes; ++k) ring += at(i, k);
    acc += grid.weight[static_cast<std::size_t>(i)] * ring / grid.spokes;
  }
  return acc;
}

}  // namespace uniax
