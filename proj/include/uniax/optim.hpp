#pragma once

#include <cmath>
#include <utility>

namespace uniax {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of a unimodal `f` on [a, b]; stops
/// once the bracket is narrower than `tol`.
template <class F>
ScalarMinimum golden_section_minimize(F&& f, double a, double b, double tol) {
  constexpr double inv_phi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  if (a > b) std::swap(a, b);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  ++evals;
  // The midpoint can lose to an interior probe on a flat bracket.
  if (fc < fx && fc <= fd) return {c, fc, evals};
  if (fd < fx) return {d, fd, evals};
  return {x, fx, evals};
}

template <class F>
ScalarMinimum golden_section_maximize(F&& f, double a, double b, double tol) {
  auto r = golden_section_minimize([&](double x) { return -f(x); }, a, b, tol);
  r.value = -r.value;
  return r;
}

}  // namespace uniax
