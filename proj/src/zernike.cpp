#include "uniax/zernike.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "uniax/errors.hpp"

namespace uniax {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void check_mode(ZernikeMode mode) {
  const int am = std::abs(mode.m);
  if (mode.n < 0 || am > mode.n || (mode.n - am) % 2 != 0) {
    std::ostringstream os;
    os << "invalid Zernike mode (n=" << mode.n << ", m=" << mode.m << ")";
    throw ConfigError(os.str());
  }
}

void check_order(int max_order) {
  if (max_order < 0 || max_order > kMaxZernikeOrder) {
    throw ConfigError("Zernike order must lie in [0, " + std::to_string(kMaxZernikeOrder) + "]");
  }
}

double normalisation(ZernikeMode mode) {
  return std::sqrt((mode.m == 0 ? 1.0 : 2.0) * (mode.n + 1));
}

void require_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalError("non-finite sample in wavefront map");
  }
}

}  // namespace

int osa_index(ZernikeMode mode) {
  check_mode(mode);
  return (mode.n * (mode.n + 2) + mode.m) / 2;
}

ZernikeMode osa_mode(int j) {
  if (j < 0) throw ConfigError("negative Zernike index");
  int n = 0;
  while ((n + 1) * (n + 2) / 2 <= j) ++n;
  const int m = 2 * j - n * (n + 2);
  return {n, m};
}

int mode_count(int max_order) noexcept { return (max_order + 1) * (max_order + 2) / 2; }

double zernike_radial(int n, int m, double rho) {
  m = std::abs(m);
  double r = 0.0;
  for (int k = 0; k <= (n - m) / 2; ++k) {
    const double c = ((k % 2) ? -1.0 : 1.0) * factorial(n - k) /
                     (factorial(k) * factorial((n + m) / 2 - k) * factorial((n - m) / 2 - k));
    r += c * std::pow(rho, n - 2 * k);
  }
  return r;
}

double zernike(ZernikeMode mode, double rho, double phi) {
  const double radial = normalisation(mode) * zernike_radial(mode.n, mode.m, rho);
  if (mode.m > 0) return radial * std::cos(mode.m * phi);
  if (mode.m < 0) return radial * std::sin(-mode.m * phi);
  return radial;
}

double ZernikeSpectrum::coefficient(ZernikeMode mode) const {
  const int j = osa_index(mode);
  if (j >= static_cast<int>(coefficients.size())) return 0.0;
  return coefficients[static_cast<std::size_t>(j)];
}

double ZernikeSpectrum::variance() const noexcept {
  double v = 0.0;
  for (std::size_t j = 1; j < coefficients.size(); ++j) v += coefficients[j] * coefficients[j];
  return v;
}

ZernikeSpectrum zernike_decompose(const RadialProfile& profile, int max_order) {
  check_order(max_order);
  require_finite(profile.value);
  ZernikeSpectrum out;
  out.max_order = max_order;
  out.coefficients.assign(static_cast<std::size_t>(mode_count(max_order)), 0.0);

  // Only m = 0 modes survive the azimuthal integral of a symmetric map.
  std::vector<double> recon(profile.value.size(), 0.0);
  for (int n = 0; n <= max_order; n += 2) {
    const ZernikeMode mode{n, 0};
    double c = 0.0;
    for (std::size_t i = 0; i < profile.value.size(); ++i) {
      c += profile.weight[i] * profile.value[i] * zernike(mode, profile.rho[i], 0.0);
    }
    out.coefficients[static_cast<std::size_t>(osa_index(mode))] = c;
    for (std::size_t i = 0; i < recon.size(); ++i) recon[i] += c * zernike(mode, profile.rho[i], 0.0);
  }
  double err = 0.0;
  for (std::size_t i = 0; i < recon.size(); ++i) {
    const double d = profile.value[i] - recon[i];
    err += profile.weight[i] * d * d;
  }
  out.reconstruction_rms = std::sqrt(err);
  return out;
}

ZernikeSpectrum zernike_decompose(const PupilMap& map, int max_order) {
  check_order(max_order);
  require_finite(map.value);
  const PupilGrid& g = map.grid;
  ZernikeSpectrum out;
  out.max_order = max_order;
  out.coefficients.assign(static_cast<std::size_t>(mode_count(max_order)), 0.0);
  for (std::size_t j = 0; j < out.coefficients.size(); ++j) {
    const ZernikeMode mode = osa_mode(static_cast<int>(j));
    double c = 0.0;
    for (int i = 0; i < g.rings(); ++i) {
      double ring = 0.0;
      for (int k = 0; k < g.spokes; ++k) ring += map.at(i, k) * zernike(mode, g.rho[i], g.phi(k));
      c += g.weight[static_cast<std::size_t>(i)] * ring / g.spokes;
    }
    out.coefficients[j] = c;
  }
  const PupilMap recon = zernike_reconstruct(out, g);
  PupilMap diff{g, map.value};
  for (std::size_t i = 0; i < diff.value.size(); ++i) diff.value[i] -= recon.value[i];
  out.reconstruction_rms = rms_wavefront(diff, {});
  return out;
}

PupilMap zernike_reconstruct(const ZernikeSpectrum& spectrum, const PupilGrid& grid) {
  PupilMap out{grid, std::vector<double>(static_cast<std::size_t>(grid.rings()) * grid.spokes, 0.0)};
  for (std::size_t j = 0; j < spectrum.coefficients.size(); ++j) {
    const double c = spectrum.coefficients[j];
    if (c == 0.0) continue;
    const ZernikeMode mode = osa_mode(static_cast<int>(j));
    for (int i = 0; i < grid.rings(); ++i) {
      for (int k = 0; k < grid.spokes; ++k) {
        out.value[static_cast<std::size_t>(i) * grid.spokes + k] += c * zernike(mode, grid.rho[i], grid.phi(k));
      }
    }
  }
  return out;
}

double rms_wavefront(const RadialProfile& profile, ModeRemoval remove) {
  require_finite(profile.value);
  const double piston = remove.piston ? profile.mean() : 0.0;
  double defocus = 0.0;
  if (remove.defocus) {
    for (std::size_t i = 0; i < profile.value.size(); ++i) {
      defocus += profile.weight[i] * profile.value[i] * zernike({2, 0}, profile.rho[i], 0.0);
    }
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < profile.value.size(); ++i) {
    const double r = profile.value[i] - piston - defocus * zernike({2, 0}, profile.rho[i], 0.0);
    acc += profile.weight[i] * r * r;
  }
  return std::sqrt(acc);
}

double rms_wavefront(const PupilMap& map, ModeRemoval remove) {
  require_finite(map.value);
  const PupilGrid& g = map.grid;
  const double piston = remove.piston ? map.mean() : 0.0;
  double defocus = 0.0;
  if (remove.defocus) {
    for (int i = 0; i < g.rings(); ++i) {
      double ring = 0.0;
      for (int k = 0; k < g.spokes; ++k) ring += map.at(i, k);
      defocus += g.weight[static_cast<std::size_t>(i)] * ring / g.spokes * zernike({2, 0}, g.rho[i], 0.0);
    }
  }
  double acc = 0.0;
  for (int i = 0; i < g.rings(); ++i) {
    const double z = zernike({2, 0}, g.rho[i], 0.0);
    double ring = 0.0;
    for (int k = 0; k < g.spokes; ++k) {
      const double r = map.at(i, k) - piston - defocus * z;
      ring += r * r;
    }
    acc += g.weight[static_cast<std::size_t>(i)] * ring / g.spokes;
  }
  return std::sqrt(acc);
}

}  // namespace uniax
