#pragma once

#include <vector>

#include "uniax/pupil.hpp"

namespace uniax {

/// Radial order n and azimuthal frequency m (|m| <= n, n - |m| even).
/// m >= 0 selects cos(mφ), m < 0 selects sin(|m|φ).
struct ZernikeMode {
  int n = 0;
  int m = 0;
  friend bool operator==(const ZernikeMode&, const ZernikeMode&) = default;
};

/// Single-index scheme used throughout: OSA/ANSI, j = (n(n+2) + m) / 2.
/// j = 0 piston, 4 defocus (2,0), 12 primary spherical (4,0).
/// The full table ships as data/zernike_index.csv.
int osa_index(ZernikeMode mode);
ZernikeMode osa_mode(int j);
int mode_count(int max_order) noexcept;

inline constexpr int kMaxZernikeOrder = 12;

double zernike_radial(int n, int m, double rho);
/// RMS-normalised over the unit disk: the disk average of Z² is 1.
double zernike(ZernikeMode mode, double rho, double phi);

struct ZernikeSpectrum {
  int max_order = 0;
  std::vector<double> coefficients;  // indexed by osa_index, units of the input map
  double reconstruction_rms = 0.0;   // RMS of input minus reconstruction

  double coefficient(ZernikeMode mode) const;
  /// Sum of squared coefficients excluding piston.
  double variance() const noexcept;
};

/// Inner products of the map with every mode up to `max_order` (<= 12),
/// evaluated with the grid's quadrature. Throws NumericalError on
/// non-finite input.
ZernikeSpectrum zernike_decompose(const RadialProfile& profile, int max_order);
ZernikeSpectrum zernike_decompose(const PupilMap& map, int max_order);

PupilMap zernike_reconstruct(const ZernikeSpectrum& spectrum, const PupilGrid& grid);

/// Modes removed before an RMS is taken.
struct ModeRemoval {
  bool piston = false;
  bool defocus = false;
};

/// Area-weighted RMS over the disk after orthogonal projection-removal of
/// the selected modes.
double rms_wavefront(const RadialProfile& profile, ModeRemoval remove);
double rms_wavefront(const PupilMap& map, ModeRemoval remove);

}  // namespace uniax
