#pragma once

#include <numbers>
#include <vector>

namespace uniax {

/// Polar sampling of the unit pupil disk: Gauss-Legendre nodes in ρ² (so
/// each ring stands for an area fraction of the disk) times uniformly spaced
/// azimuths. The rule integrates polynomials in ρ² of degree < 2·rings and
/// trigonometric polynomials of degree < spokes exactly, which makes
/// Zernike modes up to radial order 12 exactly orthonormal on the grid for
/// the default sizes.
struct PupilGrid {
  std::vector<double> rho;     // ascending ring radii in (0, 1)
  std::vector<double> weight;  // area fraction per ring, sums to 1
  int spokes = 0;

  int rings() const noexcept { return static_cast<int>(rho.size()); }
  double phi(int k) const noexcept { return 2.0 * std::numbers::pi * k / spokes; }
};

/// Throws ConfigError for rings < 1 or spokes < 1.
PupilGrid make_pupil_grid(int rings, int spokes);

/// Rotationally symmetric function sampled on the ring radii of a grid.
struct RadialProfile {
  std::vector<double> rho;
  std::vector<double> weight;
  std::vector<double> value;

  /// Area-weighted mean over the disk.
  double mean() const noexcept;
};

/// Full 2-D function on the pupil grid, ring-major: value[i * spokes + k].
struct PupilMap {
  PupilGrid grid;
  std::vector<double> value;

  double at(int ring, int spoke) const noexcept {
    return value[static_cast<std::size_t>(ring) * grid.spokes + spoke];
  }
  double mean() const noexcept;
};

}  // namespace uniax
