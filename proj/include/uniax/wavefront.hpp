#pragma once

#include "uniax/birefringence.hpp"
#include "uniax/pupil.hpp"
#include "uniax/zernike.hpp"

namespace uniax {

struct FocusingConfig {
  double numerical_aperture = 0.4;
  double wavelength_nm = 442.0;
  Polarization input_polarization = Polarization::circular;
  int pupil_rings = 64;
  int pupil_spokes = 128;

  /// 0 < NA < 1, 150 <= λ <= 2000 nm, rings >= 64, spokes >= 128.
  void validate() const;
  PupilGrid pupil_grid() const { return make_pupil_grid(pupil_rings, pupil_spokes); }
};

/// Optical path added by the stack for a ray of direction sine `s`, relative
/// to the on-axis ray and to the air each layer displaces, in mm:
///   Σ h [(kz(s) - kz(0)) - (sqrt(1 - s²) - 1)].
/// Zero at s = 0 and identically zero for air layers.
double stack_opd_mm(const LayerStack& stack, double s, Mode mode);

/// stack_opd_mm at s = NA·rho, in waves.
double opd_waves(const LayerStack& stack, const FocusingConfig& cfg, Mode mode, double rho);

/// Per-mode radial aberration profiles, in waves at the configured λ.
struct WavefrontMap {
  double numerical_aperture = 0.0;
  double wavelength_nm = 0.0;
  RadialProfile ordinary;
  RadialProfile extraordinary;

  /// ΔW = W_extraordinary - W_ordinary.
  RadialProfile difference() const;
};

WavefrontMap stack_aberration(const LayerStack& stack, const FocusingConfig& cfg);
RadialProfile aberration_difference(const LayerStack& stack, const FocusingConfig& cfg);

/// Polarization-weighted 2-D map |a_o|² W_o + |a_e|² W_e on the full pupil
/// grid. For linear input this carries the cos 2φ astigmatic structure of ΔW.
PupilMap synthesize_pupil_map(const WavefrontMap& map, Polarization pol, int spokes);

/// RMS (waves) of ΔW after piston removal. A common refocus shifts W_o and
/// W_e together and leaves ΔW untouched, so the differential defocus stays
/// in the residual.
double best_focus_residual(const LayerStack& stack, const FocusingConfig& cfg);

}  // namespace uniax
