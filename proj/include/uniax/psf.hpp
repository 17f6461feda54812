#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "uniax/wavefront.hpp"

namespace uniax {

enum class Apodization { aplanatic, uniform };

/// What the objective is designed to cancel. `mean_wavefront` models a lens
/// corrected for the polarization-averaged path (W_o + W_e) / 2 of the stack,
/// including its focal shift and isotropic spherical aberration, so only
/// ±ΔW/2 remains on the two modes. `none` models a lens corrected for air.
enum class ObjectiveCorrection { mean_wavefront, none };

struct PsfOptions {
  Apodization apodization = Apodization::aplanatic;
  ObjectiveCorrection correction = ObjectiveCorrection::mean_wavefront;
  /// Additional pupil aberration in waves, applied to both modes.
  std::function<double(double rho, double phi)> extra_aberration_waves;
  /// Amplitude transmission per mode; unset means 1 (pure-phase model).
  std::function<double(double s, Mode mode)> transmission;
  /// Worker threads for grid evaluation; 0 picks the hardware concurrency.
  /// Results do not depend on this value.
  unsigned threads = 0;
};

using Field3 = std::array<std::complex<double>, 3>;

struct ModeFields {
  Field3 ordinary{};
  Field3 extraordinary{};
  Field3 total() const noexcept;
};

struct AxialSample {
  double total = 0.0;
  double ordinary = 0.0;       // intensity of the ordinary-mode field alone
  double extraordinary = 0.0;  // intensity of the extraordinary-mode field alone
};

/// Angular-spectrum (Debye) representation of the focused field. Each pupil
/// sample is a plane wave with direction sine s = NA·ρ that carries an
/// ordinary and an extraordinary component with their stack phases. Lengths
/// are in nm; z is measured in the focal medium from the nominal focus.
/// Intensities are normalised to the aberration-free peak.
class FocalField {
 public:
  FocalField(const LayerStack& stack, const FocusingConfig& cfg, const PsfOptions& opts = {});

  /// Same pupil, polarization and focal medium with every phase removed.
  FocalField unaberrated() const;

  ModeFields field(double x_nm, double y_nm, double z_nm) const;
  double intensity(double x_nm, double y_nm, double z_nm) const;
  AxialSample axial(double z_nm) const;

  /// Scalar estimate 0.886 λ / (n - sqrt(n² - NA²)) of the axial half-intensity
  /// width in the focal medium; used to size searches.
  double depth_of_focus_estimate_nm() const noexcept;
  /// z step that changes the marginal-ray defocus path by `opd_nm`.
  double defocus_for_opd_nm(double opd_nm) const noexcept;

  /// Intensity on a regular (x, y) grid at depth z. Row-major, rows along y.
  std::vector<double> lateral_plane(double z_nm, std::span<const double> xs, std::span<const double> ys) const;

  double wavelength_nm() const noexcept { return wavelength_nm_; }
  double numerical_aperture() const noexcept { return na_; }
  unsigned threads() const noexcept { return threads_; }
  std::size_t sample_count() const noexcept { return sx_.size(); }

 private:
  FocalField() = default;

  double wavelength_nm_ = 0.0;
  double na_ = 0.0;
  double k0_ = 0.0;  // rad / nm
  double focal_index_ = 1.0;
  double norm_ = 1.0;
  unsigned threads_ = 1;
  // One entry per pupil sample.
  std::vector<double> sx_, sy_, kz_o_, kz_e_, path_o_nm_, path_e_nm_;
  std::vector<std::complex<double>> ox_, oy_, ex_, ey_, ez_;
};

struct BestFocus {
  double defocus_nm = 0.0;
  double peak = 0.0;  // normalised on-axis intensity
};

/// Coarse scan over ±3 depths of focus, then golden-section refinement to a
/// λ/200 path tolerance.
BestFocus find_best_focus(const FocalField& field);

/// Diameter at half maximum of the azimuthally averaged lateral profile.
double spot_fwhm_nm(const FocalField& field, double z_nm, int azimuths = 12);

struct LateralRegion {
  int nx = 129;
  int ny = 129;
  double spacing_nm = 0.0;  // <= λ / (8 NA)
};

struct AxialRegion {
  int nx = 129;
  double x_spacing_nm = 0.0;  // <= λ / (8 NA)
  int nz = 129;
  double z_min_nm = 0.0;
  double z_max_nm = 0.0;
};

struct FieldGrid {
  enum class Plane { lateral, axial };
  Plane plane = Plane::lateral;
  int cols = 0;  // along x
  int rows = 0;  // along y (lateral) or z (axial)
  double col_origin_nm = 0.0;
  double col_spacing_nm = 0.0;
  double row_origin_nm = 0.0;
  double row_spacing_nm = 0.0;
  double defocus_nm = 0.0;  // lateral planes only
  std::vector<double> intensity;  // row-major, normalised to the aberration-free peak

  double at(int row, int col) const noexcept {
    return intensity[static_cast<std::size_t>(row) * cols + col];
  }
  double max() const noexcept;
  /// Σ I · dA over the grid (nm²).
  double integrated_power() const noexcept;
};

FieldGrid vector_psf(const LayerStack& stack, const FocusingConfig& cfg, const LateralRegion& region,
                     double defocus_um, const PsfOptions& opts = {});
FieldGrid vector_psf(const FocalField& field, const LateralRegion& region, double defocus_nm);
FieldGrid vector_psf_axial(const FocalField& field, const AxialRegion& region);

/// Peak on-axis intensity over defocus, relative to the aberration-free peak.
double strehl(const LayerStack& stack, const FocusingConfig& cfg, const PsfOptions& opts = {});

/// Spot diameter at best focus divided by the aberration-free spot diameter.
double resolution_factor(const LayerStack& stack, const FocusingConfig& cfg, const PsfOptions& opts = {});

struct AxialProfile {
  std::vector<double> z_nm;
  std::vector<double> total;
  std::vector<double> ordinary;
  std::vector<double> extraordinary;
  /// Local maxima of the total on-axis intensity above 25% of its maximum
  /// (axial side lobes stay below that).
  std::vector<double> total_peaks_nm;
  /// Refined maxima of the single-mode intensities: where each
  /// polarization comes to focus.
  double ordinary_focus_nm = 0.0;
  double extraordinary_focus_nm = 0.0;
  /// Half-intensity axial width of the aberration-free field in the same
  /// focal medium.
  double unaberrated_dof_nm = 0.0;

  double focus_separation_nm() const noexcept;
};

AxialProfile axial_profile(const FocalField& field, double z_min_nm, double z_max_nm, int samples);
AxialProfile axial_profile(const LayerStack& stack, const FocusingConfig& cfg, double z_min_um,
                           double z_max_um, int samples = 401, const PsfOptions& opts = {});

}  // namespace uniax
