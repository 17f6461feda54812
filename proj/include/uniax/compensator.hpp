#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "uniax/errors.hpp"
#include "uniax/wavefront.hpp"

namespace uniax {

enum class DesignMethod { closed_form, optimized };

std::string_view to_string(DesignMethod method);

/// Substrate plus compensator plate thicknesses for a readout stack.
struct DesignResult {
  double substrate_mm = 0.0;
  double compensator_mm = 0.0;
  /// compensator_mm / substrate_mm as realised.
  double ratio = 0.0;
  /// Ratio the design targeted before any rounding.
  double design_ratio = 0.0;
  DesignMethod method = DesignMethod::closed_form;
  UniaxialMaterial substrate;
  UniaxialMaterial compensator;
};

struct ResidualReport {
  double residual_rms_waves = 0.0;       // compensated stack
  double uncompensated_rms_waves = 0.0;  // substrate alone
  double ratio_percent = 0.0;            // 100 · residual / uncompensated
  double substrate_mm = 0.0;
  double compensator_mm = 0.0;
  FocusingConfig config;
};

/// Leading-order ratio |Δn_s / n_os²| / |Δn_c / n_oc²| that cancels the
/// s² term of ΔW. Throws NoCompensationError unless the signs are opposite.
double generalized_ratio(const UniaxialMaterial& substrate, const UniaxialMaterial& compensator);

/// Thickness ratio compensator/substrate used by the closed-form design:
/// exactly 0.68 for the built-in sapphire/quartz indices, generalized_ratio
/// for any other pair.
double closed_form_ratio(const UniaxialMaterial& substrate, const UniaxialMaterial& compensator);

/// Splits the total thickness H so that compensator/substrate = ratio. The
/// substrate is rounded to the nearest µm and the compensator takes the rest.
/// Throws NoCompensationError unless the two materials have opposite signs.
DesignResult design_closed_form(double total_mm, const UniaxialMaterial& substrate,
                                const UniaxialMaterial& compensator);

/// Compensator plate first (objective side), substrate last, so the focus
/// lies in the substrate.
LayerStack compensated_stack(const Layer& substrate, const UniaxialMaterial& compensator,
                             double compensator_mm);

struct ThicknessBounds {
  double lower_mm = 0.0;
  double upper_mm = 0.0;
};

struct ScanProfile {
  std::vector<double> thickness_mm;
  std::vector<double> residual_rms_waves;
};

/// Raised when the coarse scan finds the smallest residual on a bound.
class NoInteriorMinimumError : public ConfigError {
 public:
  NoInteriorMinimumError(const std::string& what, ScanProfile scan)
      : ConfigError(what), scan_(std::move(scan)) {}
  const ScanProfile& scan() const noexcept { return scan_; }

 private:
  ScanProfile scan_;
};

struct OptimizationResult {
  DesignResult design;
  ResidualReport report;
  ScanProfile scan;
  int evaluations = 0;
};

inline constexpr int kCoarseScanSamples = 101;
inline constexpr double kThicknessToleranceMm = 1e-4;

/// Minimises best_focus_residual of the compensated stack over the plate
/// thickness: coarse scan, then golden-section search to 0.1 µm.
OptimizationResult optimize_thickness(const Layer& substrate, const UniaxialMaterial& compensator,
                                      const FocusingConfig& cfg, ThicknessBounds bounds);

/// Residual of the compensated stack relative to the substrate alone.
/// Throws NumericalError if the substrate alone has no residual.
ResidualReport residual_ratio(const Layer& substrate, const DesignResult& design, const FocusingConfig& cfg);

struct ThicknessLimit {
  enum class Status { bounded, unbounded_isotropic, above_limit };
  Status status = Status::bounded;
  /// Largest thickness meeting the criterion (to 1 µm); the layer limit
  /// for above_limit; 0 for unbounded_isotropic.
  double thickness_mm = 0.0;
  double criterion_waves = 0.0;
};

std::string_view to_string(ThicknessLimit::Status status);

inline constexpr double kMarechalRmsWaves = 1.0 / 14.0;

ThicknessLimit max_allowable_thickness(const UniaxialMaterial& m, const FocusingConfig& cfg,
                                       double criterion_waves = kMarechalRmsWaves);

}  // namespace uniax
