#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "uniax/materials.hpp"

namespace uniax {

/// Eigenmodes of a uniaxial layer with its optic axis along the surface
/// normal. The azimuthal (s) pupil component couples to the ordinary wave,
/// the radial (p) component to the extraordinary wave.
enum class Mode { ordinary, extraordinary };

enum class Polarization { linear_x, linear_y, circular };

std::string_view to_string(Mode mode);
std::string_view to_string(Polarization pol);
/// Accepts "linear-x", "linear-y", "circular".
Polarization parse_polarization(std::string_view text);

/// What a layer stands for in a compensated readout stack.
enum class LayerRole { generic, substrate, compensator };

std::string_view to_string(LayerRole role);

struct Layer {
  UniaxialMaterial material;
  double thickness_mm = 0.0;
  LayerRole role = LayerRole::generic;
};

/// Plane-parallel layers in the order light meets them, objective first.
/// The surrounding medium is air. The focal region lies in the medium of the
/// last layer (air for an empty stack).
class LayerStack {
 public:
  static constexpr double kMaxLayerThicknessMm = 10.0;
  static constexpr double kMaxTotalThicknessMm = 20.0;

  LayerStack() = default;
  /// Throws ConfigError if a layer is not in (0, 10] mm, a material is
  /// invalid, or the total exceeds 20 mm.
  explicit LayerStack(std::vector<Layer> layers);

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  bool empty() const noexcept { return layers_.empty(); }
  double total_thickness_mm() const noexcept;
  /// Summed thickness of the layers carrying `role`.
  double thickness_mm(LayerRole role) const noexcept;
  const UniaxialMaterial& focal_medium() const noexcept;

 private:
  std::vector<Layer> layers_;
  UniaxialMaterial air_ = builtin::air();
};

/// Axial wavenumbers in units of the vacuum wavenumber. `s` is the sine of
/// the ray angle in air, conserved across the flat interfaces.
double kz_ordinary(const UniaxialMaterial& m, double s);
double kz_extraordinary(const UniaxialMaterial& m, double s);
double kz(const UniaxialMaterial& m, double s, Mode mode);

/// Optical path thickness * kz, in mm.
double layer_phase_mm(const Layer& layer, double s, Mode mode);

/// Longitudinal separation of the ordinary and extraordinary foci,
/// 2 h |Δn| / n_o, in µm, measured inside the crystal. `delta_n_override`
/// replaces n_e - n_o (for example the rounded 8e-3 for sapphire).
double focal_split_um(double h_mm, const UniaxialMaterial& m,
                      std::optional<double> delta_n_override = std::nullopt);

/// The same separation expressed as an in-air equivalent, 2 h |Δn| / n_o².
double focal_split_air_um(double h_mm, const UniaxialMaterial& m,
                          std::optional<double> delta_n_override = std::nullopt);

struct ModeAmplitudes {
  std::complex<double> ordinary;
  std::complex<double> extraordinary;
};

/// Projects the input pupil field onto the azimuthal (ordinary) and radial
/// (extraordinary) unit vectors at pupil azimuth `phi`.
ModeAmplitudes pupil_polarization_split(double phi, Polarization pol) noexcept;

}  // namespace uniax
