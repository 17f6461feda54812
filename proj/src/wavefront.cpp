#include "uniax/wavefront.hpp"

#include <cmath>
#include <sstream>

#include "uniax/errors.hpp"

namespace uniax {

void FocusingConfig::validate() const {
  std::ostringstream os;
  if (!(numerical_aperture > 0.0 && numerical_aperture < 1.0)) {
    os << "numerical aperture " << numerical_aperture << " outside (0, 1)";
  } else if (!(wavelength_nm >= 150.0 && wavelength_nm <= 2000.0)) {
    os << "wavelength " << wavelength_nm << " nm outside [150, 2000]";
  } else if (pupil_rings < 64) {
    os << "pupil_rings " << pupil_rings << " < 64";
  } else if (pupil_spokes < 128) {
    os << "pupil_spokes " << pupil_spokes << " < 128";
  } else {
    return;
  }
  throw ConfigError(os.str());
}

double stack_opd_mm(const LayerStack& stack, double s, Mode mode) {
  const double air = std::sqrt(1.0 - s * s) - 1.0;
  double opd = 0.0;
  const auto& layers = stack.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    try {
      opd += l.thickness_mm * ((kz(l.material, s, mode) - kz(l.material, 0.0, mode)) - air);
    } catch (const EvanescentError& e) {
      throw EvanescentError("layer " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return opd;
}

double opd_waves(const LayerStack& stack, const FocusingConfig& cfg, Mode mode, double rho) {
  return stack_opd_mm(stack, cfg.numerical_aperture * rho, mode) * 1e6 / cfg.wavelength_nm;
}

RadialProfile WavefrontMap::difference() const {
  RadialProfile d = extraordinary;
  for (std::size_t i = 0; i < d.value.size(); ++i) d.value[i] -= ordinary.value[i];
  return d;
}

WavefrontMap stack_aberration(const LayerStack& stack, const FocusingConfig& cfg) {
  cfg.validate();
  const PupilGrid grid = make_pupil_grid(cfg.pupil_rings, 1);
  WavefrontMap map;
  map.numerical_aperture = cfg.numerical_aperture;
  map.wavelength_nm = cfg.wavelength_nm;
  map.ordinary = {grid.rho, grid.weight, {}};
  map.ordinary.value.reserve(grid.rho.size());
  map.extraordinary = map.ordinary;
  for (double rho : grid.rho) {
    map.ordinary.value.push_back(opd_waves(stack, cfg, Mode::ordinary, rho));
    map.extraordinary.value.push_back(opd_waves(stack, cfg, Mode::extraordinary, rho));
  }
  for (std::size_t i = 0; i < grid.rho.size(); ++i) {
    if (!std::isfinite(map.ordinary.value[i]) || !std::isfinite(map.extraordinary.value[i])) {
      throw NumericalError("non-finite wavefront sample");
    }
  }
  return map;
}

RadialProfile aberration_difference(const LayerStack& stack, const FocusingConfig& cfg) {
  return stack_aberration(stack, cfg).difference();
}

PupilMap synthesize_pupil_map(const WavefrontMap& map, Polarization pol, int spokes) {
  PupilMap out;
  out.grid.rho = map.ordinary.rho;
  out.grid.weight = map.ordinary.weight;
  out.grid.spokes = spokes;
  out.value.resize(map.ordinary.rho.size() * static_cast<std::size_t>(spokes));
  for (int k = 0; k < spokes; ++k) {
    const ModeAmplitudes a = pupil_polarization_split(out.grid.phi(k), pol);
    const double wo = std::norm(a.ordinary);
    const double we = std::norm(a.extraordinary);
    for (std::size_t i = 0; i < map.ordinary.rho.size(); ++i) {
      out.value[i * spokes + k] = wo * map.ordinary.value[i] + we * map.extraordinary.value[i];
    }
  }
  return out;
}

double best_focus_residual(const LayerStack& stack, const FocusingConfig& cfg) {
  return rms_wavefront(aberration_difference(stack, cfg), {.piston = true, .defocus = false});
}

}  // namespace uniax
