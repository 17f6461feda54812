#include "uniax/birefringence.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "uniax/errors.hpp"

namespace uniax {

std::string_view to_string(Mode mode) {
  return mode == Mode::ordinary ? "ordinary" : "extraordinary";
}

std::string_view to_string(Polarization pol) {
  switch (pol) {
    case Polarization::linear_x: return "linear-x";
    case Polarization::linear_y: return "linear-y";
    case Polarization::circular: return "circular";
  }
  return "unknown";
}

Polarization parse_polarization(std::string_view text) {
  if (text == "linear-x") return Polarization::linear_x;
  if (text == "linear-y") return Polarization::linear_y;
  if (text == "circular") return Polarization::circular;
  throw ConfigError("unknown polarization '" + std::string(text) +
                    "' (expected linear-x, linear-y or circular)");
}

std::string_view to_string(LayerRole role) {
  switch (role) {
    case LayerRole::generic: return "generic";
    case LayerRole::substrate: return "substrate";
    case LayerRole::compensator: return "compensator";
  }
  return "unknown";
}

LayerStack::LayerStack(std::vector<Layer> layers) : layers_(std::move(layers)) {
  double total = 0.0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    validate(l.material);
    if (!(l.thickness_mm > 0.0) || l.thickness_mm > kMaxLayerThicknessMm) {
      std::ostringstream os;
      os << "layer " << i + 1 << " (" << l.material.name << "): thickness " << l.thickness_mm
         << " mm outside (0, " << kMaxLayerThicknessMm << "]";
      throw ConfigError(os.str());
    }
    total += l.thickness_mm;
  }
  if (total > kMaxTotalThicknessMm) {
    std::ostringstream os;
    os << "stack total thickness " << total << " mm exceeds " << kMaxTotalThicknessMm << " mm";
    throw ConfigError(os.str());
  }
}

double LayerStack::total_thickness_mm() const noexcept {
  double t = 0.0;
  for (const auto& l : layers_) t += l.thickness_mm;
  return t;
}

double LayerStack::thickness_mm(LayerRole role) const noexcept {
  double t = 0.0;
  for (const auto& l : layers_) {
    if (l.role == role) t += l.thickness_mm;
  }
  return t;
}

const UniaxialMaterial& LayerStack::focal_medium() const noexcept {
  return layers_.empty() ? air_ : layers_.back().material;
}

namespace {

void require_propagating(const UniaxialMaterial& m, double s, double limit, Mode mode) {
  if (!(s >= 0.0) || !(s < limit)) {
    std::ostringstream os;
    os << "evanescent " << to_string(mode) << " wave in '" << m.name << "': s=" << s
       << " outside [0, " << limit << ")";
    throw EvanescentError(os.str());
  }
}

}  // namespace

double kz_ordinary(const UniaxialMaterial& m, double s) {
  require_propagating(m, s, m.n_o, Mode::ordinary);
  return std::sqrt(m.n_o * m.n_o - s * s);
}

double kz_extraordinary(const UniaxialMaterial& m, double s) {
  if (m.is_isotropic()) return kz_ordinary(m, s);
  require_propagating(m, s, m.n_e, Mode::extraordinary);
  const double q = s / m.n_e;
  return m.n_o * std::sqrt(1.0 - q * q);
}

double kz(const UniaxialMaterial& m, double s, Mode mode) {
  return mode == Mode::ordinary ? kz_ordinary(m, s) : kz_extraordinary(m, s);
}

double layer_phase_mm(const Layer& layer, double s, Mode mode) {
  return layer.thickness_mm * kz(layer.material, s, mode);
}

double focal_split_um(double h_mm, const UniaxialMaterial& m, std::optional<double> delta_n_override) {
  if (!(h_mm > 0.0)) throw ConfigError("focal split needs a positive thickness");
  const double dn = delta_n_override.value_or(delta_n(m));
  return 2.0 * h_mm * std::abs(dn) / m.n_o * 1e3;
}

double focal_split_air_um(double h_mm, const UniaxialMaterial& m,
                          std::optional<double> delta_n_override) {
  return focal_split_um(h_mm, m, delta_n_override) / m.n_o;
}

ModeAmplitudes pupil_polarization_split(double phi, Polarization pol) noexcept {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  switch (pol) {
    case Polarization::linear_x: return {{-s, 0.0}, {c, 0.0}};
    case Polarization::linear_y: return {{c, 0.0}, {s, 0.0}};
    case Polarization::circular: {
      // (x + i y) / sqrt(2) projected on the azimuthal and radial unit vectors.
      const std::complex<double> radial = std::complex<double>(c, s) / std::numbers::sqrt2;
      return {std::complex<double>(0.0, 1.0) * radial, radial};
    }
  }
  return {};
}

}  // namespace uniax
