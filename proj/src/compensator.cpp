#include "uniax/compensator.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uniax/optim.hpp"

namespace uniax {

std::string_view to_string(DesignMethod method) {
  return method == DesignMethod::closed_form ? "closed_form" : "optimized";
}

std::string_view to_string(ThicknessLimit::Status status) {
  switch (status) {
    case ThicknessLimit::Status::bounded: return "bounded";
    case ThicknessLimit::Status::unbounded_isotropic: return "unbounded_isotropic";
    case ThicknessLimit::Status::above_limit: return "above_limit";
  }
  return "unknown";
}

namespace {

bool same_indices(const UniaxialMaterial& a, const UniaxialMaterial& b) {
  return a.n_o == b.n_o && a.n_e == b.n_e;
}

void require_opposite_signs(const UniaxialMaterial& substrate, const UniaxialMaterial& compensator) {
  const OpticalSign s = optical_sign(substrate);
  const OpticalSign c = optical_sign(compensator);
  if (s == OpticalSign::isotropic || c == OpticalSign::isotropic || s == c) {
    std::ostringstream os;
    os << "no compensation possible: substrate '" << substrate.name << "' is " << to_string(s)
       << " and compensator '" << compensator.name << "' is " << to_string(c)
       << "; an opposite-sign uniaxial pair is required";
    throw NoCompensationError(os.str());
  }
}

double residual_of(const LayerStack& stack, const FocusingConfig& cfg) {
  return best_focus_residual(stack, cfg);
}

}  // namespace

double generalized_ratio(const UniaxialMaterial& substrate, const UniaxialMaterial& compensator) {
  require_opposite_signs(substrate, compensator);
  const double ws = std::abs(delta_n(substrate)) / (substrate.n_o * substrate.n_o);
  const double wc = std::abs(delta_n(compensator)) / (compensator.n_o * compensator.n_o);
  return ws / wc;
}

double closed_form_ratio(const UniaxialMaterial& substrate, const UniaxialMaterial& compensator) {
  require_opposite_signs(substrate, compensator);
  if (same_indices(substrate, builtin::sapphire()) && same_indices(compensator, builtin::quartz())) {
    return 0.68;
  }
  return generalized_ratio(substrate, compensator);
}

DesignResult design_closed_form(double total_mm, const UniaxialMaterial& substrate,
                                const UniaxialMaterial& compensator) {
  validate(substrate);
  validate(compensator);
  if (!(total_mm > 0.0) || !std::isfinite(total_mm)) {
    throw ConfigError("total thickness must be positive, got " + std::to_string(total_mm) + " mm");
  }
  const double r = closed_form_ratio(substrate, compensator);
  DesignResult d;
  d.substrate_mm = std::round(total_mm / (1.0 + r) * 1e3) / 1e3;
  d.compensator_mm = total_mm - d.substrate_mm;
  if (!(d.substrate_mm > 0.0) || !(d.compensator_mm > 0.0)) {
    throw ConfigError("total thickness " + std::to_string(total_mm) + " mm is too thin to split at 1 µm");
  }
  d.ratio = d.compensator_mm / d.substrate_mm;
  d.design_ratio = r;
  d.method = DesignMethod::closed_form;
  d.substrate = substrate;
  d.compensator = compensator;
  return d;
}

LayerStack compensated_stack(const Layer& substrate, const UniaxialMaterial& compensator,
                             double compensator_mm) {
  Layer sub = substrate;
  sub.role = LayerRole::substrate;
  if (compensator_mm == 0.0) return LayerStack({sub});
  return LayerStack({Layer{compensator, compensator_mm, LayerRole::compensator}, sub});
}

OptimizationResult optimize_thickness(const Layer& substrate, const UniaxialMaterial& compensator,
                                      const FocusingConfig& cfg, ThicknessBounds bounds) {
  cfg.validate();
  validate(compensator);
  if (substrate.material.is_isotropic()) {
    throw NoCompensationError("substrate '" + substrate.material.name +
                              "' is isotropic: ΔW vanishes and there is nothing to compensate");
  }
  if (!(bounds.lower_mm > 0.0) || !(bounds.upper_mm > bounds.lower_mm) ||
      bounds.upper_mm > LayerStack::kMaxLayerThicknessMm) {
    std::ostringstream os;
    os << "thickness bounds [" << bounds.lower_mm << ", " << bounds.upper_mm
       << "] mm must satisfy 0 < lower < upper <= " << LayerStack::kMaxLayerThicknessMm;
    throw ConfigError(os.str());
  }

  auto merit = [&](double t) { return residual_of(compensated_stack(substrate, compensator, t), cfg); };

  OptimizationResult out;
  const double step = (bounds.upper_mm - bounds.lower_mm) / (kCoarseScanSamples - 1);
  std::size_t best = 0;
  for (int i = 0; i < kCoarseScanSamples; ++i) {
    const double t = bounds.lower_mm + i * step;
    out.scan.thickness_mm.push_back(t);
    out.scan.residual_rms_waves.push_back(merit(t));
    if (out.scan.residual_rms_waves.back() < out.scan.residual_rms_waves[best]) best = out.scan.thickness_mm.size() - 1;
  }
  if (best == 0 || best + 1 == out.scan.thickness_mm.size()) {
    std::ostringstream os;
    os << "no interior minimum of the residual in [" << bounds.lower_mm << ", " << bounds.upper_mm
       << "] mm: coarse scan is smallest at t=" << out.scan.thickness_mm[best] << " mm";
    throw NoInteriorMinimumError(os.str(), out.scan);
  }

  const ScalarMinimum m = golden_section_minimize(merit, out.scan.thickness_mm[best - 1],
                                                  out.scan.thickness_mm[best + 1], kThicknessToleranceMm);
  out.evaluations = kCoarseScanSamples + m.evaluations;

  DesignResult& d = out.design;
  d.substrate_mm = substrate.thickness_mm;
  d.compensator_mm = m.x;
  d.ratio = m.x / substrate.thickness_mm;
  d.design_ratio = d.ratio;
  d.method = DesignMethod::optimized;
  d.substrate = substrate.material;
  d.compensator = compensator;
  out.report = residual_ratio(substrate, d, cfg);
  return out;
}

ResidualReport residual_ratio(const Layer& substrate, const DesignResult& design, const FocusingConfig& cfg) {
  cfg.validate();
  ResidualReport r;
  r.config = cfg;
  r.substrate_mm = substrate.thickness_mm;
  r.compensator_mm = design.compensator_mm;
  r.uncompensated_rms_waves = residual_of(LayerStack({substrate}), cfg);
  if (!(r.uncompensated_rms_waves > 0.0)) {
    throw NumericalError("substrate alone has zero residual; the residual ratio is undefined");
  }
  r.residual_rms_waves = residual_of(compensated_stack(substrate, design.compensator, design.compensator_mm), cfg);
  r.ratio_percent = 100.0 * (r.residual_rms_waves / r.uncompensated_rms_waves);
  return r;
}

ThicknessLimit max_allowable_thickness(const UniaxialMaterial& m, const FocusingConfig& cfg,
                                       double criterion_waves) {
  cfg.validate();
  validate(m);
  if (!(criterion_waves > 0.0) || !std::isfinite(criterion_waves)) {
    throw ConfigError("criterion must be a positive RMS in waves");
  }
  ThicknessLimit out;
  out.criterion_waves = criterion_waves;
  if (optical_sign(m) == OpticalSign::isotropic) {
    out.status = ThicknessLimit::Status::unbounded_isotropic;
    return out;
  }
  auto excess = [&](double h) {
    if (h <= 0.0) return -criterion_waves;
    return residual_of(LayerStack({Layer{m, h, LayerRole::substrate}}), cfg) - criterion_waves;
  };
  const double hi = LayerStack::kMaxLayerThicknessMm;
  if (excess(hi) <= 0.0) {
    out.status = ThicknessLimit::Status::above_limit;
    out.thickness_mm = hi;
    return out;
  }
  const auto r = boost::math::tools::bisect(excess, 0.0, hi,
                                            [](double a, double b) { return std::abs(b - a) <= 1e-3; });
  // The lower end of the final bracket still meets the criterion.
  out.thickness_mm = r.first;
  return out;
}

}  // namespace uniax
