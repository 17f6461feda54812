#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "uniax/compensator.hpp"

using namespace uniax;

namespace {

FocusingConfig config(double na, double lambda) {
  FocusingConfig c;
  c.numerical_aperture = na;
  c.wavelength_nm = lambda;
  return c;
}

Layer sapphire(double h) { return Layer{builtin::sapphire(), h, LayerRole::substrate}; }

const UniaxialMaterial kCalcite{"calcite", 1.6584, 1.4864, 589.3, {}};

// Argmin of the merit over a 1 µm grid.
double brute_argmin(const Layer& sub, const UniaxialMaterial& comp, const FocusingConfig& cfg, double lo, double hi) {
  double best_t = lo;
  double best = 1e300;
  for (int i = 0; lo + i * 1e-3 <= hi + 1e-12; ++i) {
    const double t = lo + i * 1e-3;
    const double v = best_focus_residual(compensated_stack(sub, comp, t), cfg);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

TEST_SUITE("compensator") {

TEST_CASE("closed-form thicknesses for the CD and DVD stacks") {
  const auto cd = design_closed_form(1.2, builtin::sapphire(), builtin::quartz());
  CHECK(cd.substrate_mm == 0.714);
  CHECK(cd.compensator_mm == doctest::Approx(0.486).epsilon(1e-12));
  CHECK(cd.substrate_mm + cd.compensator_mm == 1.2);
  CHECK(cd.design_ratio == 0.68);
  CHECK(cd.method == DesignMethod::closed_form);
  const auto dvd = design_closed_form(0.6, builtin::sapphire(), builtin::quartz());
  CHECK(dvd.substrate_mm == 0.357);
  CHECK(dvd.compensator_mm == doctest::Approx(0.243).epsilon(1e-12));
  CHECK(dvd.substrate_mm + dvd.compensator_mm == 0.6);
}

TEST_CASE("generalized ratio") {
  const double r = generalized_ratio(builtin::sapphire(), builtin::quartz());
  CHECK(r == doctest::Approx(0.68789137304692747).epsilon(1e-12));
  CHECK(std::abs(r - 0.68) < 0.01);
  // Any other pair uses it, and it is symmetric under swapping roles.
  const UniaxialMaterial mgf2{"mgf2", 1.3777, 1.3895, std::nullopt, {}};
  const auto d = design_closed_form(2.0, kCalcite, mgf2);
  CHECK(d.design_ratio == doctest::Approx(generalized_ratio(kCalcite, mgf2)).epsilon(1e-15));
  CHECK(generalized_ratio(mgf2, kCalcite) == doctest::Approx(1.0 / generalized_ratio(kCalcite, mgf2)));
}

TEST_CASE("no compensation for same-sign or isotropic pairs") {
  CHECK_THROWS_AS(design_closed_form(1.2, builtin::sapphire(), kCalcite), NoCompensationError);
  CHECK_THROWS_AS(design_closed_form(1.2, builtin::sapphire(), builtin::fused_silica()), NoCompensationError);
  CHECK_THROWS_AS(design_closed_form(1.2, builtin::air(), builtin::quartz()), NoCompensationError);
  CHECK_THROWS_AS(design_closed_form(0.0, builtin::sapphire(), builtin::quartz()), ConfigError);
}

TEST_CASE("optimizer on the CD configuration") {
  const auto cfg = config(0.45, 442);
  const auto r = optimize_thickness(sapphire(0.714), builtin::quartz(), cfg, {0.1, 1.0});
  CHECK(r.design.method == DesignMethod::optimized);
  CHECK(r.design.ratio >= 0.67);
  CHECK(r.design.ratio <= 0.70);
  CHECK(std::abs(r.design.ratio - 0.68) / 0.68 < 0.03);
  CHECK(std::abs(r.design.compensator_mm - brute_argmin(sapphire(0.714), builtin::quartz(), cfg, 0.1, 1.0)) <= 2e-3);
  CHECK(r.scan.thickness_mm.size() == static_cast<std::size_t>(kCoarseScanSamples));
  CHECK(r.report.ratio_percent > 0.0);
  CHECK(r.report.ratio_percent < 100.0);
}

TEST_CASE("optimum scales with the substrate") {
  const auto cfg = config(0.45, 442);
  const auto a = optimize_thickness(sapphire(0.5), builtin::quartz(), cfg, {0.05, 1.0});
  const auto b = optimize_thickness(sapphire(1.0), builtin::quartz(), cfg, {0.05, 2.0});
  CHECK(b.design.compensator_mm == doctest::Approx(2.0 * a.design.compensator_mm).epsilon(0.01));
  CHECK(b.design.ratio == doctest::Approx(a.design.ratio).epsilon(0.01));
}

TEST_CASE("optimum is independent of wavelength") {
  const auto a = optimize_thickness(sapphire(0.714), builtin::quartz(), config(0.3, 442), {0.1, 1.0});
  const auto b = optimize_thickness(sapphire(0.714), builtin::quartz(), config(0.3, 884), {0.1, 1.0});
  CHECK(std::abs(a.design.compensator_mm - b.design.compensator_mm) <= 2.0 * kThicknessToleranceMm);
  CHECK(a.report.residual_rms_waves == doctest::Approx(2.0 * b.report.residual_rms_waves).epsilon(1e-3));
}

TEST_CASE("closed form and optimizer agree at moderate NA") {
  const double closed = closed_form_ratio(builtin::sapphire(), builtin::quartz());
  for (double na : {0.2, 0.35, 0.45}) {
    const auto r = optimize_thickness(sapphire(0.714), builtin::quartz(), config(na, 442), {0.1, 1.0});
    CHECK(std::abs(r.design.ratio - closed) / closed < 0.03);
  }
}

TEST_CASE("residual rises away from the optimum") {
  const auto r = optimize_thickness(sapphire(0.714), builtin::quartz(), config(0.45, 442), {0.1, 1.0});
  const auto& v = r.scan.residual_rms_waves;
  const std::size_t k = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  for (std::size_t i = 0; i + 1 <= k; ++i) CHECK(v[i] > v[i + 1]);
  for (std::size_t i = k; i + 1 < v.size(); ++i) CHECK(v[i + 1] > v[i]);
}

TEST_CASE("optimizer rejections") {
  const auto cfg = config(0.45, 442);
  CHECK_THROWS_AS(optimize_thickness(Layer{builtin::fused_silica(), 1.0}, builtin::quartz(), cfg, {0.1, 1.0}),
                  NoCompensationError);
  CHECK_THROWS_AS(optimize_thickness(sapphire(0.714), builtin::quartz(), cfg, {0.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(optimize_thickness(sapphire(0.714), builtin::quartz(), cfg, {1.0, 0.5}), ConfigError);
  try {
    optimize_thickness(sapphire(0.714), builtin::quartz(), cfg, {0.6, 1.0});
    FAIL("expected an error");
  } catch (const NoInteriorMinimumError& e) {
    CHECK(e.scan().thickness_mm.size() == static_cast<std::size_t>(kCoarseScanSamples));
    CHECK(e.scan().thickness_mm.front() == 0.6);
  }
}

TEST_CASE("a same-sign plate never helps") {
  const auto cfg = config(0.45, 442);
  const double alone = best_focus_residual(LayerStack({sapphire(0.714)}), cfg);
  for (double t = 0.001; t <= 1.0; t += 0.033) {
    CHECK(best_focus_residual(compensated_stack(sapphire(0.714), kCalcite, t), cfg) >= alone);
  }
  CHECK_THROWS_AS(optimize_thickness(sapphire(0.714), kCalcite, cfg, {0.01, 1.0}), NoInteriorMinimumError);
}

TEST_CASE("residual ratios") {
  const auto cd = design_closed_form(1.2, builtin::sapphire(), builtin::quartz());
  const auto rcd = residual_ratio(sapphire(cd.substrate_mm), cd, config(0.45, 780));
  CHECK(rcd.ratio_percent == doctest::Approx(1.5701857590752529).epsilon(1e-8));
  CHECK(rcd.uncompensated_rms_waves == doctest::Approx(0.14619666165325933).epsilon(1e-9));
  const auto dvd = design_closed_form(0.6, builtin::sapphire(), builtin::quartz());
  const auto rdvd = residual_ratio(sapphire(dvd.substrate_mm), dvd, config(0.6, 650));
  CHECK(rdvd.ratio_percent == doctest::Approx(0.81523642216347533).epsilon(1e-8));

  DesignResult none = cd;
  none.compensator_mm = 0.0;
  CHECK(residual_ratio(sapphire(0.714), none, config(0.45, 780)).ratio_percent == 100.0);
  CHECK_THROWS_AS(residual_ratio(Layer{builtin::fused_silica(), 0.714}, cd, config(0.45, 780)), NumericalError);
}

TEST_CASE("maximum allowable thickness") {
  const auto cfg = config(0.4, 442);
  const auto lim = max_allowable_thickness(builtin::sapphire(), cfg);
  CHECK(lim.status == ThicknessLimit::Status::bounded);
  // Linear-scaling oracle: (1/14) / residual per mm.
  CHECK(std::abs(lim.thickness_mm - 0.25196910319015729) <= 1e-3);
  CHECK(lim.thickness_mm <= 0.25196910319015729);
  CHECK(best_focus_residual(LayerStack({sapphire(lim.thickness_mm)}), cfg) <= kMarechalRmsWaves);
  CHECK(best_focus_residual(LayerStack({sapphire(lim.thickness_mm + 1e-3)}), cfg) > kMarechalRmsWaves);

  CHECK(max_allowable_thickness(builtin::sapphire(), cfg, 1e-9).thickness_mm < 1e-3);

  const UniaxialMaterial weak{"weak", 1.78038, 1.78038 - 0.004, std::nullopt, {}};
  const UniaxialMaterial strong{"strong", 1.78038, 1.78038 - 0.008, std::nullopt, {}};
  const double hw = max_allowable_thickness(weak, cfg).thickness_mm;
  const double hs = max_allowable_thickness(strong, cfg).thickness_mm;
  CHECK(hw / hs == doctest::Approx(2.0).epsilon(0.02));

  CHECK(max_allowable_thickness(builtin::fused_silica(), cfg).status == ThicknessLimit::Status::unbounded_isotropic);
  CHECK(max_allowable_thickness(builtin::sapphire(), config(0.05, 2000), 0.5).status ==
        ThicknessLimit::Status::above_limit);
  CHECK_THROWS_AS(max_allowable_thickness(builtin::sapphire(), cfg, 0.0), ConfigError);
}

}
