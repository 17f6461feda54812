#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uniax/errors.hpp"
#include "uniax/wavefront.hpp"

using namespace uniax;

namespace {

FocusingConfig config(double na, double lambda) {
  FocusingConfig c;
  c.numerical_aperture = na;
  c.wavelength_nm = lambda;
  return c;
}

LayerStack single(const UniaxialMaterial& m, double h) { return LayerStack({Layer{m, h, LayerRole::substrate}}); }

LayerStack cd_stack() {
  return LayerStack({Layer{builtin::quartz(), 0.486, LayerRole::compensator},
                     Layer{builtin::sapphire(), 0.714, LayerRole::substrate}});
}

double max_abs(const RadialProfile& p) {
  double m = 0.0;
  for (double v : p.value) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_SUITE("wavefront") {

TEST_CASE("config validation") {
  CHECK_NOTHROW(FocusingConfig{}.validate());
  CHECK_THROWS_AS(config(0.0, 442).validate(), ConfigError);
  CHECK_THROWS_AS(config(1.0, 442).validate(), ConfigError);
  CHECK_THROWS_AS(config(0.4, 100).validate(), ConfigError);
  CHECK_THROWS_AS(config(0.4, 2500).validate(), ConfigError);
  FocusingConfig c;
  c.pupil_rings = 32;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FocusingConfig{};
  c.pupil_spokes = 64;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("air layers add no aberration") {
  const auto m = stack_aberration(single(builtin::air(), 3.0), config(0.9, 442));
  for (std::size_t i = 0; i < m.ordinary.value.size(); ++i) {
    CHECK(m.ordinary.value[i] == 0.0);
    CHECK(m.extraordinary.value[i] == 0.0);
  }
}

TEST_CASE("isotropic slab: both modes identical, W(0) = 0") {
  const auto m = stack_aberration(single(builtin::fused_silica(), 1.0), config(0.6, 500));
  for (std::size_t i = 0; i < m.ordinary.value.size(); ++i) CHECK(m.ordinary.value[i] == m.extraordinary.value[i]);
  CHECK(opd_waves(single(builtin::fused_silica(), 1.0), config(0.6, 500), Mode::ordinary, 0.0) == 0.0);
}

TEST_CASE("sapphire edge difference") {
  const auto stack = single(builtin::sapphire(), 1.0);
  const auto cfg = config(0.4, 442);
  const double dw = opd_waves(stack, cfg, Mode::extraordinary, 1.0) - opd_waves(stack, cfg, Mode::ordinary, 1.0);
  CHECK(dw == doctest::Approx(-0.98208677427182795).epsilon(1e-9));
  for (double v : aberration_difference(stack, cfg).value) CHECK(v < 0.0);
  for (double v : aberration_difference(single(builtin::quartz(), 1.0), cfg).value) CHECK(v > 0.0);
}

TEST_CASE("isotropic stacks have no difference") {
  const LayerStack s({Layer{builtin::fused_silica(), 1.2}, Layer{builtin::air(), 0.5},
                      Layer{UniaxialMaterial{"glass", 1.9, 1.9, std::nullopt, {}}, 2.0}});
  CHECK(max_abs(aberration_difference(s, config(0.85, 405))) <= 1e-12);
  CHECK(best_focus_residual(s, config(0.85, 405)) == 0.0);
}

TEST_CASE("difference is linear in thickness") {
  const auto cfg = config(0.6, 650);
  const auto a = aberration_difference(single(builtin::sapphire(), 0.7), cfg);
  const auto b = aberration_difference(single(builtin::sapphire(), 1.4), cfg);
  for (std::size_t i = 0; i < a.value.size(); ++i) CHECK(b.value[i] == doctest::Approx(2.0 * a.value[i]).epsilon(1e-15));
}

TEST_CASE("CD design cuts the peak difference by at least 50x") {
  const auto cfg = config(0.45, 442);
  const double bare = max_abs(aberration_difference(single(builtin::sapphire(), 0.714), cfg));
  const double comp = max_abs(aberration_difference(cd_stack(), cfg));
  CHECK(bare / comp >= 50.0);
}

TEST_CASE("leading-order defocus of the difference") {
  for (double na : {0.05, 0.1, 0.2}) {
    const auto cfg = config(na, 442);
    const auto m = builtin::sapphire();
    const auto s = zernike_decompose(aberration_difference(single(m, 1.0), cfg), 4);
    const double predicted = 1.0 * delta_n(m) / (m.n_o * m.n_o) * na * na / (2.0 * std::sqrt(3.0)) * 1e6 / 442.0;
    CHECK(s.coefficient({2, 0}) == doctest::Approx(predicted).epsilon(0.01));
  }
}

TEST_CASE("grid convergence") {
  FocusingConfig a = config(0.6, 650);
  FocusingConfig b = a;
  b.pupil_rings = 128;
  for (const auto& stack : {single(builtin::sapphire(), 1.0), cd_stack()}) {
    CHECK(std::abs(best_focus_residual(stack, a) - best_focus_residual(stack, b)) < 1e-4);
    const auto ma = stack_aberration(stack, a);
    const auto mb = stack_aberration(stack, b);
    CHECK(std::abs(rms_wavefront(ma.ordinary, {true, true}) - rms_wavefront(mb.ordinary, {true, true})) < 1e-4);
  }
}

TEST_CASE("best-focus residual") {
  // High-precision oracle for 0.714 mm sapphire at NA 0.45, 780 nm.
  CHECK(best_focus_residual(single(builtin::sapphire(), 0.714), config(0.45, 780)) ==
        doctest::Approx(0.14619666165325933).epsilon(1e-9));
  const auto cfg = config(0.4, 442);
  const auto bare = single(builtin::sapphire(), 1.0);
  CHECK(best_focus_residual(bare, cfg) > 0.0);
  CHECK(best_focus_residual(cd_stack(), cfg) * 10.0 < best_focus_residual(single(builtin::sapphire(), 0.714), cfg));
  // Differential defocus dominates, then primary spherical, then the rest.
  const auto s = zernike_decompose(aberration_difference(bare, cfg), 12);
  const double def = std::abs(s.coefficient({2, 0}));
  const double sph = std::abs(s.coefficient({4, 0}));
  CHECK(def > 10.0 * sph);
  CHECK(sph > 10.0 * std::abs(s.coefficient({6, 0})));
  CHECK(best_focus_residual(bare, cfg) == doctest::Approx(std::sqrt(s.variance())).epsilon(1e-9));
}

TEST_CASE("polarization-weighted pupil map") {
  const auto cfg = config(0.4, 442);
  const auto map = stack_aberration(single(builtin::sapphire(), 1.0), cfg);
  const auto lin = synthesize_pupil_map(map, Polarization::linear_x, 128);
  for (int i = 0; i < lin.grid.rings(); ++i) {
    CHECK(lin.at(i, 0) == doctest::Approx(map.extraordinary.value[static_cast<std::size_t>(i)]));
    CHECK(lin.at(i, 32) == doctest::Approx(map.ordinary.value[static_cast<std::size_t>(i)]));
  }
  // Linear input turns the differential defocus into astigmatism; circular does not.
  const auto zl = zernike_decompose(lin, 4);
  // W = (W_o + W_e)/2 + cos 2φ ΔW/2, so c(2,2) = (√6/4) <ΔW ρ²>.
  const auto dw = map.difference();
  double moment = 0.0;
  for (std::size_t i = 0; i < dw.value.size(); ++i) moment += dw.weight[i] * dw.value[i] * dw.rho[i] * dw.rho[i];
  CHECK(zl.coefficient({2, 2}) == doctest::Approx(std::sqrt(6.0) / 4.0 * moment).epsilon(1e-9));
  const auto zc = zernike_decompose(synthesize_pupil_map(map, Polarization::circular, 128), 4);
  CHECK(std::abs(zc.coefficient({2, 2})) < 1e-12);
}

TEST_CASE("evanescent direction names the layer") {
  const LayerStack s({Layer{builtin::sapphire(), 1.0}, Layer{builtin::air(), 1.0}});
  try {
    stack_opd_mm(s, 1.2, Mode::ordinary);
    FAIL("expected an error");
  } catch (const EvanescentError& e) {
    CHECK(std::string(e.what()).find("layer 2") != std::string::npos);
  }
}

}
