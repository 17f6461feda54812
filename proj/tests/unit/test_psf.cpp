#include <doctest.h>

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "uniax/errors.hpp"
#include "uniax/psf.hpp"

using namespace uniax;
using cplx = std::complex<double>;

namespace {

FocusingConfig config(double na, double lambda, Polarization pol = Polarization::circular) {
  FocusingConfig c;
  c.numerical_aperture = na;
  c.wavelength_nm = lambda;
  c.input_polarization = pol;
  return c;
}

LayerStack sapphire(double h) { return LayerStack({Layer{builtin::sapphire(), h, LayerRole::substrate}}); }

// Richards-Wolf diffraction integrals for an aplanatic lens focusing into
// air, by composite Simpson over the convergence angle.
struct RichardsWolf {
  cplx i0, i1, i2;
};

RichardsWolf richards_wolf(double na, double lambda, double r, double z, int n = 4000) {
  const double k = 2.0 * std::numbers::pi / lambda;
  const double alpha = std::asin(na);
  RichardsWolf out{};
  for (int i = 0; i <= n; ++i) {
    const double t = alpha * i / n;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double c = std::cos(t);
    const double s = std::sin(t);
    const double v = k * r * s;
    const cplx ph = std::polar(w * std::sqrt(c) * s, k * z * c);
    out.i0 += ph * (1.0 + c) * std::cyl_bessel_j(0.0, v);
    out.i1 += ph * s * std::cyl_bessel_j(1.0, v);
    out.i2 += ph * (1.0 - c) * std::cyl_bessel_j(2.0, v);
  }
  return out;
}

double rw_circular(const RichardsWolf& f) { return std::norm(f.i0) + 2.0 * std::norm(f.i1) + std::norm(f.i2); }

double rw_linear_x(const RichardsWolf& f, double phi) {
  return std::norm(f.i0 + f.i2 * std::cos(2 * phi)) + std::norm(f.i2 * std::sin(2 * phi)) +
         4.0 * std::norm(f.i1) * std::cos(phi) * std::cos(phi);
}

// Scalar Airy FWHM: 2 v_half λ / (2π NA) with [2 J1(v)/v]² = 1/2 at v_half.
double airy_fwhm(double na, double lambda) {
  auto f = [](double v) { return std::pow(2.0 * std::cyl_bessel_j(1.0, v) / v, 2) - 0.5; };
  const auto r = boost::math::tools::bisect(f, 1.0, 2.5, boost::math::tools::eps_tolerance<double>(50));
  return 2.0 * 0.5 * (r.first + r.second) * lambda / (2.0 * std::numbers::pi * na);
}

}  // namespace

TEST_SUITE("psf") {

TEST_CASE("vectorial field in air matches the Richards-Wolf integrals") {
  for (double na : {0.4, 0.9}) {
    const double lambda = 500.0;
    FocusingConfig cfg = config(na, lambda);
    cfg.pupil_rings = 96;
    cfg.pupil_spokes = 256;
    const FocalField circ(LayerStack{}, cfg);
    cfg.input_polarization = Polarization::linear_x;
    const FocalField lin(LayerStack{}, cfg);
    const double ref_c = rw_circular(richards_wolf(na, lambda, 0.0, 0.0));
    const double ref_l = rw_linear_x(richards_wolf(na, lambda, 0.0, 0.0), 0.0);
    for (double r : {0.0, 150.0, 300.0, 450.0, 700.0}) {
      for (double z : {0.0, 400.0, -900.0}) {
        const auto f = richards_wolf(na, lambda, r, z);
        CHECK(circ.intensity(r, 0.0, z) == doctest::Approx(rw_circular(f) / ref_c).epsilon(1e-6).scale(1.0));
        CHECK(lin.intensity(r, 0.0, z) == doctest::Approx(rw_linear_x(f, 0.0) / ref_l).epsilon(1e-6).scale(1.0));
        CHECK(lin.intensity(0.0, r, z) ==
              doctest::Approx(rw_linear_x(f, std::numbers::pi / 2) / ref_l).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("no stack: unit peak at nominal focus") {
  const FocalField f(LayerStack{}, config(0.4, 442));
  CHECK(f.intensity(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  const BestFocus b = find_best_focus(f);
  CHECK(std::abs(b.defocus_nm) < f.defocus_for_opd_nm(442.0 / 200.0));
  CHECK(b.peak == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(strehl(LayerStack{}, config(0.4, 442)) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("spot size") {
  const FocalField f(LayerStack{}, config(0.4, 442));
  CHECK(spot_fwhm_nm(f, 0.0) == doctest::Approx(0.514 * 442 / 0.4).epsilon(0.03));
  const FocalField low(LayerStack{}, config(0.1, 442));
  CHECK(spot_fwhm_nm(low, 0.0) == doctest::Approx(airy_fwhm(0.1, 442)).epsilon(0.01));
  const auto glass = LayerStack({Layer{builtin::fused_silica(), 1.0}});
  CHECK(resolution_factor(glass, config(0.4, 442)) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("Strehl follows the Marechal approximation for small aberrations") {
  for (ZernikeMode mode : {ZernikeMode{4, 0}, ZernikeMode{2, 2}, ZernikeMode{6, 0}}) {
    for (double sigma : {1.0 / 60.0, 1.0 / 30.0}) {
      PsfOptions o;
      o.apodization = Apodization::uniform;
      o.extra_aberration_waves = [=](double rho, double phi) { return sigma * zernike(mode, rho, phi); };
      const double s = strehl(LayerStack{}, config(0.2, 500), o);
      const double marechal = 1.0 - std::pow(2.0 * std::numbers::pi * sigma, 2);
      CHECK(s == doctest::Approx(marechal).epsilon(0.01));
    }
  }
}

TEST_CASE("circular input keeps a symmetric stack's spot round") {
  const FocalField f(sapphire(1.0), config(0.4, 442));
  for (double z : {0.0, 4000.0}) {
    for (double r : {150.0, 300.0, 600.0}) {
      const double ref = f.intensity(r, 0.0, z);
      for (double psi : {0.3, 0.9, 1.7, 2.5}) {
        const double v = f.intensity(r * std::cos(psi), r * std::sin(psi), z);
        CHECK(std::abs(v - ref) <= 1e-3 * ref);
      }
    }
  }
}

TEST_CASE("grids: non-negative, consistent, thread independent") {
  const FocalField f1(sapphire(1.0), config(0.4, 442), PsfOptions{.threads = 1});
  const FocalField f3(sapphire(1.0), config(0.4, 442), PsfOptions{.threads = 3});
  const LateralRegion region{33, 29, 50.0};
  const FieldGrid a = vector_psf(f1, region, 2500.0);
  const FieldGrid b = vector_psf(f3, region, 2500.0);
  CHECK(a.intensity == b.intensity);
  CHECK(a.max() > 0.0);
  for (double v : a.intensity) CHECK(v >= 0.0);
  CHECK(a.at(3, 7) == doctest::Approx(f1.intensity(a.col_origin_nm + 7 * 50.0, a.row_origin_nm + 3 * 50.0, 2500.0))
                          .epsilon(1e-10));

  const AxialRegion ax{17, 60.0, 5, -3000.0, 3000.0};
  const FieldGrid c = vector_psf_axial(f3, ax);
  CHECK(c.intensity == vector_psf_axial(f1, ax).intensity);
  CHECK(c.at(4, 8) == doctest::Approx(f1.intensity(0.0, 0.0, 3000.0)).epsilon(1e-10));
}

TEST_CASE("undersampled regions are rejected") {
  const FocalField f(LayerStack{}, config(0.5, 400));
  CHECK_THROWS_AS(vector_psf(f, LateralRegion{9, 9, 101.0}, 0.0), ConfigError);
  CHECK_NOTHROW(vector_psf(f, LateralRegion{9, 9, 100.0}, 0.0));
  CHECK_THROWS_AS(vector_psf_axial(f, AxialRegion{9, 120.0, 9, -1, 1}), ConfigError);
}

TEST_CASE("planewise energy is conserved") {
  const FocalField f(LayerStack{}, config(0.4, 442));
  const LateralRegion region{161, 161, 442.0 / (8 * 0.4)};
  const double dof = f.depth_of_focus_estimate_nm();
  const double p0 = vector_psf(f, region, 0.0).integrated_power();
  for (double z : {-dof, 0.5 * dof, dof}) {
    CHECK(vector_psf(f, region, z).integrated_power() == doctest::Approx(p0).epsilon(0.005));
  }
}

TEST_CASE("no stack: single symmetric axial peak at zero") {
  const FocalField f(LayerStack{}, config(0.4, 442));
  const AxialProfile p = axial_profile(f, -8000, 8000, 201);
  REQUIRE(p.total_peaks_nm.size() == 1);
  CHECK(p.total_peaks_nm[0] == doctest::Approx(0.0).scale(1.0));
  for (std::size_t i = 0; i < p.total.size(); ++i) {
    CHECK(p.total[i] == doctest::Approx(p.total[p.total.size() - 1 - i]).epsilon(1e-9));
  }
  // Half-intensity width of the aplanatic axial profile in air.
  CHECK(p.unaberrated_dof_nm == doctest::Approx(f.depth_of_focus_estimate_nm()).epsilon(0.05));
}

TEST_CASE("sapphire splits the focus into two") {
  const FocalField f(sapphire(1.0), config(0.4, 442));
  const AxialProfile p = axial_profile(f, -25000, 25000, 401);
  CHECK(p.total_peaks_nm.size() == 2);
  // Negative crystal: the extraordinary mode focuses closer to the lens.
  CHECK(p.extraordinary_focus_nm < p.ordinary_focus_nm);
  CHECK(p.focus_separation_nm() == doctest::Approx(focal_split_um(1.0, builtin::sapphire()) * 1e3).epsilon(0.1));
}

TEST_CASE("focus separation is linear in thickness") {
  std::vector<double> h{0.4, 0.8, 1.2}, sep;
  for (double t : h) {
    const FocalField f(sapphire(t), config(0.4, 442));
    sep.push_back(axial_profile(f, -20000, 20000, 201).focus_separation_nm());
  }
  const double slope = (sep[2] - sep[0]) / (h[2] - h[0]);
  CHECK(sep[1] == doctest::Approx(sep[0] + slope * (h[1] - h[0])).epsilon(0.02));
  CHECK(sep[0] / h[0] == doctest::Approx(sep[2] / h[2]).epsilon(0.02));
}

TEST_CASE("compensation restores the Strehl ratio") {
  const auto cfg = config(0.45, 442);
  const LayerStack cd({Layer{builtin::quartz(), 0.486, LayerRole::compensator},
                       Layer{builtin::sapphire(), 0.714, LayerRole::substrate}});
  CHECK(strehl(cd, cfg) > 0.9);
  CHECK(strehl(sapphire(1.0), cfg) < 0.5);
  CHECK(resolution_factor(cd, cfg) <= 1.1);
}

}
