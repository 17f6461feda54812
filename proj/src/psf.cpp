#include "uniax/psf.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "parallel.hpp"
#include "uniax/errors.hpp"
#include "uniax/optim.hpp"

namespace uniax {

namespace {

using cplx = std::complex<double>;

inline cplx unit_phasor(double phase) {
  double s = 0.0;
  double c = 0.0;
  ::sincos(phase, &s, &c);
  return {c, s};
}

inline double norm3(const Field3& f) { return std::norm(f[0]) + std::norm(f[1]) + std::norm(f[2]); }

}  // namespace

Field3 ModeFields::total() const noexcept {
  return {ordinary[0] + extraordinary[0], ordinary[1] + extraordinary[1],
          ordinary[2] + extraordinary[2]};
}

FocalField::FocalField(const LayerStack& stack, const FocusingConfig& cfg, const PsfOptions& opts) {
  cfg.validate();
  wavelength_nm_ = cfg.wavelength_nm;
  na_ = cfg.numerical_aperture;
  k0_ = 2.0 * std::numbers::pi / wavelength_nm_;
  threads_ = detail::resolve_threads(opts.threads);

  const UniaxialMaterial& medium = stack.focal_medium();
  focal_index_ = medium.n_o;
  const PupilGrid grid = cfg.pupil_grid();
  const std::size_t n = static_cast<std::size_t>(grid.rings()) * grid.spokes;
  for (auto* v : {&sx_, &sy_, &kz_o_, &kz_e_, &path_o_nm_, &path_e_nm_}) v->reserve(n);
  for (auto* v : {&ox_, &oy_, &ex_, &ey_, &ez_}) v->reserve(n);

  for (int i = 0; i < grid.rings(); ++i) {
    const double rho = grid.rho[i];
    const double s = na_ * rho;
    double po = stack_opd_mm(stack, s, Mode::ordinary) * 1e6;
    double pe = stack_opd_mm(stack, s, Mode::extraordinary) * 1e6;
    if (opts.correction == ObjectiveCorrection::mean_wavefront) {
      const double mean = 0.5 * (po + pe);
      po -= mean;
      pe -= mean;
    }
    // Aplanatic lens: sqrt(cos θ) pupil amplitude over the 1/cos θ Debye
    // measure in direction-sine space.
    const double apod =
        opts.apodization == Apodization::aplanatic ? 1.0 / std::sqrt(std::sqrt(1.0 - s * s)) : 1.0;
    const double w = apod * grid.weight[static_cast<std::size_t>(i)] / grid.spokes;
    const double t_o = opts.transmission ? opts.transmission(s, Mode::ordinary) : 1.0;
    const double t_e = opts.transmission ? opts.transmission(s, Mode::extraordinary) : 1.0;
    const double kzo = kz_ordinary(medium, s);
    const double kze = kz_extraordinary(medium, s);

    // Extraordinary polarization in the focal medium: D lies in the
    // meridional plane orthogonal to k, E = ε⁻¹ D.
    const double kmag = std::sqrt(kze * kze + s * s);
    const double d_r = kze / kmag;
    const double d_z = -s / kmag;
    double e_r = d_r / (medium.n_o * medium.n_o);
    double e_z = d_z / (medium.n_e * medium.n_e);
    const double e_norm = std::hypot(e_r, e_z);
    e_r /= e_norm;
    e_z /= e_norm;

    for (int k = 0; k < grid.spokes; ++k) {
      const double phi = grid.phi(k);
      const double c = std::cos(phi);
      const double sn = std::sin(phi);
      const ModeAmplitudes a = pupil_polarization_split(phi, cfg.input_polarization);
      const double extra =
          opts.extra_aberration_waves ? opts.extra_aberration_waves(rho, phi) * wavelength_nm_ : 0.0;

      sx_.push_back(s * c);
      sy_.push_back(s * sn);
      // The common n_o·z term is dropped; it is a global phase.
      kz_o_.push_back(kzo - medium.n_o);
      kz_e_.push_back(kze - medium.n_o);
      path_o_nm_.push_back(po + extra);
      path_e_nm_.push_back(pe + extra);

      const cplx ao = a.ordinary * (w * t_o);
      const cplx ae = a.extraordinary * (w * t_e);
      ox_.push_back(-sn * ao);
      oy_.push_back(c * ao);
      ex_.push_back(e_r * c * ae);
      ey_.push_back(e_r * sn * ae);
      ez_.push_back(e_z * ae);
    }
  }

  Field3 ref{};
  for (std::size_t j = 0; j < sx_.size(); ++j) {
    ref[0] += ox_[j] + ex_[j];
    ref[1] += oy_[j] + ey_[j];
    ref[2] += ez_[j];
  }
  norm_ = norm3(ref);
  if (!(norm_ > 0.0) || !std::isfinite(norm_)) throw NumericalError("focal field has zero reference peak");
}

FocalField FocalField::unaberrated() const {
  FocalField f = *this;
  std::fill(f.path_o_nm_.begin(), f.path_o_nm_.end(), 0.0);
  std::fill(f.path_e_nm_.begin(), f.path_e_nm_.end(), 0.0);
  return f;
}

ModeFields FocalField::field(double x_nm, double y_nm, double z_nm) const {
  ModeFields out;
  for (std::size_t j = 0; j < sx_.size(); ++j) {
    const double lateral = x_nm * sx_[j] + y_nm * sy_[j];
    const cplx po = unit_phasor(k0_ * (path_o_nm_[j] + z_nm * kz_o_[j] + lateral));
    const cplx pe = unit_phasor(k0_ * (path_e_nm_[j] + z_nm * kz_e_[j] + lateral));
    out.ordinary[0] += ox_[j] * po;
    out.ordinary[1] += oy_[j] * po;
    out.extraordinary[0] += ex_[j] * pe;
    out.extraordinary[1] += ey_[j] * pe;
    out.extraordinary[2] += ez_[j] * pe;
  }
  return out;
}

double FocalField::intensity(double x_nm, double y_nm, double z_nm) const {
  return norm3(field(x_nm, y_nm, z_nm).total()) / norm_;
}

AxialSample FocalField::axial(double z_nm) const {
  const ModeFields f = field(0.0, 0.0, z_nm);
  return {norm3(f.total()) / norm_, norm3(f.ordinary) / norm_, norm3(f.extraordinary) / norm_};
}

double FocalField::depth_of_focus_estimate_nm() const noexcept { return defocus_for_opd_nm(0.886 * wavelength_nm_); }

double FocalField::defocus_for_opd_nm(double opd_nm) const noexcept {
  const double n = focal_index_;
  return opd_nm / (n - std::sqrt(n * n - na_ * na_));
}

std::vector<double> FocalField::lateral_plane(double z_nm, std::span<const double> xs,
                                              std::span<const double> ys) const {
  const std::size_t nj = sx_.size();
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();

  // Pupil spectrum at depth z, both modes folded into one vector per sample.
  std::vector<double> cr[3], ci[3];
  for (int c = 0; c < 3; ++c) {
    cr[c].resize(nj);
    ci[c].resize(nj);
  }
  for (std::size_t j = 0; j < nj; ++j) {
    const cplx po = unit_phasor(k0_ * (path_o_nm_[j] + z_nm * kz_o_[j]));
    const cplx pe = unit_phasor(k0_ * (path_e_nm_[j] + z_nm * kz_e_[j]));
    const cplx v[3] = {ox_[j] * po + ex_[j] * pe, oy_[j] * po + ey_[j] * pe, ez_[j] * pe};
    for (int c = 0; c < 3; ++c) {
      cr[c][j] = v[c].real();
      ci[c][j] = v[c].imag();
    }
  }

  // E(x, y) = Σ_j C_j e^{i k sx_j x} e^{i k sy_j y}. The y factors are
  // tabulated per block of samples; every output accumulates the blocks in
  // the same order whatever the thread count.
  std::vector<double> acc(nx * ny * 6, 0.0);
  const std::size_t block = std::max<std::size_t>(256, (std::size_t{8} << 20) / (16 * std::max<std::size_t>(ny, 1)));
  std::vector<double> yr, yi;
  for (std::size_t j0 = 0; j0 < nj; j0 += block) {
    const std::size_t nb = std::min(block, nj - j0);
    yr.assign(ny * nb, 0.0);
    yi.assign(ny * nb, 0.0);
    detail::parallel_for(ny, threads_, [&](std::size_t iy) {
      for (std::size_t b = 0; b < nb; ++b) {
        const cplx p = unit_phasor(k0_ * sy_[j0 + b] * ys[iy]);
        yr[iy * nb + b] = p.real();
        yi[iy * nb + b] = p.imag();
      }
    });
    detail::parallel_for(nx, threads_, [&](std::size_t ix) {
      std::vector<double> dr[3], di[3];
      for (int c = 0; c < 3; ++c) {
        dr[c].resize(nb);
        di[c].resize(nb);
      }
      for (std::size_t b = 0; b < nb; ++b) {
        const cplx p = unit_phasor(k0_ * sx_[j0 + b] * xs[ix]);
        for (int c = 0; c < 3; ++c) {
          const double r = cr[c][j0 + b];
          const double i = ci[c][j0 + b];
          dr[c][b] = r * p.real() - i * p.imag();
          di[c][b] = r * p.imag() + i * p.real();
        }
      }
      for (std::size_t iy = 0; iy < ny; ++iy) {
        const double* yrow_r = &yr[iy * nb];
        const double* yrow_i = &yi[iy * nb];
        double* out = &acc[(iy * nx + ix) * 6];
        for (int c = 0; c < 3; ++c) {
          double re = 0.0;
          double im = 0.0;
          const double* a = dr[c].data();
          const double* bb = di[c].data();
          for (std::size_t b = 0; b < nb; ++b) {
            re += a[b] * yrow_r[b] - bb[b] * yrow_i[b];
            im += a[b] * yrow_i[b] + bb[b] * yrow_r[b];
          }
          out[2 * c] += re;
          out[2 * c + 1] += im;
        }
      }
    });
  }

  std::vector<double> intensity(nx * ny);
  for (std::size_t p = 0; p < nx * ny; ++p) {
    const double* e = &acc[p * 6];
    intensity[p] = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2] + e[3] * e[3] + e[4] * e[4] + e[5] * e[5]) / norm_;
  }
  return intensity;
}

BestFocus find_best_focus(const FocalField& field) {
  const double range = 3.0 * field.depth_of_focus_estimate_nm();
  constexpr int kCoarse = 121;
  const double step = 2.0 * range / (kCoarse - 1);
  int best = 0;
  double best_value = -1.0;
  for (int i = 0; i < kCoarse; ++i) {
    const double v = field.axial(-range + i * step).total;
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double z = -range + best * step;
  const double tol = field.defocus_for_opd_nm(field.wavelength_nm() / 200.0);
  const auto r = golden_section_maximize([&](double zz) { return field.axial(zz).total; }, z - step,
                                         z + step, tol);
  if (!std::isfinite(r.value)) throw NumericalError("best-focus search produced a non-finite intensity");
  if (r.value < best_value) return {z, best_value};
  return {r.x, r.value};
}

double spot_fwhm_nm(const FocalField& field, double z_nm, int azimuths) {
  const double dr = field.wavelength_nm() / (40.0 * field.numerical_aperture());
  const double r_max = 15.0 * field.wavelength_nm() / field.numerical_aperture();
  auto averaged = [&](double r) {
    if (r == 0.0) return field.intensity(0.0, 0.0, z_nm);
    double acc = 0.0;
    for (int a = 0; a < azimuths; ++a) {
      const double psi = std::numbers::pi * a / azimuths;
      acc += field.intensity(r * std::cos(psi), r * std::sin(psi), z_nm);
    }
    return acc / azimuths;
  };

  double peak = averaged(0.0);
  double prev_r = 0.0;
  double prev_v = peak;
  for (double r = dr; r <= r_max; r += dr) {
    const double v = averaged(r);
    if (v > peak) {
      peak = v;
    } else if (v < 0.5 * peak && prev_v >= 0.5 * peak) {
      const double half = 0.5 * peak;
      const double r_half = prev_r + (prev_v - half) / (prev_v - v) * (r - prev_r);
      return 2.0 * r_half;
    }
    prev_r = r;
    prev_v = v;
  }
  throw NumericalError("spot profile never falls to half maximum within 15 λ/NA");
}

double FieldGrid::max() const noexcept {
  return intensity.empty() ? 0.0 : *std::max_element(intensity.begin(), intensity.end());
}

double FieldGrid::integrated_power() const noexcept {
  double acc = 0.0;
  for (double v : intensity) acc += v;
  return acc * col_spacing_nm * row_spacing_nm;
}

namespace {

void check_spacing(double spacing_nm, const FocalField& f, const char* what) {
  const double limit = f.wavelength_nm() / (8.0 * f.numerical_aperture());
  if (!(spacing_nm > 0.0) || spacing_nm > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << what << " spacing " << spacing_nm << " nm must lie in (0, λ/(8 NA) = " << limit << " nm]";
    throw ConfigError(os.str());
  }
}

std::vector<double> centred_axis(int n, double spacing) {
  std::vector<double> v(static_cast<std::size_t>(n));
  const double origin = -0.5 * (n - 1) * spacing;
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = origin + i * spacing;
  return v;
}

}  // namespace

FieldGrid vector_psf(const FocalField& field, const LateralRegion& region, double defocus_nm) {
  check_spacing(region.spacing_nm, field, "lateral");
  if (region.nx < 1 || region.ny < 1) throw ConfigError("lateral region needs at least one sample per axis");
  const auto xs = centred_axis(region.nx, region.spacing_nm);
  const auto ys = centred_axis(region.ny, region.spacing_nm);
  FieldGrid g;
  g.plane = FieldGrid::Plane::lateral;
  g.cols = region.nx;
  g.rows = region.ny;
  g.col_origin_nm = xs.front();
  g.row_origin_nm = ys.front();
  g.col_spacing_nm = region.spacing_nm;
  g.row_spacing_nm = region.spacing_nm;
  g.defocus_nm = defocus_nm;
  g.intensity = field.lateral_plane(defocus_nm, xs, ys);
  return g;
}

FieldGrid vector_psf(const LayerStack& stack, const FocusingConfig& cfg, const LateralRegion& region,
                     double defocus_um, const PsfOptions& opts) {
  return vector_psf(FocalField(stack, cfg, opts), region, defocus_um * 1e3);
}

FieldGrid vector_psf_axial(const FocalField& field, const AxialRegion& region) {
  check_spacing(region.x_spacing_nm, field, "axial-plane x");
  if (region.nx < 1 || region.nz < 2 || !(region.z_max_nm > region.z_min_nm)) {
    throw ConfigError("axial region needs nx >= 1, nz >= 2 and z_max > z_min");
  }
  const auto xs = centred_axis(region.nx, region.x_spacing_nm);
  const double dz = (region.z_max_nm - region.z_min_nm) / (region.nz - 1);
  const std::vector<double> y0{0.0};
  FieldGrid g;
  g.plane = FieldGrid::Plane::axial;
  g.cols = region.nx;
  g.rows = region.nz;
  g.col_origin_nm = xs.front();
  g.col_spacing_nm = region.x_spacing_nm;
  g.row_origin_nm = region.z_min_nm;
  g.row_spacing_nm = dz;
  g.intensity.reserve(static_cast<std::size_t>(region.nx) * region.nz);
  for (int iz = 0; iz < region.nz; ++iz) {
    const auto row = field.lateral_plane(region.z_min_nm + iz * dz, xs, y0);
    g.intensity.insert(g.intensity.end(), row.begin(), row.end());
  }
  return g;
}

double strehl(const LayerStack& stack, const FocusingConfig& cfg, const PsfOptions& opts) {
  return find_best_focus(FocalField(stack, cfg, opts)).peak;
}

double resolution_factor(const LayerStack& stack, const FocusingConfig& cfg, const PsfOptions& opts) {
  const FocalField field(stack, cfg, opts);
  const BestFocus focus = find_best_focus(field);
  return spot_fwhm_nm(field, focus.defocus_nm) / spot_fwhm_nm(field.unaberrated(), 0.0);
}

double AxialProfile::focus_separation_nm() const noexcept {
  return std::abs(extraordinary_focus_nm - ordinary_focus_nm);
}

namespace {

double refine_channel_peak(const FocalField& field, const std::vector<double>& z,
                           const std::vector<double>& v, double AxialSample::*channel) {
  const auto it = std::max_element(v.begin(), v.end());
  const std::size_t i = static_cast<std::size_t>(it - v.begin());
  const double lo = z[i == 0 ? 0 : i - 1];
  const double hi = z[std::min(i + 1, z.size() - 1)];
  const double tol = field.defocus_for_opd_nm(field.wavelength_nm() / 200.0);
  const auto r = golden_section_maximize([&](double zz) { return field.axial(zz).*channel; }, lo, hi, tol);
  return r.value >= *it ? r.x : z[i];
}

double half_width_crossing(const FocalField& ref, double direction) {
  const double step = 0.05 * ref.depth_of_focus_estimate_nm();
  auto f = [&](double d) { return ref.axial(direction * d).total - 0.5; };
  double inside = 0.0;
  double d = step;
  for (int i = 0; i < 400 && f(d) > 0.0; ++i) {
    inside = d;
    d += step;
  }
  if (f(d) > 0.0) throw NumericalError("aberration-free axial profile never reaches half maximum");
  const double tol_nm = 1e-3;
  const auto r = boost::math::tools::bisect(f, inside, d, [&](double a, double b) { return std::abs(b - a) <= tol_nm; });
  return direction * 0.5 * (r.first + r.second);
}

}  // namespace

AxialProfile axial_profile(const FocalField& field, double z_min_nm, double z_max_nm, int samples) {
  if (samples < 3 || !(z_max_nm > z_min_nm)) throw ConfigError("axial profile needs >= 3 samples and z_max > z_min");
  AxialProfile p;
  const double dz = (z_max_nm - z_min_nm) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const double z = z_min_nm + i * dz;
    const AxialSample s = field.axial(z);
    p.z_nm.push_back(z);
    p.total.push_back(s.total);
    p.ordinary.push_back(s.ordinary);
    p.extraordinary.push_back(s.extraordinary);
  }
  const double top = *std::max_element(p.total.begin(), p.total.end());
  for (std::size_t i = 1; i + 1 < p.total.size(); ++i) {
    if (p.total[i] > p.total[i - 1] && p.total[i] >= p.total[i + 1] && p.total[i] > 0.25 * top) {
      p.total_peaks_nm.push_back(p.z_nm[i]);
    }
  }
  p.ordinary_focus_nm = refine_channel_peak(field, p.z_nm, p.ordinary, &AxialSample::ordinary);
  p.extraordinary_focus_nm = refine_channel_peak(field, p.z_nm, p.extraordinary, &AxialSample::extraordinary);

  const FocalField ref = field.unaberrated();
  p.unaberrated_dof_nm = half_width_crossing(ref, 1.0) - half_width_crossing(ref, -1.0);
  return p;
}

AxialProfile axial_profile(const LayerStack& stack, const FocusingConfig& cfg, double z_min_um,
                           double z_max_um, int samples, const PsfOptions& opts) {
  return axial_profile(FocalField(stack, cfg, opts), z_min_um * 1e3, z_max_um * 1e3, samples);
}

}  // namespace uniax
