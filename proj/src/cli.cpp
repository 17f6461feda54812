#include "uniax/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "text_util.hpp"
#include "uniax/compensator.hpp"
#include "uniax/io.hpp"
#include "uniax/psf.hpp"

#ifndef UNIAX_VERSION
#define UNIAX_VERSION "0.0.0"
#endif

namespace uniax {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Renders a summary record as "key: value" lines. Arrays print inline.
std::string human_summary(const json& record) {
  std::ostringstream os;
  for (const auto& [key, value] : record.items()) {
    os << key << ": ";
    if (value.is_string()) {
      os << value.get<std::string>();
    } else if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) os << ", ";
        os << (value[i].is_string() ? value[i].get<std::string>() : value[i].dump());
      }
    } else {
      os << value.dump();
    }
    os << "\n";
  }
  return os.str();
}

struct CommonOptions {
  std::string catalog_path;
  std::string out_dir;
  std::string format = "human";
  unsigned threads = 0;
};

struct FocusOptions {
  double na = 0.4;
  double wavelength_nm = 442.0;
  std::string pol = "circular";
  int rings = 64;
  int spokes = 128;

  FocusingConfig config() const {
    FocusingConfig c;
    c.numerical_aperture = na;
    c.wavelength_nm = wavelength_nm;
    c.input_polarization = parse_polarization(pol);
    c.pupil_rings = rings;
    c.pupil_spokes = spokes;
    c.validate();
    return c;
  }
};

void add_common(CLI::App* app, CommonOptions& o, bool threads) {
  app->add_option("--catalog", o.catalog_path, "Material catalog file (adds to or overrides the built-ins)");
  app->add_option("--out-dir", o.out_dir, "Directory for data files, summary and manifest");
  app->add_option("--format", o.format, "Console output: human or machine")
      ->check(CLI::IsMember({"human", "machine"}));
  if (threads) app->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

void add_focus(CLI::App* app, FocusOptions& o) {
  app->add_option("--na", o.na, "Numerical aperture in air");
  app->add_option("--wavelength-nm", o.wavelength_nm, "Vacuum wavelength in nm");
  app->add_option("--pol", o.pol, "Input polarization: linear-x, linear-y, circular");
  app->add_option("--pupil-rings", o.rings, "Radial pupil samples (>= 64)");
  app->add_option("--pupil-spokes", o.spokes, "Azimuthal pupil samples (>= 128)");
}

json focus_json(const FocusingConfig& c) {
  return json{{"numerical_aperture", c.numerical_aperture},
              {"wavelength_nm", c.wavelength_nm},
              {"polarization", std::string(to_string(c.input_polarization))},
              {"pupil_rings", c.pupil_rings},
              {"pupil_spokes", c.pupil_spokes}};
}

json stack_json(const LayerStack& stack) {
  json layers = json::array();
  for (const Layer& l : stack.layers()) {
    layers.push_back(json{{"material", l.material.name},
                          {"n_o", l.material.n_o},
                          {"n_e", l.material.n_e},
                          {"thickness_mm", l.thickness_mm},
                          {"role", std::string(to_string(l.role))}});
  }
  return layers;
}

std::vector<std::string> stack_lines(const LayerStack& stack) {
  std::vector<std::string> out;
  for (const Layer& l : stack.layers()) {
    out.push_back(l.material.name + " " + detail::format_double(l.thickness_mm) + " mm");
  }
  if (out.empty()) out.push_back("(empty)");
  return out;
}

/// Collects output files, then writes them with the summary and manifest.
class Run {
 public:
  Run(std::string subcommand, const CommonOptions& common, int argc, const char* const* argv)
      : subcommand_(std::move(subcommand)), common_(common) {
    for (int i = 0; i < argc; ++i) argv_.emplace_back(argv[i]);
  }

  Catalog catalog() {
    if (common_.catalog_path.empty()) return Catalog::builtins();
    add_input(common_.catalog_path);
    return load_catalog_file(common_.catalog_path);
  }

  LayerStack stack(const std::string& path, const Catalog& catalog) {
    add_input(path);
    return load_stack_file(path, catalog);
  }

  void add_output(std::string name, std::string bytes) { outputs_.emplace_back(std::move(name), std::move(bytes)); }

  int finish(json summary, json parameters, std::ostream& out) {
    const std::string text = human_summary(summary);
    const std::string machine = summary.dump(2) + "\n";
    out << (common_.format == "machine" ? machine : text);
    if (common_.out_dir.empty()) return kExitOk;

    std::error_code ec;
    fs::create_directories(common_.out_dir, ec);
    if (ec) throw ConfigError("cannot create '" + common_.out_dir + "': " + ec.message());
    add_output("summary.txt", text);
    add_output("summary.json", machine);

    json files = json::array();
    for (const auto& [name, bytes] : outputs_) {
      write_file(fs::path(common_.out_dir) / name, bytes);
      files.push_back(json{{"file", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
    }
    json manifest{{"tool", "uniax"},
                  {"version", UNIAX_VERSION},
                  {"subcommand", subcommand_},
                  {"timestamp", utc_timestamp()},
                  {"arguments", argv_},
                  {"parameters", std::move(parameters)},
                  {"inputs", inputs_},
                  {"outputs", files}};
    write_file(fs::path(common_.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    return kExitOk;
  }

 private:
  void add_input(const std::string& path) {
    const std::string bytes = detail::read_file(path);
    inputs_.push_back(json{{"path", path}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
  }

  std::string subcommand_;
  CommonOptions common_;
  std::vector<std::string> argv_;
  json inputs_ = json::array();
  std::vector<std::pair<std::string, std::string>> outputs_;
};

// ---------------------------------------------------------------- materials

int cmd_materials(Run& run, const CommonOptions& common, std::ostream& out) {
  const Catalog catalog = run.catalog();
  json list = json::array();
  for (const UniaxialMaterial& m : catalog.entries()) {
    json e{{"name", m.name},
           {"n_o", m.n_o},
           {"n_e", m.n_e},
           {"sign", std::string(to_string(optical_sign(m)))},
           {"delta_n", delta_n(m)}};
    e["ref_wavelength_nm"] = m.ref_wavelength_nm ? json(*m.ref_wavelength_nm) : json(nullptr);
    list.push_back(std::move(e));
  }

  std::ostringstream csv;
  csv << "name,n_o,n_e,sign,delta_n,ref_wavelength_nm\n";
  for (const UniaxialMaterial& m : catalog.entries()) {
    csv << m.name << "," << detail::format_double(m.n_o) << "," << detail::format_double(m.n_e) << ","
        << to_string(optical_sign(m)) << "," << detail::format_double(delta_n(m)) << ","
        << (m.ref_wavelength_nm ? detail::format_double(*m.ref_wavelength_nm) : "") << "\n";
  }

  if (common.format == "machine") {
    out << csv.str();
  } else {
    out << std::left << std::setw(16) << "name" << std::setw(10) << "n_o" << std::setw(10) << "n_e"
        << std::setw(11) << "sign" << "delta_n\n";
    for (const UniaxialMaterial& m : catalog.entries()) {
      out << std::left << std::setw(16) << m.name << std::setw(10) << detail::format_double(m.n_o)
          << std::setw(10) << detail::format_double(m.n_e) << std::setw(11) << to_string(optical_sign(m))
          << std::setprecision(6) << delta_n(m) << "\n";
    }
  }
  if (common.out_dir.empty()) return kExitOk;

  // Listing already printed; the files repeat it.
  run.add_output("materials.csv", csv.str());
  std::ostringstream sink;
  return run.finish(json{{"materials", list.size()}}, json{{"catalog", common.catalog_path}}, sink);
}

// --------------------------------------------------------------- aberration

struct AberrationOptions {
  std::string stack_path;
  int zernike_order = kMaxZernikeOrder;
};

int cmd_aberration(Run& run, const AberrationOptions& a, const FocusOptions& f, std::ostream& out) {
  const FocusingConfig cfg = f.config();
  const Catalog catalog = run.catalog();
  const LayerStack stack = run.stack(a.stack_path, catalog);

  const WavefrontMap map = stack_aberration(stack, cfg);
  const RadialProfile dw = map.difference();
  const ZernikeSpectrum spectrum = zernike_decompose(dw, a.zernike_order);
  const PupilMap weighted = synthesize_pupil_map(map, cfg.input_polarization, cfg.pupil_spokes);
  const ZernikeSpectrum weighted_spectrum = zernike_decompose(weighted, std::min(a.zernike_order, 8));

  double split_um = 0.0;
  double split_air_um = 0.0;
  for (const Layer& l : stack.layers()) {
    if (l.material.is_isotropic()) continue;
    const double sign = delta_n(l.material) < 0.0 ? -1.0 : 1.0;
    split_um += sign * focal_split_um(l.thickness_mm, l.material);
    split_air_um += sign * focal_split_air_um(l.thickness_mm, l.material);
  }

  const double edge = opd_waves(stack, cfg, Mode::extraordinary, 1.0) - opd_waves(stack, cfg, Mode::ordinary, 1.0);
  json summary{{"command", "aberration"},
               {"stack", stack_lines(stack)},
               {"numerical_aperture", cfg.numerical_aperture},
               {"wavelength_nm", cfg.wavelength_nm},
               {"polarization", std::string(to_string(cfg.input_polarization))},
               {"focal_split_um", std::abs(split_um)},
               {"focal_split_air_equivalent_um", std::abs(split_air_um)},
               {"dW_edge_waves", edge},
               {"rms_W_o_waves", rms_wavefront(map.ordinary, {true, false})},
               {"rms_W_e_waves", rms_wavefront(map.extraordinary, {true, false})},
               {"best_focus_residual_waves", best_focus_residual(stack, cfg)},
               {"rms_dW_defocus_removed_waves", rms_wavefront(dw, {true, true})},
               {"zernike_order", a.zernike_order},
               {"dW_defocus_Z4_waves", spectrum.coefficient({2, 0})},
               {"dW_spherical_Z12_waves", spectrum.coefficients.size() > 12 ? spectrum.coefficient({4, 0}) : 0.0},
               {"zernike_reconstruction_rms_waves", spectrum.reconstruction_rms},
               {"weighted_map_rms_defocus_removed_waves", rms_wavefront(weighted, {true, true})},
               {"weighted_map_astigmatism_Z5_waves", weighted_spectrum.coefficient({2, 2})}};

  run.add_output("wavefront.csv", wavefront_csv(map));
  run.add_output("zernike.csv", zernike_csv(spectrum));
  run.add_output("zernike_weighted.csv", zernike_csv(weighted_spectrum));
  return run.finish(std::move(summary),
                    json{{"stack", a.stack_path}, {"stack_layers", stack_json(stack)}, {"focusing", focus_json(cfg)},
                         {"zernike_order", a.zernike_order}},
                    out);
}

// ---------------------------------------------------------------------- psf

struct PsfCliOptions {
  std::string stack_path;
  int nx = 129;
  double spacing_nm = 0.0;
  std::optional<double> defocus_um;
  int nz = 129;
  std::optional<double> z_half_range_um;
  int profile_samples = 401;
  std::string apodization = "aplanatic";
  std::string correction = "mean";
};

int cmd_psf(Run& run, const PsfCliOptions& p, const FocusOptions& f, const CommonOptions& common,
            std::ostream& out) {
  const FocusingConfig cfg = f.config();
  const Catalog catalog = run.catalog();
  const LayerStack stack = run.stack(p.stack_path, catalog);

  PsfOptions opts;
  opts.apodization = p.apodization == "uniform" ? Apodization::uniform : Apodization::aplanatic;
  opts.correction = p.correction == "none" ? ObjectiveCorrection::none : ObjectiveCorrection::mean_wavefront;
  opts.threads = common.threads;
  const FocalField field(stack, cfg, opts);
  const FocalField ideal = field.unaberrated();

  const BestFocus focus = find_best_focus(field);
  const double fwhm = spot_fwhm_nm(field, focus.defocus_nm);
  const double ideal_fwhm = spot_fwhm_nm(ideal, 0.0);

  double split_nm = 0.0;
  for (const Layer& l : stack.layers()) {
    if (!l.material.is_isotropic()) split_nm += focal_split_um(l.thickness_mm, l.material) * 1e3;
  }
  const double half_range_nm =
      p.z_half_range_um ? *p.z_half_range_um * 1e3 : 3.0 * field.depth_of_focus_estimate_nm() + split_nm;
  const AxialProfile profile = axial_profile(field, -half_range_nm, half_range_nm, p.profile_samples);

  const double spacing = p.spacing_nm > 0.0 ? p.spacing_nm : cfg.wavelength_nm / (8.0 * cfg.numerical_aperture);
  const double plane_nm = p.defocus_um ? *p.defocus_um * 1e3 : focus.defocus_nm;
  const FieldGrid lateral = vector_psf(field, LateralRegion{p.nx, p.nx, spacing}, plane_nm);
  const FieldGrid axial = vector_psf_axial(field, AxialRegion{p.nx, spacing, p.nz, -half_range_nm, half_range_nm});

  json summary{{"command", "psf"},
               {"stack", stack_lines(stack)},
               {"focal_medium", stack.focal_medium().name},
               {"numerical_aperture", cfg.numerical_aperture},
               {"wavelength_nm", cfg.wavelength_nm},
               {"polarization", std::string(to_string(cfg.input_polarization))},
               {"apodization", p.apodization},
               {"objective_correction", p.correction},
               {"strehl", focus.peak},
               {"best_focus_nm", focus.defocus_nm},
               {"fwhm_nm", fwhm},
               {"unaberrated_fwhm_nm", ideal_fwhm},
               {"resolution_factor", fwhm / ideal_fwhm},
               {"axial_peaks_nm", profile.total_peaks_nm},
               {"axial_peak_count", profile.total_peaks_nm.size()},
               {"ordinary_focus_nm", profile.ordinary_focus_nm},
               {"extraordinary_focus_nm", profile.extraordinary_focus_nm},
               {"focus_separation_nm", profile.focus_separation_nm()},
               {"focal_split_formula_nm", split_nm},
               {"unaberrated_dof_nm", profile.unaberrated_dof_nm},
               {"separation_over_dof", profile.focus_separation_nm() / profile.unaberrated_dof_nm},
               {"lateral_plane_nm", plane_nm},
               {"lateral_spacing_nm", spacing},
               {"lateral_peak", lateral.max()},
               {"lateral_power_nm2", lateral.integrated_power()}};

  run.add_output("lateral.pgm", encode_pgm16(lateral));
  run.add_output("lateral.csv", field_grid_csv(lateral));
  run.add_output("axial.pgm", encode_pgm16(axial));
  run.add_output("axial.csv", field_grid_csv(axial));
  run.add_output("axial_profile.csv", axial_profile_csv(profile));
  return run.finish(std::move(summary),
                    json{{"stack", p.stack_path},
                         {"stack_layers", stack_json(stack)},
                         {"focusing", focus_json(cfg)},
                         {"nx", p.nx},
                         {"nz", p.nz},
                         {"spacing_nm", spacing},
                         {"z_half_range_nm", half_range_nm},
                         {"profile_samples", p.profile_samples},
                         {"threads", common.threads}},
                    out);
}

// ------------------------------------------------------------------- design

struct DesignOptions {
  std::string substrate = "sapphire";
  std::string compensator = "quartz";
  std::string mode = "closed";
  std::optional<double> total_mm;
  std::optional<double> substrate_mm;
  std::vector<double> bounds{0.1, 1.0};
};

json report_json(const ResidualReport& r) {
  return json{{"residual_rms_waves", r.residual_rms_waves},
              {"uncompensated_rms_waves", r.uncompensated_rms_waves},
              {"ratio_percent", r.ratio_percent}};
}

int cmd_design(Run& run, const DesignOptions& d, const FocusOptions& f, std::ostream& out) {
  const FocusingConfig cfg = f.config();
  const Catalog catalog = run.catalog();
  const UniaxialMaterial& sub = catalog.at(d.substrate);
  const UniaxialMaterial& comp = catalog.at(d.compensator);

  DesignResult design;
  ResidualReport report;
  std::optional<ScanProfile> scan;
  if (d.mode == "closed") {
    if (!d.total_mm) throw ConfigError("--mode closed needs --total <mm>");
    design = design_closed_form(*d.total_mm, sub, comp);
    report = residual_ratio(Layer{sub, design.substrate_mm, LayerRole::substrate}, design, cfg);
  } else {
    double h = 0.0;
    if (d.substrate_mm) {
      h = *d.substrate_mm;
    } else if (d.total_mm) {
      h = design_closed_form(*d.total_mm, sub, comp).substrate_mm;
    } else {
      throw ConfigError("--mode optimize needs --substrate-mm <mm> or --total <mm>");
    }
    if (d.bounds.size() != 2) throw ConfigError("--bounds takes two values: lower upper (mm)");
    const OptimizationResult r =
        optimize_thickness(Layer{sub, h, LayerRole::substrate}, comp, cfg, {d.bounds[0], d.bounds[1]});
    design = r.design;
    report = r.report;
    scan = r.scan;
  }

  json summary{{"command", "design"},
               {"method", std::string(to_string(design.method))},
               {"substrate", sub.name},
               {"compensator", comp.name},
               {"substrate_mm", design.substrate_mm},
               {"compensator_mm", design.compensator_mm},
               {"total_mm", design.substrate_mm + design.compensator_mm},
               {"ratio", design.ratio},
               {"design_ratio", design.design_ratio},
               {"numerical_aperture", cfg.numerical_aperture},
               {"wavelength_nm", cfg.wavelength_nm}};
  summary.update(report_json(report));

  if (scan) run.add_output("scan.csv", scan_csv(*scan));
  json params{{"substrate", sub.name},
              {"compensator", comp.name},
              {"mode", d.mode},
              {"bounds_mm", d.bounds},
              {"focusing", focus_json(cfg)}};
  params["total_mm"] = d.total_mm ? json(*d.total_mm) : json(nullptr);
  params["substrate_mm"] = d.substrate_mm ? json(*d.substrate_mm) : json(nullptr);
  return run.finish(std::move(summary), std::move(params), out);
}

// ------------------------------------------------------------ max-thickness

int cmd_max_thickness(Run& run, const std::string& material, double criterion, const FocusOptions& f,
                      std::ostream& out) {
  const FocusingConfig cfg = f.config();
  const Catalog catalog = run.catalog();
  const UniaxialMaterial& m = catalog.at(material);
  const ThicknessLimit limit = max_allowable_thickness(m, cfg, criterion);
  json summary{{"command", "max-thickness"},
               {"material", m.name},
               {"numerical_aperture", cfg.numerical_aperture},
               {"wavelength_nm", cfg.wavelength_nm},
               {"criterion_waves", criterion},
               {"status", std::string(to_string(limit.status))},
               {"max_thickness_mm", limit.thickness_mm}};
  return run.finish(std::move(summary), json{{"material", m.name}, {"criterion_waves", criterion}, {"focusing", focus_json(cfg)}},
                    out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Birefringent substrate aberration, focusing and compensator design"};
  app.set_version_flag("--version", UNIAX_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  FocusOptions focus;

  auto* materials = app.add_subcommand("materials", "List the material catalog");
  add_common(materials, common, false);

  AberrationOptions aberration;
  auto* ab = app.add_subcommand("aberration", "Ordinary/extraordinary pupil aberrations of a stack");
  ab->add_option("--stack", aberration.stack_path, "Stack file")->required();
  ab->add_option("--zernike-order", aberration.zernike_order, "Highest Zernike radial order")
      ->check(CLI::Range(0, kMaxZernikeOrder));
  add_focus(ab, focus);
  add_common(ab, common, false);

  PsfCliOptions psf;
  auto* ps = app.add_subcommand("psf", "Vectorial point spread function through a stack");
  ps->add_option("--stack", psf.stack_path, "Stack file")->required();
  ps->add_option("--nx", psf.nx, "Samples per lateral axis")->check(CLI::Range(1, 1025));
  ps->add_option("--spacing-nm", psf.spacing_nm, "Lateral sample spacing (default λ/(8 NA))");
  ps->add_option("--defocus-um", psf.defocus_um, "Lateral plane depth (default: best focus)");
  ps->add_option("--nz", psf.nz, "Axial samples of the x-z plane")->check(CLI::Range(2, 2049));
  ps->add_option("--z-range-um", psf.z_half_range_um, "Half range of the axial scan")
      ->check(CLI::PositiveNumber);
  ps->add_option("--profile-samples", psf.profile_samples, "On-axis profile samples")
      ->check(CLI::Range(3, 100001));
  ps->add_option("--apodization", psf.apodization, "aplanatic or uniform")
      ->check(CLI::IsMember({"aplanatic", "uniform"}));
  ps->add_option("--correction", psf.correction, "Objective correction: mean or none")
      ->check(CLI::IsMember({"mean", "none"}));
  add_focus(ps, focus);
  add_common(ps, common, true);

  DesignOptions design;
  auto* de = app.add_subcommand("design", "Compensator plate design");
  de->add_option("--substrate", design.substrate, "Substrate material");
  de->add_option("--compensator", design.compensator, "Compensator material");
  de->add_option("--mode", design.mode, "closed or optimize")->check(CLI::IsMember({"closed", "optimize"}));
  de->add_option("--total", design.total_mm, "Total thickness H in mm");
  de->add_option("--substrate-mm", design.substrate_mm, "Substrate thickness in mm (optimize mode)");
  de->add_option("--bounds", design.bounds, "Compensator search interval in mm: lower upper")->expected(2);
  add_focus(de, focus);
  add_common(de, common, false);

  std::string material = "sapphire";
  double criterion = kMarechalRmsWaves;
  auto* mt = app.add_subcommand("max-thickness", "Largest substrate meeting an RMS criterion");
  mt->add_option("--material", material, "Substrate material");
  mt->add_option("--criterion-waves", criterion, "RMS criterion in waves (default 1/14)");
  add_focus(mt, focus);
  add_common(mt, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  Run run(sub->get_name(), common, argc, argv);
  try {
    if (sub == materials) return cmd_materials(run, common, out);
    if (sub == ab) return cmd_aberration(run, aberration, focus, out);
    if (sub == ps) return cmd_psf(run, psf, focus, common, out);
    if (sub == de) return cmd_design(run, design, focus, out);
    return cmd_max_thickness(run, material, criterion, focus, out);
  } catch (const NoInteriorMinimumError& e) {
    err << "error: " << e.what() << "\n";
    err << "coarse scan (thickness_mm,residual_rms_waves):\n" << scan_csv(e.scan());
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace uniax
