#include "uniax/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace uniax {

using detail::format_double;

namespace {

LayerRole parse_role(std::string_view s, int line) {
  if (s == "generic") return LayerRole::generic;
  if (s == "substrate") return LayerRole::substrate;
  if (s == "compensator") return LayerRole::compensator;
  throw ParseError("unknown layer role '" + std::string(s) + "' (generic, substrate, compensator)", line);
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

}  // namespace

LayerStack parse_stack(std::string_view text, const Catalog& catalog) {
  std::vector<Layer> layers;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int no = static_cast<int>(i) + 1;
    const std::string_view line = detail::trim(detail::strip_comment(lines[i]));
    if (line.empty()) continue;
    constexpr std::string_view kKey = "layer:";
    if (line.substr(0, kKey.size()) != kKey) {
      throw ParseError("expected 'layer: <material> <thickness_mm> [role]', got '" + std::string(line) + "'", no);
    }
    const auto w = words(line.substr(kKey.size()));
    if (w.empty()) throw ParseError("missing material name", no);
    if (w.size() < 2) throw ParseError("missing thickness for '" + std::string(w[0]) + "'", no);
    if (w.size() > 3) throw ParseError("too many fields", no);
    const UniaxialMaterial* m = catalog.find(w[0]);
    if (m == nullptr) throw ParseError("unknown material '" + std::string(w[0]) + "'", no);
    const auto h = detail::parse_double(w[1]);
    if (!h) throw ParseError("bad thickness '" + std::string(w[1]) + "'", no);
    if (!(*h > 0.0) || *h > LayerStack::kMaxLayerThicknessMm) {
      throw ParseError("thickness " + std::string(w[1]) + " mm outside (0, 10]", no);
    }
    layers.push_back({*m, *h, w.size() == 3 ? parse_role(w[2], no) : LayerRole::generic});
  }
  return LayerStack(std::move(layers));
}

LayerStack load_stack_file(const std::filesystem::path& path, const Catalog& catalog) {
  try {
    return parse_stack(detail::read_file(path), catalog);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string serialize_stack(const LayerStack& stack) {
  std::string out;
  for (const Layer& l : stack.layers()) {
    out += "layer: " + l.material.name + " " + format_double(l.thickness_mm) + " " +
           std::string(to_string(l.role)) + "\n";
  }
  return out;
}

std::string wavefront_csv(const WavefrontMap& map) {
  std::string out = "rho,W_o,W_e,dW\n";
  for (std::size_t i = 0; i < map.ordinary.rho.size(); ++i) {
    const double wo = map.ordinary.value[i];
    const double we = map.extraordinary.value[i];
    out += format_double(map.ordinary.rho[i]) + "," + format_double(wo) + "," + format_double(we) + "," +
           format_double(we - wo) + "\n";
  }
  return out;
}

std::string zernike_csv(const ZernikeSpectrum& spectrum) {
  std::string out = "index,n,m,coefficient\n";
  for (std::size_t j = 0; j < spectrum.coefficients.size(); ++j) {
    const ZernikeMode z = osa_mode(static_cast<int>(j));
    out += std::to_string(j) + "," + std::to_string(z.n) + "," + std::to_string(z.m) + "," +
           format_double(spectrum.coefficients[j]) + "\n";
  }
  return out;
}

std::string zernike_index_csv(int max_order) {
  std::string out = "index,n,m\n";
  for (int j = 0; j < mode_count(max_order); ++j) {
    const ZernikeMode z = osa_mode(j);
    out += std::to_string(j) + "," + std::to_string(z.n) + "," + std::to_string(z.m) + "\n";
  }
  return out;
}

std::string axial_profile_csv(const AxialProfile& p) {
  std::string out = "z_nm,total,ordinary,extraordinary\n";
  for (std::size_t i = 0; i < p.z_nm.size(); ++i) {
    out += format_double(p.z_nm[i]) + "," + format_double(p.total[i]) + "," + format_double(p.ordinary[i]) +
           "," + format_double(p.extraordinary[i]) + "\n";
  }
  return out;
}

std::string field_grid_csv(const FieldGrid& g) {
  std::string out = g.plane == FieldGrid::Plane::lateral ? "x_nm,y_nm,intensity\n" : "x_nm,z_nm,intensity\n";
  for (int r = 0; r < g.rows; ++r) {
    const std::string row = format_double(g.row_origin_nm + r * g.row_spacing_nm);
    for (int c = 0; c < g.cols; ++c) {
      out += format_double(g.col_origin_nm + c * g.col_spacing_nm) + "," + row + "," + format_double(g.at(r, c)) +
             "\n";
    }
  }
  return out;
}

std::string scan_csv(const ScanProfile& scan) {
  std::string out = "thickness_mm,residual_rms_waves\n";
  for (std::size_t i = 0; i < scan.thickness_mm.size(); ++i) {
    out += format_double(scan.thickness_mm[i]) + "," + format_double(scan.residual_rms_waves[i]) + "\n";
  }
  return out;
}

std::string encode_pgm16(const FieldGrid& g) {
  std::string out = "P5\n" + std::to_string(g.cols) + " " + std::to_string(g.rows) + "\n65535\n";
  const double peak = g.max();
  out.reserve(out.size() + g.intensity.size() * 2);
  for (double v : g.intensity) {
    const double scaled = peak > 0.0 ? std::clamp(v / peak, 0.0, 1.0) * 65535.0 : 0.0;
    const auto q = static_cast<unsigned>(std::lround(scaled));
    out.push_back(static_cast<char>((q >> 8) & 0xff));
    out.push_back(static_cast<char>(q & 0xff));
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

}  // namespace uniax
