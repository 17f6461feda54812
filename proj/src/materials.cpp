#include "uniax/materials.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "uniax/errors.hpp"
#include "text_util.hpp"

namespace uniax {

std::string_view to_string(OpticalSign sign) {
  switch (sign) {
    case OpticalSign::negative: return "negative";
    case OpticalSign::positive: return "positive";
    case OpticalSign::isotropic: return "isotropic";
  }
  return "unknown";
}

void validate(const UniaxialMaterial& m) {
  // Air sits exactly on n = 1, so the lower bound is inclusive.
  auto in_range = [](double n) { return std::isfinite(n) && n >= 1.0 && n < 3.0; };
  if (m.name.empty()) throw ConfigError("material has an empty name");
  if (!in_range(m.n_o) || !in_range(m.n_e)) {
    std::ostringstream os;
    os << "material '" << m.name << "': refractive indices out of range [1, 3): n_o=" << m.n_o
       << " n_e=" << m.n_e;
    throw ConfigError(os.str());
  }
  if (m.ref_wavelength_nm && !(*m.ref_wavelength_nm > 0.0)) {
    throw ConfigError("material '" + m.name + "': ref_wavelength_nm must be positive");
  }
}

double delta_n(const UniaxialMaterial& m) noexcept { return m.n_e - m.n_o; }

OpticalSign optical_sign(const UniaxialMaterial& m) noexcept {
  const double dn = delta_n(m);
  if (std::abs(dn) <= 1e-9) return OpticalSign::isotropic;
  return dn < 0.0 ? OpticalSign::negative : OpticalSign::positive;
}

namespace builtin {

UniaxialMaterial sapphire() {
  return {"sapphire", 1.78038, 1.77206, 442.0,
          {{"crystal", "Al2O3, crystalline"},
           {"mohs_hardness", "9"},
           {"fusing_temperature_K", "2300"},
           {"thermal_conductivity_W_per_mK", "~34"},
           {"thermal_expansion_1e-6_per_K", "5.6"}}};
}

// Indices quoted without a wavelength; used as-is at every wavelength.
UniaxialMaterial quartz() {
  return {"quartz", 1.5443, 1.5534, std::nullopt,
          {{"crystal", "SiO2, crystalline"},
           {"mohs_hardness", "7"},
           {"fusing_temperature_K", "1960"},
           {"thermal_conductivity_W_per_mK", "3"},
           {"thermal_expansion_1e-6_per_K", "0.55"}}};
}

UniaxialMaterial air() { return {"air", 1.0, 1.0, std::nullopt, {}}; }

UniaxialMaterial fused_silica() {
  return {"fused_silica", 1.4585, 1.4585, std::nullopt,
          {{"state", "amorphous"},
           {"mohs_hardness", "5.3-6.5"},
           {"thermal_conductivity_W_per_mK", "1.3"},
           {"thermal_expansion_1e-6_per_K", "0.55"}}};
}

}  // namespace builtin

Catalog Catalog::builtins() {
  Catalog c;
  c.entries_ = {builtin::sapphire(), builtin::quartz(), builtin::air(), builtin::fused_silica()};
  return c;
}

void Catalog::insert_or_replace(UniaxialMaterial m) {
  validate(m);
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const UniaxialMaterial& e) { return e.name == m.name; });
  if (it != entries_.end()) {
    *it = std::move(m);
  } else {
    entries_.push_back(std::move(m));
  }
}

const UniaxialMaterial* Catalog::find(std::string_view name) const noexcept {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const UniaxialMaterial& e) { return e.name == name; });
  return it == entries_.end() ? nullptr : &*it;
}

const UniaxialMaterial& Catalog::at(std::string_view name) const {
  if (const auto* m = find(name)) return *m;
  throw ConfigError("unknown material '" + std::string(name) + "'");
}

namespace {

struct Pending {
  UniaxialMaterial material;
  int first_line = 0;
  bool has_name = false;
  bool has_n_o = false;
  bool has_n_e = false;
};

void finish(Pending& p, std::vector<UniaxialMaterial>& out) {
  if (p.first_line == 0) return;
  const std::string label =
      p.has_name ? "entry '" + p.material.name + "'" : "unnamed entry";
  if (!p.has_name) throw ParseError(label + " has no name", p.first_line);
  if (!p.has_n_o) throw ParseError(label + " is missing n_o", p.first_line);
  if (!p.has_n_e) throw ParseError(label + " is missing n_e", p.first_line);
  try {
    validate(p.material);
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), p.first_line);
  }
  out.push_back(std::move(p.material));
  p = Pending{};
}

}  // namespace

std::vector<UniaxialMaterial> parse_materials(std::string_view text) {
  std::vector<UniaxialMaterial> out;
  Pending pending;
  int line_no = 0;
  for (std::string_view raw : detail::split_lines(text)) {
    ++line_no;
    const std::string_view line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) {
      // A blank line closes the record; a comment-only line does not.
      if (detail::trim(raw).empty()) finish(pending, out);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected key=value, got '" + std::string(line) + "'", line_no);
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (pending.first_line == 0) pending.first_line = line_no;

    auto number = [&]() {
      const auto v = detail::parse_double(value);
      if (!v) throw ParseError("key '" + key + "': not a number: '" + std::string(value) + "'", line_no);
      return *v;
    };
    if (key == "name") {
      if (value.empty()) throw ParseError("empty material name", line_no);
      pending.material.name = std::string(value);
      pending.has_name = true;
    } else if (key == "n_o") {
      pending.material.n_o = number();
      pending.has_n_o = true;
    } else if (key == "n_e") {
      pending.material.n_e = number();
      pending.has_n_e = true;
    } else if (key == "ref_wavelength_nm") {
      pending.material.ref_wavelength_nm = number();
    } else {
      pending.material.metadata[key] = std::string(value);
    }
  }
  finish(pending, out);
  return out;
}

Catalog load_catalog(std::string_view text) {
  Catalog c = Catalog::builtins();
  for (auto& m : parse_materials(text)) c.insert_or_replace(std::move(m));
  return c;
}

Catalog load_catalog_file(const std::filesystem::path& path) {
  return load_catalog(detail::read_file(path));
}

std::string serialize_materials(std::span<const UniaxialMaterial> materials) {
  std::string out;
  bool first = true;
  for (const auto& m : materials) {
    if (!first) out += '\n';
    first = false;
    out += "name=" + m.name + '\n';
    out += "n_o=" + detail::format_double(m.n_o) + '\n';
    out += "n_e=" + detail::format_double(m.n_e) + '\n';
    if (m.ref_wavelength_nm) {
      out += "ref_wavelength_nm=" + detail::format_double(*m.ref_wavelength_nm) + '\n';
    }
    for (const auto& [k, v] : m.metadata) out += k + '=' + v + '\n';
  }
  return out;
}

}  // namespace uniax
