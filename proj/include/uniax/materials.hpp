#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uniax {

enum class OpticalSign { negative, positive, isotropic };

std::string_view to_string(OpticalSign sign);

/// Optical constants of a uniaxial medium whose optic axis is normal to the
/// layer surfaces. Isotropic media have n_e == n_o exactly.
struct UniaxialMaterial {
  std::string name;
  double n_o = 1.0;
  double n_e = 1.0;
  std::optional<double> ref_wavelength_nm;
  /// Inert notes (hardness, thermal data); never used in computations.
  std::map<std::string, std::string> metadata;

  bool is_isotropic() const noexcept { return n_e == n_o; }
};

/// Throws ConfigError naming the entry when an index leaves [1, 3).
void validate(const UniaxialMaterial& m);

/// Signed birefringence n_e - n_o.
double delta_n(const UniaxialMaterial& m) noexcept;

/// Isotropic when |n_e - n_o| <= 1e-9.
OpticalSign optical_sign(const UniaxialMaterial& m) noexcept;

namespace builtin {
UniaxialMaterial sapphire();
UniaxialMaterial quartz();
UniaxialMaterial air();
UniaxialMaterial fused_silica();
}  // namespace builtin

class Catalog {
 public:
  /// Catalog holding only the built-in entries.
  static Catalog builtins();

  /// Adds an entry, replacing any existing one with the same name in place.
  void insert_or_replace(UniaxialMaterial m);

  const UniaxialMaterial* find(std::string_view name) const noexcept;
  /// Throws ConfigError for unknown names.
  const UniaxialMaterial& at(std::string_view name) const;

  std::span<const UniaxialMaterial> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<UniaxialMaterial> entries_;
};

/// Parses the line-oriented material format:
///
///     # comment
///     name=sapphire
///     n_o=1.78038
///     n_e=1.77206
///     ref_wavelength_nm=442
///
/// Records are separated by blank lines. Keys other than the four above are
/// kept as metadata.
std::vector<UniaxialMaterial> parse_materials(std::string_view text);

/// Built-ins plus the parsed records; user records override built-ins by name.
Catalog load_catalog(std::string_view text);
Catalog load_catalog_file(const std::filesystem::path& path);

/// Inverse of parse_materials. Numbers are written in shortest round-trip
/// form so that re-parsing reproduces them bit for bit.
std::string serialize_materials(std::span<const UniaxialMaterial> materials);

}  // namespace uniax
