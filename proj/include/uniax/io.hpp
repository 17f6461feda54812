#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "uniax/compensator.hpp"
#include "uniax/materials.hpp"
#include "uniax/psf.hpp"
#include "uniax/wavefront.hpp"
#include "uniax/zernike.hpp"

namespace uniax {

/// Stack files list one layer per line, objective side first:
///
///     # 1.2 mm CD stack
///     layer: quartz 0.486 compensator
///     layer: sapphire 0.714 substrate
///
/// The role is optional (generic, substrate, compensator). Materials are
/// looked up in `catalog`. A file without layers is an empty stack.
LayerStack parse_stack(std::string_view text, const Catalog& catalog);
LayerStack load_stack_file(const std::filesystem::path& path, const Catalog& catalog);
std::string serialize_stack(const LayerStack& stack);

/// Columns rho, W_o, W_e, dW (waves).
std::string wavefront_csv(const WavefrontMap& map);
/// Columns index, n, m, coefficient.
std::string zernike_csv(const ZernikeSpectrum& spectrum);
/// OSA index table up to `max_order`: index, n, m.
std::string zernike_index_csv(int max_order);
/// Columns z_nm, total, ordinary, extraordinary.
std::string axial_profile_csv(const AxialProfile& profile);
/// Columns x_nm, y_nm (or z_nm), intensity.
std::string field_grid_csv(const FieldGrid& grid);
/// Columns thickness_mm, residual_rms_waves.
std::string scan_csv(const ScanProfile& scan);

/// Binary 16-bit PGM (P5, maxval 65535, big-endian), scaled so the grid
/// maximum maps to 65535. Row 0 is the first grid row.
std::string encode_pgm16(const FieldGrid& grid);

/// Writes bytes verbatim. Throws ConfigError when the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace uniax
