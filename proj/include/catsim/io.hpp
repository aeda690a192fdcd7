#pragma once

// Interchange formats: DensityMatrix JSON and grid CSV exports. Doubles are
// written in shortest round-trip form, so every export reloads bit-exactly.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "catsim/fock.hpp"
#include "catsim/phase_space.hpp"

namespace catsim {

std::string format_double(double v);
/// Whole-token parse; returns false on any trailing garbage.
bool parse_double(std::string_view token, double& out);

/// { "cutoff": int, "re": [[...]], "im": [[...]] }, row-major.
std::string density_matrix_to_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(std::string_view text);
void save_density_matrix(const DensityMatrix& rho, const std::filesystem::path& path);
DensityMatrix load_density_matrix(const std::filesystem::path& path);

/// `# basis=wigner theta=<deg>` then `x,p,W` rows.
void write_wigner_csv(std::ostream& out, const WignerGrid& grid);
/// `# basis=<name> theta=<deg>` then `q,q',re,im` rows.
void write_quad_csv(std::ostream& out, const QuadDensityMatrix& rho, std::string_view basis);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace catsim
