#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mubcv/expsim.hpp"
#include "mubcv/frft.hpp"

namespace mubcv {

// Grid CSV: '#'-prefixed "key = value" metadata lines, then the header
// "w1_index,w2_index,position1_m,position2_m,counts" and n*n rows.
void write_grid_csv(const CoincidenceGrid& grid, std::ostream& out);
CoincidenceGrid read_grid_csv(std::istream& in);

// Picks CSV or JSON from the extension (.json -> JSON, anything else CSV).
void save_grid(const CoincidenceGrid& grid, const std::filesystem::path& path);
CoincidenceGrid load_grid(const std::filesystem::path& path);

// Wavefunction CSV with header "q,re,im"; q must be the centered uniform grid.
void write_wavefunction_csv(const SampledWavefunction& psi, std::ostream& out);
SampledWavefunction read_wavefunction_csv(std::istream& in);

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace mubcv
