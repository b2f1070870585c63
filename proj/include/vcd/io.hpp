#ifndef VCD_IO_HPP
#define VCD_IO_HPP

// Plain-text helpers shared by the CSV writers and the command line tool.

#include <filesystem>
#include <string>
#include <vector>

#include "vcd/geometry.hpp"

namespace vcd {

// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

// Reads a header-less CSV of numbers, one vector per row. Blank lines are
// skipped. Throws IoError if the file cannot be opened and InputError on a
// ragged row or an unparsable cell (the message names the row, 1-based).
std::vector<Vector> read_vectors_csv(const std::filesystem::path& path);

// Same file layout, returned as a rows x cols matrix.
Matrix read_matrix_csv(const std::filesystem::path& path);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
void write_vectors_csv(const std::filesystem::path& path, const std::vector<Vector>& rows);

// Loads an n x d basis and checks orthonormality within `tol`; the error
// names the first offending column (0-based).
SubspaceBasis read_basis_csv(const std::filesystem::path& path, double tol = 1e-8);

// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace vcd

#endif  // VCD_IO_HPP
