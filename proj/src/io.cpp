#include "vcd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "vcd/error.hpp"

namespace vcd {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<double> parse_row(std::string_view line, std::size_t row) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view cell =
        trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, value);
    if (cell.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(value)) {
      throw InputError("row " + std::to_string(row) + ", column " +
                       std::to_string(out.size() + 1) + ": cannot parse \"" + std::string(cell) +
                       "\" as a finite number");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<Vector> read_vectors_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Vector> rows;
  std::string line;
  std::size_t row = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<double> values = parse_row(line, row);
    if (rows.empty()) {
      width = values.size();
    } else if (values.size() != width) {
      throw InputError(path.string() + ": row " + std::to_string(row) + " has " +
                       std::to_string(values.size()) + " entries, expected " +
                       std::to_string(width));
    }
    rows.push_back(Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size())));
  }
  if (in.bad()) throw IoError("error reading " + path.string());
  return rows;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  const std::vector<Vector> rows = read_vectors_csv(path);
  if (rows.empty()) throw InputError(path.string() + ": empty matrix file");
  Matrix m(static_cast<Index>(rows.size()), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Index>(r)) = rows[r];
  return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ostringstream os;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << format_double(m(r, c));
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

void write_vectors_csv(const std::filesystem::path& path, const std::vector<Vector>& rows) {
  std::ostringstream os;
  for (const Vector& v : rows) {
    for (Index c = 0; c < v.size(); ++c) {
      if (c) os << ',';
      os << format_double(v(c));
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

SubspaceBasis read_basis_csv(const std::filesystem::path& path, double tol) {
  const Matrix m = read_matrix_csv(path);
  if (m.cols() > m.rows()) {
    throw InputError(path.string() + ": basis has more columns (" + std::to_string(m.cols()) +
                     ") than rows (" + std::to_string(m.rows()) + ")");
  }
  for (Index c = 0; c < m.cols(); ++c) {
    if (std::abs(m.col(c).norm() - 1.0) > tol) {
      throw InputError(path.string() + ": basis column " + std::to_string(c) +
                       " does not have unit norm");
    }
    for (Index p = 0; p < c; ++p) {
      if (std::abs(m.col(c).dot(m.col(p))) > tol) {
        throw InputError(path.string() + ": basis column " + std::to_string(c) +
                         " is not orthogonal to column " + std::to_string(p));
      }
    }
  }
  return SubspaceBasis::from_orthonormal(m, tol);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace vcd
