#include "randskel/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "randskel/errors.hpp"

namespace randskel {
namespace {

enum class Field { real, integer, pattern };
enum class Symmetry { general, symmetric, skew };

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_blank_or_comment(const std::string& line) {
  auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '%';
}

// Next non-comment line; returns false at end of input.
bool next_data_line(std::istream& in, std::string& line, long& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_blank_or_comment(line))
      return true;
  }
  return false;
}

double parse_value(std::istringstream& fields, Field field, long line_no) {
  if (field == Field::pattern)
    return 1.0;
  double v = 0.0;
  if (!(fields >> v))
    throw FormatError("missing or malformed value", line_no);
  return v;
}

void expect_end(std::istringstream& fields, long line_no) {
  std::string extra;
  if (fields >> extra)
    throw FormatError("unexpected trailing token '" + extra + "'", line_no);
}

} // namespace

MatrixSource read_matrix_market(std::istream& in) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line))
    throw FormatError("empty input", 0);
  ++line_no;

  std::istringstream header(line);
  std::string banner, object, format, field_s, symmetry_s;
  header >> banner >> object >> format >> field_s >> symmetry_s;
  if (banner != "%%MatrixMarket")
    throw FormatError("missing %%MatrixMarket banner", line_no);
  if (lower(object) != "matrix")
    throw FormatError("unsupported object '" + object + "'", line_no);
  format = lower(format);
  if (format != "coordinate" && format != "array")
    throw FormatError("unsupported format '" + format + "'", line_no);

  Field field;
  field_s = lower(field_s);
  if (field_s == "real" || field_s == "double")
    field = Field::real;
  else if (field_s == "integer")
    field = Field::integer;
  else if (field_s == "pattern")
    field = Field::pattern;
  else if (field_s == "complex")
    throw FormatError("complex matrices are not supported", line_no);
  else
    throw FormatError("unknown field '" + field_s + "'", line_no);
  if (format == "array" && field == Field::pattern)
    throw FormatError("pattern field is only valid for coordinate format", line_no);

  Symmetry sym;
  symmetry_s = lower(symmetry_s);
  if (symmetry_s == "general")
    sym = Symmetry::general;
  else if (symmetry_s == "symmetric")
    sym = Symmetry::symmetric;
  else if (symmetry_s == "skew-symmetric")
    sym = Symmetry::skew;
  else if (symmetry_s == "hermitian")
    throw FormatError("hermitian matrices are not supported", line_no);
  else
    throw FormatError("unknown symmetry '" + symmetry_s + "'", line_no);

  if (!next_data_line(in, line, line_no))
    throw FormatError("missing size line", line_no);
  std::istringstream size_line(line);
  long long m = 0, n = 0, entries = 0;
  if (!(size_line >> m >> n))
    throw FormatError("malformed size line", line_no);
  if (format == "coordinate" && !(size_line >> entries))
    throw FormatError("coordinate size line needs rows, cols and entry count", line_no);
  expect_end(size_line, line_no);
  if (m < 1 || n < 1 || entries < 0)
    throw FormatError("invalid dimensions", line_no);
  if (sym != Symmetry::general && m != n)
    throw FormatError("symmetric storage requires a square matrix", line_no);

  if (format == "coordinate") {
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(sym == Symmetry::general ? entries : 2 * entries));
    for (long long e = 0; e < entries; ++e) {
      if (!next_data_line(in, line, line_no))
        throw FormatError("expected " + std::to_string(entries) + " entries, found " + std::to_string(e), line_no);
      std::istringstream fields(line);
      long long i = 0, j = 0;
      if (!(fields >> i >> j))
        throw FormatError("malformed entry indices", line_no);
      if (i < 1 || i > m || j < 1 || j > n)
        throw FormatError("entry index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range", line_no);
      double v = parse_value(fields, field, line_no);
      expect_end(fields, line_no);
      if (sym != Symmetry::general && j > i)
        throw FormatError("symmetric storage must list the lower triangle only", line_no);
      if (sym == Symmetry::skew && i == j)
        throw FormatError("skew-symmetric storage has no diagonal entries", line_no);
      triplets.emplace_back(i - 1, j - 1, v);
      if (sym != Symmetry::general && i != j)
        triplets.emplace_back(j - 1, i - 1, sym == Symmetry::skew ? -v : v);
    }
    if (next_data_line(in, line, line_no))
      throw FormatError("more entries than declared", line_no);
    SparseMatrix a(m, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    return MatrixSource::sparse(std::move(a));
  }

  Matrix a = Matrix::Zero(m, n);
  // Array format is column-major; symmetric variants store the lower triangle.
  for (long long j = 0; j < n; ++j) {
    const long long start = sym == Symmetry::general ? 0 : (sym == Symmetry::symmetric ? j : j + 1);
    for (long long i = start; i < m; ++i) {
      if (!next_data_line(in, line, line_no))
        throw FormatError("array data ends early", line_no);
      std::istringstream fields(line);
      double v = parse_value(fields, field, line_no);
      expect_end(fields, line_no);
      a(i, j) = v;
      if (sym == Symmetry::symmetric)
        a(j, i) = v;
      else if (sym == Symmetry::skew)
        a(j, i) = -v;
    }
  }
  if (next_data_line(in, line, line_no))
    throw FormatError("more array values than declared", line_no);
  return MatrixSource::dense(std::move(a));
}

MatrixSource load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw FormatError("cannot open '" + path.string() + "'", 0);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const Matrix& a) {
  out << "%%MatrixMarket matrix array real general\n";
  out << a.rows() << ' ' << a.cols() << '\n';
  out << std::setprecision(17);
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out << a(i, j) << '\n';
}

void write_matrix_market(std::ostream& out, const MatrixSource& a) {
  if (const auto* sp = a.sparse_data()) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << sp->rows() << ' ' << sp->cols() << ' ' << sp->nonZeros() << '\n';
    out << std::setprecision(17);
    for (Index j = 0; j < sp->outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(*sp, j); it; ++it)
        out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    return;
  }
  write_matrix_market(out, a.to_dense());
}

void write_matrix_market(const std::filesystem::path& path, const MatrixSource& a) {
  std::ofstream out(path);
  if (!out)
    throw ParameterError("cannot write '" + path.string() + "'");
  write_matrix_market(out, a);
}

} // namespace randskel
