#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "lsilu/sparse.hpp"

namespace lsilu {
namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

[[noreturn]] void parse_fail(const std::string& what, long line = -1) {
  std::string msg = "matrix market: " + what;
  if (line >= 0) msg += " (line " + std::to_string(line) + ")";
  throw_error(ErrorCode::parse_error, msg);
}

enum class Symmetry { general, symmetric, skew };

}  // namespace

CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  long lineno = 1;
  if (!std::getline(in, line)) parse_fail("empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") parse_fail("missing %%MatrixMarket banner", lineno);
  object = lowercase(object);
  format = lowercase(format);
  field = lowercase(field);
  symmetry = lowercase(symmetry);
  if (object != "matrix") parse_fail("unsupported object '" + object + "'", lineno);
  if (format != "coordinate") parse_fail("only coordinate format is supported", lineno);
  if (field == "pattern") parse_fail("pattern-only files carry no values", lineno);
  if (field != "real" && field != "integer" && field != "double")
    parse_fail("unsupported field '" + field + "'", lineno);
  Symmetry sym;
  if (symmetry == "general") {
    sym = Symmetry::general;
  } else if (symmetry == "symmetric") {
    sym = Symmetry::symmetric;
  } else if (symmetry == "skew-symmetric") {
    sym = Symmetry::skew;
  } else {
    parse_fail("unsupported symmetry '" + symmetry + "'", lineno);
  }

  long long rows = -1, cols = -1, entries = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> entries)) parse_fail("malformed size line", lineno);
    break;
  }
  if (rows < 0) parse_fail("missing size line");
  if (rows != cols) parse_fail("matrix is not square");
  if (entries < 0) parse_fail("negative entry count", lineno);
  const long long limit = std::numeric_limits<Index>::max() / 2;
  if (rows > limit || entries > limit) parse_fail("matrix too large for 32-bit indices");

  const auto n = static_cast<Index>(rows);
  std::vector<Index> ri, ci;
  std::vector<double> vi;
  const auto reserve = static_cast<std::size_t>(sym == Symmetry::general ? entries : 2 * entries);
  ri.reserve(reserve);
  ci.reserve(reserve);
  vi.reserve(reserve);

  long long seen = 0;
  while (seen < entries && std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    long long r, c;
    double v;
    if (!(entry >> r >> c >> v)) parse_fail("malformed entry", lineno);
    if (r < 1 || r > rows || c < 1 || c > cols) parse_fail("index out of range", lineno);
    const auto r0 = static_cast<Index>(r - 1);
    const auto c0 = static_cast<Index>(c - 1);
    ri.push_back(r0);
    ci.push_back(c0);
    vi.push_back(v);
    if (sym != Symmetry::general && r0 != c0) {
      ri.push_back(c0);
      ci.push_back(r0);
      vi.push_back(sym == Symmetry::skew ? -v : v);
    }
    ++seen;
  }
  if (seen != entries) parse_fail("expected " + std::to_string(entries) + " entries, found " + std::to_string(seen));
  return csr_from_triplets(n, ri, ci, vi);
}

CsrMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::io_error, "cannot open '" + path + "'");
  return read_matrix_market(in);
}

void write_matrix_market(const CsrMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.n << ' ' << a.n << ' ' << a.nnz() << '\n';
  out.precision(17);
  for (Index r = 0; r < a.n; ++r)
    for (Index p = a.row_begin(r); p < a.row_end(r); ++p)
      out << (r + 1) << ' ' << (a.col[static_cast<std::size_t>(p)] + 1) << ' ' << a.val[static_cast<std::size_t>(p)]
          << '\n';
  if (!out) throw_error(ErrorCode::io_error, "failed writing matrix market output");
}

void write_matrix_market_file(const CsrMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorCode::io_error, "cannot open '" + path + "' for writing");
  write_matrix_market(a, out);
}

Permutation read_permutation(std::istream& in, Index expected_size) {
  std::vector<Index> p;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long long v;
    if (!(ls >> v)) throw_error(ErrorCode::parse_error, "permutation: malformed line " + std::to_string(lineno));
    if (v < 0 || v >= expected_size)
      throw_error(ErrorCode::parse_error, "permutation: index out of range on line " + std::to_string(lineno));
    p.push_back(static_cast<Index>(v));
  }
  if (static_cast<Index>(p.size()) != expected_size)
    throw_error(ErrorCode::parse_error, "permutation: expected " + std::to_string(expected_size) + " entries, found " +
                                            std::to_string(p.size()));
  try {
    return Permutation::from_new_to_old(std::move(p));
  } catch (const Error& e) {
    throw_error(ErrorCode::parse_error, std::string("permutation: ") + e.what());
  }
}

Permutation read_permutation_file(const std::string& path, Index expected_size) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::io_error, "cannot open '" + path + "'");
  return read_permutation(in, expected_size);
}

void write_permutation(const Permutation& p, std::ostream& out) {
  for (Index v : p.perm()) out << v << '\n';
}

}  // namespace lsilu
