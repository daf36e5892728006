#include "nymp/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nymp/errors.hpp"

namespace nymp {

namespace {

[[noreturn]] void fail(const std::string& path, long line,
                       const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line << ": " << what;
  throw config_error(msg.str());
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

SpdMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open matrix file '" + path + "'");

  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) fail(path, 1, "empty file");
  ++lineno;
  {
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket")
      fail(path, lineno, "missing %%MatrixMarket banner");
    if (lower(object) != "matrix" || lower(format) != "coordinate")
      fail(path, lineno, "expected 'matrix coordinate' header");
    if (lower(field) != "real")
      fail(path, lineno, "unsupported field '" + field + "' (need real)");
    if (lower(symmetry) != "symmetric")
      fail(path, lineno,
           "symmetry is '" + symmetry + "'; only symmetric matrices load");
  }

  // Comments, then the size line.
  long rows = 0, cols = 0, nnz = 0;
  for (;;) {
    if (!std::getline(in, line)) fail(path, lineno, "missing size line");
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> nnz)) fail(path, lineno, "malformed size line");
    break;
  }
  if (rows != cols)
    fail(path, lineno, "matrix is not square (" + std::to_string(rows) + "x" +
                           std::to_string(cols) + ")");
  if (rows < 1) fail(path, lineno, "empty matrix");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
  long seen = 0;
  while (seen < nnz) {
    if (!std::getline(in, line))
      fail(path, lineno,
           "unexpected end of file: " + std::to_string(seen) + " of " +
               std::to_string(nnz) + " entries read");
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    long i = 0, j = 0;
    double v = 0;
    std::istringstream ss(line);
    if (!(ss >> i >> j >> v)) fail(path, lineno, "malformed entry line");
    if (i < 1 || i > rows || j < 1 || j > cols)
      fail(path, lineno, "index (" + std::to_string(i) + "," +
                             std::to_string(j) + ") out of range");
    a(i - 1, j - 1) += v;
    if (i != j) a(j - 1, i - 1) += v;
    ++seen;
  }

  return SpdMatrix::from_dense(std::move(a), {Provenance::Kind::File, path});
}

void save_matrix_market(const SpdMatrix& a, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw config_error("cannot write matrix file '" + path + "'");

  const Eigen::MatrixXd& m = a.entries();
  const long n = a.n();
  long nnz = 0;
  for (long j = 0; j < n; ++j)
    for (long i = j; i < n; ++i)
      if (m(i, j) != 0.0) ++nnz;

  std::fprintf(out, "%%%%MatrixMarket matrix coordinate real symmetric\n");
  std::fprintf(out, "%ld %ld %ld\n", n, n, nnz);
  for (long j = 0; j < n; ++j)
    for (long i = j; i < n; ++i)
      if (m(i, j) != 0.0)
        std::fprintf(out, "%ld %ld %.17g\n", i + 1, j + 1, m(i, j));
  std::fclose(out);
}

}  // namespace nymp
