#include "pls/matrix_io.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "pls/errors.hpp"
#include "pls/format.hpp"

namespace pls {

namespace {

double parse_double(const std::string& token, const std::string& name, Eigen::Index row) {
  const char* begin = token.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    throw ValidationError(name + ": bad numeric token '" + token + "' in row " +
                          std::to_string(row + 1));
  }
  return v;
}

}  // namespace

Eigen::MatrixXd read_dense_matrix(std::istream& in, const std::string& name) {
  Eigen::Index n = 0, p = 0;
  if (!(in >> n >> p)) throw ValidationError(name + ": missing 'n p' header line");
  if (n < 1 || p < 1) throw ValidationError(name + ": non-positive dimensions in header");
  Eigen::MatrixXd m(n, p);
  std::string token;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!(in >> token)) {
        throw ValidationError(name + ": truncated matrix body at row " + std::to_string(i + 1));
      }
      m(i, j) = parse_double(token, name, i);
    }
  }
  return m;
}

Eigen::MatrixXd read_dense_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open matrix file: " + path.string());
  return read_dense_matrix(in, path.string());
}

void write_dense_matrix(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_dense_matrix(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open matrix file for writing: " + path.string());
  write_dense_matrix(out, m);
}

}  // namespace pls
