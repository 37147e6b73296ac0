#include "pls/krylov.hpp"

#include <cmath>
#include <limits>

#include "pls/errors.hpp"
#include "pls/spectral.hpp"

namespace pls {

KrylovBasis krylov_basis_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& seed, int k,
                              double grade_tol, double seed_scale) {
  if (k < 1) throw ValidationError("krylov_basis: k must be >= 1");
  if (grade_tol <= 0) throw ValidationError("krylov_basis: grade_tol must be positive");
  const Eigen::Index p = seed.size();
  if (gram.rows() != p || gram.cols() != p) throw ValidationError("krylov_basis: gram/seed dimension mismatch");

  const double seed_norm = seed.norm();
  const double scale = seed_scale > 0 ? seed_scale : seed_norm;
  if (seed_norm <= 4 * std::numeric_limits<double>::epsilon() * scale || seed_norm == 0.0) {
    throw ZeroSeedError();
  }

  KrylovBasis basis;
  basis.raw_seed_norm = seed_norm;
  Eigen::MatrixXd B(p, k);
  B.col(0) = seed / seed_norm;
  Eigen::Index dim = 1;
  for (Eigen::Index j = 1; j < k; ++j) {
    Eigen::VectorXd w = gram * B.col(j - 1);
    const double pre = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
      w.noalias() -= B.leftCols(dim) * (B.leftCols(dim).transpose() * w);
    }
    const double post = w.norm();
    if (post <= grade_tol * pre) {
      basis.grade_reached = true;
      break;
    }
    B.col(j) = w / post;
    ++dim;
  }
  basis.basis_vectors = B.leftCols(dim);
  return basis;
}

KrylovBasis krylov_basis(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k,
                         double grade_tol) {
  if (y.size() != X.rows()) throw ValidationError("krylov_basis: X/y dimension mismatch");
  const Eigen::MatrixXd gram = X.transpose() * X;
  const Eigen::VectorXd seed = X.transpose() * y;
  // Scale for the zero-seed guard: a seed tiny relative to ||X||_F ||y|| is zero.
  const double scale = X.norm() * y.norm();
  return krylov_basis_gram(gram, seed, k, grade_tol, scale > 0 ? scale : -1.0);
}

KrylovBasis krylov_basis(const DesignMatrix& X, const Eigen::VectorXd& y, int k, double grade_tol) {
  return krylov_basis(X.entries, y, k, grade_tol);
}

}  // namespace pls
