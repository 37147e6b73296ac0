#pragma once

#include <Eigen/Core>

namespace pls {

struct DesignMatrix;

/// Orthonormal basis of K^k(X^T X, X^T y), built by repeated application of
/// X^T X with two-pass reorthogonalization. Construction stops early, with
/// grade_reached set, when the next direction collapses under
/// orthogonalization (post-norm <= grade_tol * pre-norm).
struct KrylovBasis {
  Eigen::MatrixXd basis_vectors;  // p x k', orthonormal columns
  bool grade_reached = false;
  double raw_seed_norm = 0.0;  // ||X^T y||

  Eigen::Index dimension() const { return basis_vectors.cols(); }
};

KrylovBasis krylov_basis(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k,
                         double grade_tol = 1e-10);
KrylovBasis krylov_basis(const DesignMatrix& X, const Eigen::VectorXd& y, int k,
                         double grade_tol = 1e-10);

/// Same construction from a precomputed Gram matrix X^T X and seed X^T y.
KrylovBasis krylov_basis_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& seed, int k,
                              double grade_tol = 1e-10, double seed_scale = -1.0);

}  // namespace pls
