#pragma once

#include <Eigen/Core>
#include <optional>

namespace pls {

/// Relative gap below which two eigenvalues count as one support point.
inline constexpr double kTieTol = 1e-9;

/// Fixed n x p design. When `standardized` is set each column must have
/// mean 0 and mean square 1 (checked to 1e-10 at construction).
struct DesignMatrix {
  Eigen::MatrixXd entries;
  bool standardized = false;

  explicit DesignMatrix(Eigen::MatrixXd m, bool standardized = false);

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
};

/// Centers and scales columns to mean 0, mean square 1.
DesignMatrix standardize(const Eigen::MatrixXd& raw);

/// Thin SVD of the design, stored as the eigenstructure of X^T X:
/// eigenvalues lambda_1 >= ... >= lambda_r > 0 with X v_i = sqrt(lambda_i) u_i.
/// Column signs are fixed so the largest-magnitude entry of each u_i is positive.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // r, strictly positive, nonincreasing
  Eigen::MatrixXd left_vectors;  // U, n x r
  Eigen::MatrixXd right_vectors; // V, p x r

  Eigen::Index rank() const { return eigenvalues.size(); }
  Eigen::Index observations() const { return left_vectors.rows(); }
  Eigen::Index predictors() const { return right_vectors.rows(); }
};

/// Eigenvalues below rank_tol * lambda_1 are truncated; throws
/// RankDeficientError if nothing survives.
SpectralDecomposition decompose(const DesignMatrix& X, double rank_tol = 1e-12);
SpectralDecomposition decompose(const Eigen::MatrixXd& X, double rank_tol = 1e-12);

/// Coordinates of the response (and optionally the clean signal and noise)
/// in the left singular basis: p_hat_i = u_i' y, p_i = u_i' X beta*,
/// eps_tilde_i = u_i' eps, beta_tilde_i = v_i' beta*.
struct SpectralProjections {
  Eigen::VectorXd eigenvalues;  // copy of the decomposition spectrum
  Eigen::VectorXd p_hat;
  double y_norm = 0.0;
  std::optional<Eigen::VectorXd> p_clean;
  std::optional<Eigen::VectorXd> eps_tilde;
  std::optional<Eigen::VectorXd> beta_tilde;
};

SpectralProjections project(const SpectralDecomposition& decomp, const Eigen::VectorXd& y,
                            const std::optional<Eigen::VectorXd>& beta_star = std::nullopt,
                            const std::optional<Eigen::VectorXd>& eps = std::nullopt);

/// Number of distinct eigenvalue groups carrying response mass above
/// tol * ||y||. With distinct eigenvalues this is the grade of X^T y
/// with respect to X^T X.
int relevant_count(const SpectralProjections& proj, double tol, double tie_tol = kTieTol);

/// lambda_1 / lambda_r.
double condition_ratio(const SpectralDecomposition& decomp);

}  // namespace pls
