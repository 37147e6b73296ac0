#pragma once

#include <Eigen/Core>
#include <vector>

#include "pls/spectral.hpp"

namespace pls {

/// Projections with |p_hat_i| <= kRelevanceTol * ||y|| carry no usable
/// information; residual-polynomial values and filter factors are reported
/// as NaN there.
inline constexpr double kRelevanceTol = 1e-12;

/// Per-step results of a PLS path, k = 1..k_max.
struct PlsPath {
  std::vector<Eigen::VectorXd> betas;
  std::vector<Eigen::VectorXd> fitted;        // X beta_k
  std::vector<double> residual_norms;         // ||y - X beta_k||
  Eigen::MatrixXd residual_projections;       // K x r, u_i' (y - X beta_k)
  Eigen::MatrixXd residual_values;            // K x r, Qhat_k(lambda_i); NaN where undefined
  Eigen::MatrixXd filter_factors;             // K x r, 1 - Qhat_k(lambda_i); NaN where undefined
  int k_max = 0;                              // steps actually computed
  bool grade_reached = false;
  bool truncated_at_grade = false;            // requested more steps than the grade allows
  bool orthogonality_warning = false;         // NIPALS scores lost orthogonality beyond 1e-6
  SpectralProjections projections;            // projections of the y used in the fit
};

/// Least squares restricted to the Krylov subspace K^k(X^T X, X^T y),
/// solved per step on the orthonormal Krylov basis.
PlsPath pls_fit(const DesignMatrix& X, const Eigen::VectorXd& y, int k_max,
                double grade_tol = 1e-10, double rank_tol = 1e-12);
PlsPath pls_fit(const DesignMatrix& X, const SpectralDecomposition& decomp,
                const Eigen::VectorXd& y, int k_max, double grade_tol = 1e-10);

/// Classical PLS1: weight vectors from deflated data, orthogonal scores,
/// X-only deflation. Agrees with pls_fit on well-conditioned inputs.
PlsPath pls_fit_nipals(const DesignMatrix& X, const Eigen::VectorXd& y, int k_max,
                       double grade_tol = 1e-10, double rank_tol = 1e-12);
PlsPath pls_fit_nipals(const DesignMatrix& X, const SpectralDecomposition& decomp,
                       const Eigen::VectorXd& y, int k_max, double grade_tol = 1e-10);

struct OlsSolution {
  Eigen::VectorXd beta_ols;  // minimum-norm least squares
  double residual_norm = 0.0;
};

OlsSolution ols_fit(const DesignMatrix& X, const Eigen::VectorXd& y, double rank_tol = 1e-12);
OlsSolution ols_fit(const DesignMatrix& X, const SpectralDecomposition& decomp,
                    const Eigen::VectorXd& y);

/// f_i^k = 1 - Qhat_k(lambda_i) from a path's residual projections and the
/// given response projections; NaN where |p_hat_i| <= kRelevanceTol * ||y||.
Eigen::MatrixXd filter_factors(const PlsPath& path, const SpectralProjections& proj);

}  // namespace pls
