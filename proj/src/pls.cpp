#include "pls/pls.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "pls/errors.hpp"
#include "pls/krylov.hpp"

namespace pls {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Fills residual norms, spectral residual projections, polynomial values
/// and filter factors once betas/fitted are in place.
void finish_path(PlsPath& path, const SpectralDecomposition& decomp, const Eigen::VectorXd& y) {
  const Eigen::Index K = static_cast<Eigen::Index>(path.betas.size());
  const Eigen::Index r = decomp.rank();
  path.k_max = static_cast<int>(K);
  path.projections = project(decomp, y);
  path.residual_norms.resize(K);
  path.residual_projections.resize(K, r);
  path.residual_values.resize(K, r);
  path.filter_factors.resize(K, r);
  const double threshold = kRelevanceTol * path.projections.y_norm;
  for (Eigen::Index k = 0; k < K; ++k) {
    const Eigen::VectorXd resid = y - path.fitted[k];
    path.residual_norms[k] = resid.norm();
    path.residual_projections.row(k) = (decomp.left_vectors.transpose() * resid).transpose();
    for (Eigen::Index i = 0; i < r; ++i) {
      const double ph = path.projections.p_hat(i);
      if (std::abs(ph) <= threshold) {
        path.residual_values(k, i) = kNaN;
        path.filter_factors(k, i) = kNaN;
      } else {
        const double q = path.residual_projections(k, i) / ph;
        path.residual_values(k, i) = q;
        path.filter_factors(k, i) = 1.0 - q;
      }
    }
  }
}

}  // namespace

PlsPath pls_fit(const DesignMatrix& X, const SpectralDecomposition& decomp,
                const Eigen::VectorXd& y, int k_max, double grade_tol) {
  if (k_max < 1) throw ValidationError("pls_fit: k_max must be >= 1");
  KrylovBasis basis = krylov_basis(X.entries, y, k_max, grade_tol);
  const Eigen::Index K = basis.dimension();

  const Eigen::MatrixXd M = X.entries * basis.basis_vectors;  // n x K
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  const Eigen::VectorXd qty = (qr.householderQ().adjoint() * y).head(K);
  const Eigen::MatrixXd R =
      qr.matrixQR().topRows(K).template triangularView<Eigen::Upper>();

  PlsPath path;
  path.grade_reached = basis.grade_reached;
  path.truncated_at_grade = K < k_max;
  path.betas.reserve(K);
  path.fitted.reserve(K);
  for (Eigen::Index k = 1; k <= K; ++k) {
    const Eigen::VectorXd c = R.topLeftCorner(k, k)
                                  .triangularView<Eigen::Upper>()
                                  .solve(qty.head(k));
    path.betas.push_back(basis.basis_vectors.leftCols(k) * c);
    path.fitted.push_back(M.leftCols(k) * c);
  }
  finish_path(path, decomp, y);
  return path;
}

PlsPath pls_fit(const DesignMatrix& X, const Eigen::VectorXd& y, int k_max,
                double grade_tol, double rank_tol) {
  return pls_fit(X, decompose(X, rank_tol), y, k_max, grade_tol);
}

PlsPath pls_fit_nipals(const DesignMatrix& X, const SpectralDecomposition& decomp,
                       const Eigen::VectorXd& y, int k_max, double grade_tol) {
  if (k_max < 1) throw ValidationError("pls_fit_nipals: k_max must be >= 1");
  if (y.size() != X.rows()) throw ValidationError("pls_fit_nipals: X/y dimension mismatch");

  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd Xd = X.entries;
  const double seed0 = (X.entries.transpose() * y).norm();
  if (seed0 <= 4 * std::numeric_limits<double>::epsilon() * X.entries.norm() * y.norm() ||
      seed0 == 0.0) {
    throw ZeroSeedError();
  }

  const double x_scale = X.entries.norm();
  Eigen::MatrixXd W(p, k_max), T(n, k_max), P(p, k_max);
  Eigen::VectorXd c(k_max);
  Eigen::Index K = 0;
  bool grade = false;
  for (Eigen::Index j = 0; j < k_max; ++j) {
    Eigen::VectorXd w = Xd.transpose() * y;
    const double nw = w.norm();
    if (nw <= grade_tol * seed0) {
      grade = true;
      break;
    }
    w /= nw;
    const Eigen::VectorXd t = Xd * w;
    const double tt = t.squaredNorm();
    if (t.norm() <= grade_tol * x_scale) {
      grade = true;
      break;
    }
    W.col(j) = w;
    T.col(j) = t;
    P.col(j) = Xd.transpose() * t / tt;
    c(j) = t.dot(y) / tt;
    Xd.noalias() -= t * P.col(j).transpose();
    ++K;
  }
  if (K == 0) throw ZeroSeedError();

  PlsPath path;
  path.grade_reached = grade;
  path.truncated_at_grade = K < k_max;
  for (Eigen::Index k = 1; k <= K; ++k) {
    // T_k = X W_k (P_k' W_k)^{-1}, so the regression of y on the scores maps
    // back through W_k (P_k' W_k)^{-1} c_k.
    const Eigen::MatrixXd PtW = P.leftCols(k).transpose() * W.leftCols(k);
    const Eigen::VectorXd g = PtW.partialPivLu().solve(c.head(k));
    path.betas.push_back(W.leftCols(k) * g);
    path.fitted.push_back(T.leftCols(k) * c.head(k));
  }

  double worst = 0.0;
  for (Eigen::Index j = 0; j < K; ++j) {
    for (Eigen::Index l = j + 1; l < K; ++l) {
      worst = std::max(worst, std::abs(T.col(j).dot(T.col(l))) /
                                  (T.col(j).norm() * T.col(l).norm()));
    }
  }
  path.orthogonality_warning = worst > 1e-6;

  finish_path(path, decomp, y);
  return path;
}

PlsPath pls_fit_nipals(const DesignMatrix& X, const Eigen::VectorXd& y, int k_max,
                       double grade_tol, double rank_tol) {
  return pls_fit_nipals(X, decompose(X, rank_tol), y, k_max, grade_tol);
}

OlsSolution ols_fit(const DesignMatrix& X, const SpectralDecomposition& decomp,
                    const Eigen::VectorXd& y) {
  const SpectralProjections proj = project(decomp, y);
  const Eigen::VectorXd scaled = proj.p_hat.array() / decomp.eigenvalues.array().sqrt();
  OlsSolution sol;
  sol.beta_ols = decomp.right_vectors * scaled;
  sol.residual_norm = (y - X.entries * sol.beta_ols).norm();
  return sol;
}

OlsSolution ols_fit(const DesignMatrix& X, const Eigen::VectorXd& y, double rank_tol) {
  return ols_fit(X, decompose(X, rank_tol), y);
}

Eigen::MatrixXd filter_factors(const PlsPath& path, const SpectralProjections& proj) {
  const Eigen::Index K = path.residual_projections.rows();
  const Eigen::Index r = path.residual_projections.cols();
  if (proj.p_hat.size() != r) throw ValidationError("filter_factors: projection size mismatch");
  Eigen::MatrixXd f(K, r);
  const double threshold = kRelevanceTol * proj.y_norm;
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index i = 0; i < r; ++i) {
      const double ph = proj.p_hat(i);
      f(k, i) = std::abs(ph) <= threshold
                    ? kNaN
                    : 1.0 - path.residual_projections(k, i) / ph;
    }
  }
  return f;
}

}  // namespace pls
