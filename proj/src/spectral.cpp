#include "pls/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "pls/errors.hpp"

namespace pls {

DesignMatrix::DesignMatrix(Eigen::MatrixXd m, bool standardized_in)
    : entries(std::move(m)), standardized(standardized_in) {
  if (entries.rows() < 2 || entries.cols() < 1) {
    throw ValidationError("design matrix needs n >= 2 rows and p >= 1 columns, got " +
                          std::to_string(entries.rows()) + " x " + std::to_string(entries.cols()));
  }
  if (!entries.allFinite()) throw ValidationError("design matrix has non-finite entries");
  if (standardized) {
    const double n = static_cast<double>(entries.rows());
    for (Eigen::Index j = 0; j < entries.cols(); ++j) {
      const double mean = entries.col(j).mean();
      const double msq = entries.col(j).squaredNorm() / n;
      if (std::abs(mean) > 1e-10 || std::abs(msq - 1.0) > 1e-10) {
        throw ValidationError("column " + std::to_string(j + 1) +
                              " is not standardized (mean " + std::to_string(mean) +
                              ", mean square " + std::to_string(msq) + ")");
      }
    }
  }
}

DesignMatrix standardize(const Eigen::MatrixXd& raw) {
  Eigen::MatrixXd m = raw;
  const double n = static_cast<double>(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    m.col(j).array() -= m.col(j).mean();
    const double msq = m.col(j).squaredNorm() / n;
    if (msq <= 0) throw ValidationError("column " + std::to_string(j + 1) + " is constant, cannot standardize");
    m.col(j) /= std::sqrt(msq);
  }
  return DesignMatrix(std::move(m), true);
}

SpectralDecomposition decompose(const Eigen::MatrixXd& X, double rank_tol) {
  if (rank_tol <= 0) throw ValidationError("rank_tol must be positive");
  if (!X.allFinite()) throw ValidationError("matrix has non-finite entries");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) throw RankDeficientError();

  const double lambda1 = sv(0) * sv(0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) * sv(r) > rank_tol * lambda1) ++r;
  if (r == 0) throw RankDeficientError();

  SpectralDecomposition d;
  d.eigenvalues = sv.head(r).array().square();
  d.left_vectors = svd.matrixU().leftCols(r);
  d.right_vectors = svd.matrixV().leftCols(r);

  // Deterministic sign convention: largest-magnitude entry of u_i positive.
  for (Eigen::Index i = 0; i < r; ++i) {
    Eigen::Index at = 0;
    d.left_vectors.col(i).cwiseAbs().maxCoeff(&at);
    if (d.left_vectors(at, i) < 0) {
      d.left_vectors.col(i) = -d.left_vectors.col(i);
      d.right_vectors.col(i) = -d.right_vectors.col(i);
    }
  }
  return d;
}

SpectralDecomposition decompose(const DesignMatrix& X, double rank_tol) {
  return decompose(X.entries, rank_tol);
}

SpectralProjections project(const SpectralDecomposition& decomp, const Eigen::VectorXd& y,
                            const std::optional<Eigen::VectorXd>& beta_star,
                            const std::optional<Eigen::VectorXd>& eps) {
  const Eigen::Index n = decomp.observations();
  const Eigen::Index p = decomp.predictors();
  if (y.size() != n) {
    throw ValidationError("dimension mismatch: y has " + std::to_string(y.size()) +
                          " entries, decomposition expects " + std::to_string(n));
  }
  SpectralProjections proj;
  proj.eigenvalues = decomp.eigenvalues;
  proj.p_hat = decomp.left_vectors.transpose() * y;
  proj.y_norm = y.norm();
  if (beta_star) {
    if (beta_star->size() != p) {
      throw ValidationError("dimension mismatch: beta* has " + std::to_string(beta_star->size()) +
                            " entries, decomposition expects " + std::to_string(p));
    }
    proj.beta_tilde = decomp.right_vectors.transpose() * (*beta_star);
    proj.p_clean = decomp.eigenvalues.array().sqrt() * proj.beta_tilde->array();
  }
  if (eps) {
    if (eps->size() != n) {
      throw ValidationError("dimension mismatch: eps has " + std::to_string(eps->size()) +
                            " entries, decomposition expects " + std::to_string(n));
    }
    proj.eps_tilde = decomp.left_vectors.transpose() * (*eps);
  }
  return proj;
}

int relevant_count(const SpectralProjections& proj, double tol, double tie_tol) {
  if (tol < 0) throw ValidationError("tol must be nonnegative");
  const Eigen::Index r = proj.eigenvalues.size();
  const double threshold = tol * proj.y_norm;
  int count = 0;
  Eigen::Index i = 0;
  while (i < r) {
    const double head = proj.eigenvalues(i);
    double group_mass = 0.0;
    Eigen::Index j = i;
    while (j < r && head - proj.eigenvalues(j) <= tie_tol * head) {
      group_mass += proj.p_hat(j) * proj.p_hat(j);
      ++j;
    }
    if (std::sqrt(group_mass) > threshold) ++count;
    i = j;
  }
  return count;
}

double condition_ratio(const SpectralDecomposition& decomp) {
  if (decomp.rank() < 1) throw ValidationError("empty decomposition");
  return decomp.eigenvalues(0) / decomp.eigenvalues(decomp.rank() - 1);
}

}  // namespace pls
