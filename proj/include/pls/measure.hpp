#pragma once

#include <Eigen/Core>
#include <vector>

#include "pls/spectral.hpp"

namespace pls {

/// Discrete spectral measure sum_j m_j delta_{lambda_j}: support are the
/// distinct eigenvalues (ties within tie_tol merged), mass at a support
/// point is the summed lambda_i p_i^2 of its group.
struct DiscreteMeasure {
  Eigen::VectorXd support;          // strictly decreasing, all positive
  Eigen::VectorXd masses;           // nonnegative, at least one positive
  std::vector<int> spectrum_group;  // group index of each spectrum entry

  double total_mass() const { return masses.sum(); }
  Eigen::Index points() const { return support.size(); }
};

DiscreteMeasure build_measure(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& p_vec,
                              double tie_tol = kTieTol);
DiscreteMeasure build_measure(const SpectralDecomposition& decomp, const Eigen::VectorXd& p_vec,
                              double tie_tol = kTieTol);

/// Power moments m_j = integral x^j dmu for j = 0..count-1.
Eigen::VectorXd moments(const DiscreteMeasure& mu, int count);

}  // namespace pls
