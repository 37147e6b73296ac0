#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pls/pls.hpp"
#include "pls/rng.hpp"
#include "pls/spectral.hpp"

namespace plstest {

/// Relative difference with an absolute floor.
inline double rel_diff(double a, double b, double abs_floor = 1e-8) {
  const double scale = std::max({std::abs(a), std::abs(b), abs_floor});
  return std::abs(a - b) / scale;
}

/// Diagonal design diag(sqrt(lambda)): U = V = I, so y's entries are the
/// spectral projections directly. Eigenvalues must be positive descending.
struct DiagInstance {
  pls::DesignMatrix X;
  pls::SpectralDecomposition decomp;
};

inline DiagInstance diag_instance(const Eigen::VectorXd& lambdas) {
  Eigen::MatrixXd m = lambdas.array().sqrt().matrix().asDiagonal();
  pls::DesignMatrix X(std::move(m));
  return DiagInstance{X, pls::decompose(X)};
}

/// Spectrum with adjacent ratios drawn from [lo, hi] (descending values).
inline Eigen::VectorXd separated_spectrum(std::mt19937_64& rng, int r, double lo = 1.1,
                                          double hi = 1.6) {
  std::uniform_real_distribution<double> ratio(lo, hi);
  Eigen::VectorXd lam(r);
  double v = 1.0;
  for (int i = r - 1; i >= 0; --i) {
    lam(i) = v;
    v *= ratio(rng);
  }
  return lam;
}

/// Signed magnitudes in [0.1, 1], the non-degeneracy regime of the
/// three-route checks.
inline Eigen::VectorXd bounded_p_hat(std::mt19937_64& rng, int r) {
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  Eigen::VectorXd p(r);
  for (int i = 0; i < r; ++i) p(i) = (coin(rng) ? 1.0 : -1.0) * mag(rng);
  return p;
}

/// Dense Gaussian design plus response.
struct DenseInstance {
  pls::DesignMatrix X;
  Eigen::VectorXd y;
};

inline DenseInstance gaussian_instance(std::mt19937_64& rng, int n, int p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(n, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) m(i, j) = normal(rng);
  }
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = normal(rng);
  return DenseInstance{pls::DesignMatrix(std::move(m)), std::move(y)};
}

}  // namespace plstest
