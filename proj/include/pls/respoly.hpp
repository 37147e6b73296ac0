#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "pls/measure.hpp"
#include "pls/pls.hpp"
#include "pls/spectral.hpp"

namespace pls {

/// Default cap on the number of enumerated eigenvalue subsets.
inline constexpr std::size_t kDefaultSubsetCap = 2'000'000;

/// Degree-k residual polynomial with constant term 1. `coefficients` is
/// empty when only values are recoverable (too few distinct relevant
/// eigenvalues to interpolate).
struct ResidualPolynomial {
  Eigen::VectorXd coefficients;       // a_0..a_k, a_0 = 1; empty if unavailable
  int degree = 0;
  Eigen::VectorXd values_on_spectrum; // see the producing operation for the grid

  bool has_coefficients() const { return coefficients.size() > 0; }
};

/// Horner evaluation; requires coefficients.
double evaluate(const ResidualPolynomial& poly, double x);

/// Subsets of measure-support indices (ascending index = descending
/// eigenvalue) with their normalized Vandermonde weights.
struct SubsetWeights {
  std::vector<std::vector<int>> index_subsets;
  Eigen::VectorXd weights;
};

/// Values Qhat_k(lambda_i) read off a fitted path; coefficients recovered by
/// Newton interpolation through 0 (value 1) and k well-separated relevant
/// eigenvalues. Values grid: the instance spectrum.
ResidualPolynomial residual_poly_from_fit(const PlsPath& path, const SpectralProjections& proj,
                                          int k);

enum class MomentSolveMode {
  Auto,      // double solve, exact rational fallback when ill-conditioned
  Double,    // double solve, IllConditionedMomentsError past the gate
  Rational,  // exact solve of the system defined by the (binary) inputs
};

/// Coefficients from the k x k Hankel system in the measure moments.
/// Values grid: the measure support.
ResidualPolynomial residual_poly_moments(const DiscreteMeasure& mu, int k,
                                         MomentSolveMode mode = MomentSolveMode::Auto,
                                         double cond_tol = 1e-12);

struct VandermondeResult {
  SubsetWeights weights;
  Eigen::VectorXd values;  // values grid: the instance spectrum
};

/// Exact subset-sum expression for the residual values: weights
/// proportional to prod(p^2 lambda^2) V(lambda)^2 over k-subsets of distinct
/// support points, value = sum of weighted products prod(1 - lambda_i/lambda_j).
VandermondeResult residual_values_vandermonde(const SpectralDecomposition& decomp,
                                              const Eigen::VectorXd& p_vec, int k,
                                              std::size_t cap = kDefaultSubsetCap);

/// Evaluates the weighted subset-product polynomial at an arbitrary point.
double evaluate_from_weights(const SubsetWeights& weights, const DiscreteMeasure& mu, double x);

struct NoiseFreeResult {
  SubsetWeights weights;
  ResidualPolynomial poly;  // values grid: the instance spectrum
};

/// Same machinery on the clean projections p (noise-free measure mu);
/// coefficients via the moment route on mu.
NoiseFreeResult noise_free_poly(const SpectralDecomposition& decomp, const Eigen::VectorXd& p_clean,
                                int k, std::size_t cap = kDefaultSubsetCap,
                                MomentSolveMode mode = MomentSolveMode::Auto);

/// Entry (k,l) = |<Q_k, Q_l>_mu| / (||Q_k||_mu ||Q_l||_mu), diagonal 0.
Eigen::MatrixXd orthogonality_defect(const std::vector<ResidualPolynomial>& polys,
                                     const DiscreteMeasure& mu);

struct PerturbationGap {
  double gap = 0.0;    // |Qhat_k(lambda_i) - Qhat_k(lambda_i + delta)|
  double bound = 0.0;  // first-order subset bound scaled by delta
};

PerturbationGap perturbation_gap(const SpectralDecomposition& decomp, const Eigen::VectorXd& p_vec,
                                 int k, int index, double delta,
                                 std::size_t cap = kDefaultSubsetCap);

/// max over k-subsets of distinct eigenvalues of prod |1 - lambda_i/lambda_j|;
/// equals the product of the k largest factors.
double value_envelope(const SpectralDecomposition& decomp, int k, int index);

}  // namespace pls
