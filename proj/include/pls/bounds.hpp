#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "pls/spectral.hpp"

namespace pls {

/// Right side of the expected-MSE bound:
/// ((sqrt(C)-1)/(sqrt(C)+1))^{2k} * (||X beta*||^2/n + sigma^2).
struct RiskBound {
  int k = 0;
  double chem_factor = 0.0;  // ((sqrt(C)-1)/(sqrt(C)+1))^{2k}
  double signal = 0.0;       // ||X beta*||^2 / n
  double noise_var = 0.0;    // sigma^2
  double bound = 0.0;
};

RiskBound empirical_risk_bound(const SpectralDecomposition& decomp,
                               const Eigen::VectorXd& beta_star, double sigma2, int k);

/// Convergence factor ((sqrt(C)-1)/(sqrt(C)+1))^k for C = lambda_1/lambda_r.
double chebyshev_convergence_factor(double condition, int k);

/// Constants of the prediction-error bound. C > 1 is the concentration
/// constant, C_tilde the unspecified comparison constant, L the uniform
/// lower bound on the squared clean projections (H.2).
struct BoundConstants {
  double C = 2.0;
  double C_tilde = 1.0;
  double L = 0.0;  // must be set positive by the caller
};

struct PredictionBound {
  int k = 0;
  double term_regularization = 0.0;     // first bracket x ||X beta*||^2 / n
  double term_subspace = 0.0;           // second term, squared concentration factor
  double term_subspace_linear = 0.0;    // proof variant with the unsquared factor
  Eigen::VectorXd W_diagonal;           // max over subsets of prod |lambda_i/lambda_j - 1|^2
  BoundConstants constants;
};

/// Requires H.2: every clean projection satisfies p_i^2 >= L > 0.
PredictionBound prediction_error_bound(const SpectralDecomposition& decomp,
                                       const SpectralProjections& proj, int k,
                                       const BoundConstants& constants, int n);

/// Fraction of replications with max_i |eps_tilde_i| <= sqrt(log(n)/n),
/// eps_tilde i.i.d. Gaussian(0, sigma_n^2).
double concentration_event_rate(int n, double sigma_n, int reps, std::uint64_t seed);

/// Exact per-replication probability of the same event; the oracle the
/// simulation is checked against.
double concentration_event_probability(int n, double sigma_n);

}  // namespace pls
