#include "pls/bounds.hpp"

#include <cmath>
#include <string>

#include "pls/errors.hpp"
#include "pls/respoly.hpp"
#include "pls/rng.hpp"

namespace pls {

double chebyshev_convergence_factor(double condition, int k) {
  if (condition < 1.0) throw ValidationError("condition ratio must be >= 1");
  const double s = std::sqrt(condition);
  return std::pow((s - 1.0) / (s + 1.0), k);
}

RiskBound empirical_risk_bound(const SpectralDecomposition& decomp,
                               const Eigen::VectorXd& beta_star, double sigma2, int k) {
  if (k < 1) throw ValidationError("empirical_risk_bound: k must be >= 1");
  if (sigma2 < 0) throw ValidationError("empirical_risk_bound: sigma2 must be nonnegative");
  if (beta_star.size() != decomp.predictors()) {
    throw ValidationError("empirical_risk_bound: beta* dimension mismatch");
  }
  RiskBound rb;
  rb.k = k;
  rb.chem_factor = chebyshev_convergence_factor(condition_ratio(decomp), 2 * k);
  const Eigen::VectorXd beta_tilde = decomp.right_vectors.transpose() * beta_star;
  const double signal_total = (decomp.eigenvalues.array() * beta_tilde.array().square()).sum();
  rb.signal = signal_total / static_cast<double>(decomp.observations());
  rb.noise_var = sigma2;
  rb.bound = rb.chem_factor * (rb.signal + rb.noise_var);
  return rb;
}

PredictionBound prediction_error_bound(const SpectralDecomposition& decomp,
                                       const SpectralProjections& proj, int k,
                                       const BoundConstants& constants, int n) {
  if (k < 1) throw ValidationError("prediction_error_bound: k must be >= 1");
  if (n < 2) throw ValidationError("prediction_error_bound: n must be >= 2");
  if (!proj.p_clean) {
    throw ValidationError("prediction_error_bound: clean projections p_i are required");
  }
  const Eigen::VectorXd& p = *proj.p_clean;
  if (constants.L <= 0) throw ValidationError("H.2 violated: L must be positive");
  std::string offenders;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) * p(i) < constants.L) offenders += " " + std::to_string(i + 1);
  }
  if (!offenders.empty()) {
    throw ValidationError("H.2 violated: p_i^2 < L at indices" + offenders);
  }

  PredictionBound pb;
  pb.k = k;
  pb.constants = constants;
  const double nn = static_cast<double>(n);
  const double logn = std::log(nn);
  const double chem2k = chebyshev_convergence_factor(condition_ratio(decomp), 2 * k);
  const double signal_total = p.squaredNorm();  // ||X beta*||^2

  pb.term_regularization =
      (2.0 * chem2k + 4.0 * logn / (nn * constants.L) * (1.0 + chem2k)) * signal_total / nn;

  const Eigen::Index r = decomp.rank();
  pb.W_diagonal.resize(r);
  double weighted = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    const double env = value_envelope(decomp, k, static_cast<int>(i));
    pb.W_diagonal(i) = env * env;
    weighted += pb.W_diagonal(i) * p(i) * p(i);
  }
  const double front = 4.0 * k * k * constants.C_tilde * constants.C_tilde / constants.L *
                       logn / (nn * nn);
  const double conc = 1.0 + constants.C * std::sqrt(logn / (nn * constants.L));
  pb.term_subspace = front * conc * conc * weighted;
  pb.term_subspace_linear = front * conc * weighted;
  return pb;
}

double concentration_event_rate(int n, double sigma_n, int reps, std::uint64_t seed) {
  if (reps < 100) throw ValidationError("concentration_event_rate: reps must be >= 100");
  if (n < 2) throw ValidationError("concentration_event_rate: n must be >= 2");
  if (sigma_n < 0) throw ValidationError("concentration_event_rate: sigma_n must be nonnegative");
  const double threshold = std::sqrt(std::log(static_cast<double>(n)) / n);
  int hits = 0;
  for (int rep = 0; rep < reps; ++rep) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(rep));
    const Eigen::VectorXd eps = gaussian_vector(rng, n, sigma_n);
    if (eps.cwiseAbs().maxCoeff() <= threshold) ++hits;
  }
  return static_cast<double>(hits) / reps;
}

double concentration_event_probability(int n, double sigma_n) {
  const double threshold = std::sqrt(std::log(static_cast<double>(n)) / n);
  if (sigma_n == 0.0) return 1.0;
  const double tail = std::erfc(threshold / (sigma_n * std::sqrt(2.0)));
  return std::pow(1.0 - tail, n);
}

}  // namespace pls
