#include "pls/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pls/bounds.hpp"
#include "pls/errors.hpp"
#include "pls/format.hpp"
#include "pls/pls.hpp"
#include "pls/respoly.hpp"
#include "pls/rng.hpp"

namespace pls {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::MatrixXd haar_orthonormal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Eigen::MatrixXd g(rows, cols);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  // Positive R diagonal keeps the distribution Haar and the draw deterministic.
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (qr.matrixQR()(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

struct Instance {
  DesignMatrix X;
  SpectralDecomposition decomp;
  Eigen::VectorXd beta_star;
  Eigen::VectorXd signal;  // X beta*
};

Instance build_instance(const ExperimentConfig& config) {
  if (config.reps < 1) throw ValidationError("reps must be >= 1");
  for (int k : config.k_range) {
    if (k < 1) throw ValidationError("k_range entries must be >= 1");
  }
  for (double s : config.noise_levels) {
    if (s < 0) throw ValidationError("noise levels must be >= 0");
  }
  DesignMatrix X = generate_design(config.spectrum, config.n, config.p, config.seed);
  SpectralDecomposition decomp = decompose(X);
  auto rng = make_rng(config.seed, 1);
  Eigen::VectorXd beta_star = make_beta(config.beta, decomp, rng);
  Eigen::VectorXd signal = X.entries * beta_star;
  return Instance{std::move(X), std::move(decomp), std::move(beta_star), std::move(signal)};
}

std::uint64_t rep_stream(std::size_t sigma_index, int rep) {
  return (static_cast<std::uint64_t>(sigma_index + 2) << 32) | static_cast<std::uint32_t>(rep);
}

void mean_and_se(const std::vector<double>& xs, double& mean, double& se) {
  const double n = static_cast<double>(xs.size());
  mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) {
    se = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

}  // namespace

int SpectrumSpec::size() const {
  switch (kind) {
    case Kind::Explicit:
      return static_cast<int>(values.size());
    case Kind::Clusters:
      return std::accumulate(counts.begin(), counts.end(), 0);
    case Kind::Gap:
      return gap_count + rest_count;
  }
  return 0;
}

Eigen::VectorXd make_eigenvalues(const SpectrumSpec& spec, std::mt19937_64& rng) {
  std::vector<double> values;
  switch (spec.kind) {
    case SpectrumSpec::Kind::Explicit: {
      if (spec.values.size() == 0) throw ValidationError("explicit spectrum is empty");
      values.assign(spec.values.data(), spec.values.data() + spec.values.size());
      break;
    }
    case SpectrumSpec::Kind::Clusters: {
      if (spec.centers.size() == 0 ||
          spec.counts.size() != static_cast<std::size_t>(spec.centers.size())) {
        throw ValidationError("clusters spectrum needs matching centers and counts");
      }
      if (spec.spread < 0) throw ValidationError("cluster spread must be >= 0");
      std::vector<double> centers(spec.centers.data(), spec.centers.data() + spec.centers.size());
      std::vector<int> order(centers.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return centers[a] > centers[b]; });
      for (std::size_t t = 0; t + 1 < order.size(); ++t) {
        const double big = centers[order[t]], small = centers[order[t + 1]];
        if (spec.spread * big >= 0.5 * (big - small)) {
          throw ValidationError("cluster spread " + format_double(spec.spread) +
                                " reaches half the gap between centers " + format_double(big) +
                                " and " + format_double(small));
        }
      }
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (Eigen::Index c = 0; c < spec.centers.size(); ++c) {
        for (int t = 0; t < spec.counts[static_cast<std::size_t>(c)]; ++t) {
          values.push_back(spec.centers(c) * (1.0 + spec.spread * u(rng)));
        }
      }
      break;
    }
    case SpectrumSpec::Kind::Gap: {
      if (spec.gap_count < 1 || spec.rest_count < 0) {
        throw ValidationError("gap spectrum needs gap_count >= 1 and rest_count >= 0");
      }
      if (!(0 < spec.rest_low && spec.rest_low <= spec.rest_high && spec.rest_high < spec.gap_low &&
            spec.gap_low <= spec.gap_high)) {
        throw ValidationError("gap spectrum bands must satisfy 0 < rest <= gap bands");
      }
      std::uniform_real_distribution<double> top(spec.gap_low, spec.gap_high);
      std::uniform_real_distribution<double> low(spec.rest_low, spec.rest_high);
      for (int t = 0; t < spec.gap_count; ++t) values.push_back(top(rng));
      for (int t = 0; t < spec.rest_count; ++t) values.push_back(low(rng));
      break;
    }
  }
  for (double v : values) {
    if (!(v > 0) || !std::isfinite(v)) throw ValidationError("spectrum values must be positive and finite");
  }
  std::sort(values.begin(), values.end(), std::greater<double>());
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::VectorXd make_beta(const BetaSpec& spec, const SpectralDecomposition& decomp,
                          std::mt19937_64& rng) {
  const Eigen::Index r = decomp.rank();
  const Eigen::Index p = decomp.predictors();
  switch (spec.kind) {
    case BetaSpec::Kind::EqualWeight: {
      const Eigen::VectorXd w =
          Eigen::VectorXd::Constant(r, 1.0 / std::sqrt(static_cast<double>(r)));
      return decomp.right_vectors * w;
    }
    case BetaSpec::Kind::RandomUnit: {
      const Eigen::VectorXd g = gaussian_vector(rng, p);
      return g / g.norm();
    }
    case BetaSpec::Kind::Aligned: {
      Eigen::VectorXd w = decomp.eigenvalues.array().pow(spec.align_power);
      w /= w.norm();
      return decomp.right_vectors * w;
    }
    case BetaSpec::Kind::Fixed: {
      if (spec.fixed.size() != p) {
        throw ValidationError("fixed beta has " + std::to_string(spec.fixed.size()) +
                              " entries, design has p = " + std::to_string(p));
      }
      return spec.fixed;
    }
  }
  throw ValidationError("unknown beta kind");
}

DesignMatrix generate_design(const SpectrumSpec& spec, int n, int p, std::uint64_t seed) {
  const int r = spec.size();
  if (r < 1) throw ValidationError("spectrum is empty");
  if (r > std::min(n, p)) {
    throw ValidationError("spectrum size " + std::to_string(r) + " exceeds min(n, p) = " +
                          std::to_string(std::min(n, p)));
  }
  auto rng = make_rng(seed, 0);
  const Eigen::VectorXd lambdas = make_eigenvalues(spec, rng);
  const Eigen::MatrixXd u = haar_orthonormal(n, r, rng);
  const Eigen::MatrixXd v = haar_orthonormal(p, r, rng);
  return DesignMatrix(u * lambdas.array().sqrt().matrix().asDiagonal() * v.transpose());
}

RunRecord run_risk_study(const ExperimentConfig& config) {
  const Instance inst = build_instance(config);
  const int k_max = *std::max_element(config.k_range.begin(), config.k_range.end());
  const double n = static_cast<double>(config.n);

  RunRecord rec;
  rec.study = "risk";
  rec.config_hash = fnv1a(config_to_text(config));
  for (std::size_t si = 0; si < config.noise_levels.size(); ++si) {
    const double sigma = config.noise_levels[si];
    std::vector<std::vector<double>> risks(config.k_range.size());
    for (int rep = 0; rep < config.reps; ++rep) {
      auto rng = make_rng(config.seed, rep_stream(si, rep));
      const Eigen::VectorXd y = inst.signal + gaussian_vector(rng, config.n, sigma);
      const PlsPath path = pls_fit(inst.X, inst.decomp, y, k_max);
      for (std::size_t j = 0; j < config.k_range.size(); ++j) {
        const int kk = std::min(config.k_range[j], path.k_max);
        const double rn = path.residual_norms[static_cast<std::size_t>(kk - 1)];
        risks[j].push_back(rn * rn / n);
      }
    }
    for (std::size_t j = 0; j < config.k_range.size(); ++j) {
      const int k = config.k_range[j];
      const RiskBound rb = empirical_risk_bound(inst.decomp, inst.beta_star, sigma * sigma, k);
      CellAggregate cell;
      cell.sigma = sigma;
      cell.k = k;
      cell.reps = config.reps;
      mean_and_se(risks[j], cell.mean, cell.se);
      cell.chem_factor = rb.chem_factor;
      cell.bound = rb.bound;
      rec.cells.push_back(cell);
    }
  }
  return rec;
}

RunRecord run_prediction_study(const ExperimentConfig& config) {
  const Instance inst = build_instance(config);
  const int k_max = *std::max_element(config.k_range.begin(), config.k_range.end());
  const double n = static_cast<double>(config.n);
  const Eigen::Index r = inst.decomp.rank();

  // Noise-free reference fit: Q*_k values along the spectrum.
  const PlsPath clean_path = pls_fit(inst.X, inst.decomp, inst.signal, k_max);
  const Eigen::VectorXd p_clean = clean_path.projections.p_hat;
  const double min_p2 = p_clean.array().square().minCoeff();

  RunRecord rec;
  rec.study = "prediction";
  rec.config_hash = fnv1a(config_to_text(config));
  for (std::size_t si = 0; si < config.noise_levels.size(); ++si) {
    const double sigma = config.noise_levels[si];
    const std::size_t nk = config.k_range.size();
    std::vector<std::vector<double>> preds(nk), t1s(nk), t2s(nk);
    std::vector<double> viol(nk, 0.0), qgap(nk, 0.0);
    for (int rep = 0; rep < config.reps; ++rep) {
      auto rng = make_rng(config.seed, rep_stream(si, rep));
      const Eigen::VectorXd y = inst.signal + gaussian_vector(rng, config.n, sigma);
      const PlsPath path = pls_fit(inst.X, inst.decomp, y, k_max);
      const Eigen::VectorXd& p_hat = path.projections.p_hat;
      for (std::size_t j = 0; j < nk; ++j) {
        const int kk = std::min(config.k_range[j], path.k_max);
        const int ks = std::min(config.k_range[j], clean_path.k_max);
        const Eigen::VectorXd diff = inst.signal - path.fitted[static_cast<std::size_t>(kk - 1)];
        const double pred = diff.squaredNorm() / n;
        preds[j].push_back(pred);

        double s1 = 0.0, s2 = 0.0, gap = 0.0;
        for (Eigen::Index i = 0; i < r; ++i) {
          const double qs = clean_path.residual_values(ks - 1, i);
          const double t1 = p_clean(i) - p_hat(i) + qs * p_hat(i);
          const double t2 = path.residual_projections(kk - 1, i) - qs * p_hat(i);
          s1 += t1 * t1;
          s2 += t2 * t2;
          const double qh = path.residual_values(kk - 1, i);
          if (!std::isnan(qh) && !std::isnan(qs)) gap = std::max(gap, std::abs(qh - qs));
        }
        t1s[j].push_back(2.0 * s1 / n);
        t2s[j].push_back(2.0 * s2 / n);
        viol[j] = std::max(viol[j], pred - (2.0 * s1 / n + 2.0 * s2 / n));
        qgap[j] = std::max(qgap[j], gap);
      }
    }
    for (std::size_t j = 0; j < nk; ++j) {
      const int k = config.k_range[j];
      CellAggregate cell;
      cell.sigma = sigma;
      cell.k = k;
      cell.reps = config.reps;
      mean_and_se(preds[j], cell.mean, cell.se);
      double dummy_se = 0.0;
      mean_and_se(t1s[j], cell.mean_eq12_term1, dummy_se);
      mean_and_se(t2s[j], cell.mean_eq12_term2, dummy_se);
      cell.max_eq12_violation = viol[j];
      cell.max_qstar_gap = qgap[j];
      cell.chem_factor = chebyshev_convergence_factor(condition_ratio(inst.decomp), 2 * k);
      if (min_p2 > 0) {
        const SpectralProjections proj = project(inst.decomp, inst.signal, inst.beta_star);
        BoundConstants constants;
        constants.L = min_p2;
        const PredictionBound pb = prediction_error_bound(inst.decomp, proj, k, constants, config.n);
        cell.bound = pb.term_regularization + pb.term_subspace;
      } else {
        cell.bound = kNaN;
      }
      rec.cells.push_back(cell);
    }
  }
  return rec;
}

ResidualPathTable run_residual_path(const ExperimentConfig& config,
                                    const std::vector<int>& direction_indices) {
  const Instance inst = build_instance(config);
  const int k_max = *std::max_element(config.k_range.begin(), config.k_range.end());
  const Eigen::Index r = inst.decomp.rank();

  std::vector<int> dirs = direction_indices;
  if (dirs.empty()) dirs = {0, static_cast<int>(r - 1)};
  for (int d : dirs) {
    if (d < 0 || d >= r) {
      throw ValidationError("direction index " + std::to_string(d) + " outside spectrum of size " +
                            std::to_string(r));
    }
  }

  const double sigma = config.noise_levels.empty() ? 0.0 : config.noise_levels.front();
  auto rng = make_rng(config.seed, rep_stream(0, 0));
  const Eigen::VectorXd y = inst.signal + gaussian_vector(rng, config.n, sigma);
  const PlsPath path = pls_fit(inst.X, inst.decomp, y, k_max);

  ResidualPathTable table;
  table.direction_indices = dirs;
  table.eigenvalues.resize(static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    table.eigenvalues(static_cast<Eigen::Index>(d)) = inst.decomp.eigenvalues(dirs[d]);
  }
  table.values.resize(path.k_max, static_cast<Eigen::Index>(dirs.size()));
  table.value_at_zero.resize(path.k_max);
  table.crosscheck_max_diff = Eigen::VectorXd::Constant(path.k_max, kNaN);
  table.crosscheck_available = true;

  for (int k = 1; k <= path.k_max; ++k) {
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      table.values(k - 1, static_cast<Eigen::Index>(d)) = path.residual_values(k - 1, dirs[d]);
    }
    const ResidualPolynomial poly = residual_poly_from_fit(path, path.projections, k);
    table.value_at_zero(k - 1) = poly.has_coefficients() ? poly.coefficients(0) : 1.0;
    try {
      const VandermondeResult vr =
          residual_values_vandermonde(inst.decomp, path.projections.p_hat, k);
      double worst = 0.0;
      for (Eigen::Index i = 0; i < r; ++i) {
        const double fit_value = path.residual_values(k - 1, i);
        if (!std::isnan(fit_value)) worst = std::max(worst, std::abs(fit_value - vr.values(i)));
      }
      table.crosscheck_max_diff(k - 1) = worst;
    } catch (const CombinatorialCapError&) {
      table.crosscheck_available = false;  // flagged: fit route only at this k
    }
  }
  return table;
}

}  // namespace pls
