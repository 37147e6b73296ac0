#include "pls/respoly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>

#include "pls/errors.hpp"
#include "pls/poly.hpp"

namespace pls {

namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Switch the Auto moment solve to exact arithmetic past this condition
/// estimate; the double solve would lose more than ~8 digits there.
constexpr double kMomentAutoSwitch = 1e8;

double subset_count(int s, int k) {
  double c = 1.0;
  for (int t = 0; t < k; ++t) c = c * static_cast<double>(s - t) / static_cast<double>(t + 1);
  return c;
}

bool next_combination(std::vector<int>& comb, int s) {
  const int k = static_cast<int>(comb.size());
  for (int i = k - 1; i >= 0; --i) {
    if (comb[i] < s - (k - i)) {
      ++comb[i];
      for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<Rational> solve_rational_system(std::vector<std::vector<Rational>> A,
                                            std::vector<Rational> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int row = col; row < n; ++row) {
      if (A[row][col] != 0) {
        pivot = row;
        break;
      }
    }
    if (pivot < 0) throw NumericalError("singular moment system");
    std::swap(A[col], A[pivot]);
    std::swap(b[col], b[pivot]);
    for (int row = col + 1; row < n; ++row) {
      if (A[row][col] == 0) continue;
      const Rational f = A[row][col] / A[col][col];
      for (int j = col; j < n; ++j) A[row][j] -= f * A[col][j];
      b[row] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (int row = n - 1; row >= 0; --row) {
    Rational acc = b[row];
    for (int j = row + 1; j < n; ++j) acc -= A[row][j] * x[j];
    x[row] = acc / A[row][row];
  }
  return x;
}

int count_positive(const DiscreteMeasure& mu) {
  int s = 0;
  for (Eigen::Index j = 0; j < mu.points(); ++j) {
    if (mu.masses(j) > 0.0) ++s;
  }
  return s;
}

}  // namespace

double evaluate(const ResidualPolynomial& poly, double x) {
  if (!poly.has_coefficients()) throw ValidationError("polynomial has no coefficients");
  double acc = poly.coefficients(poly.coefficients.size() - 1);
  for (Eigen::Index j = poly.coefficients.size() - 1; j-- > 0;) {
    acc = acc * x + poly.coefficients(j);
  }
  return acc;
}

ResidualPolynomial residual_poly_from_fit(const PlsPath& path, const SpectralProjections& proj,
                                          int k) {
  if (k < 1 || k > path.k_max) {
    throw ValidationError("residual_poly_from_fit: k = " + std::to_string(k) +
                          " outside the fitted path (k_max = " + std::to_string(path.k_max) + ")");
  }
  const Eigen::Index r = proj.p_hat.size();
  if (path.residual_projections.cols() != r) {
    throw ValidationError("residual_poly_from_fit: projection size mismatch");
  }
  const double threshold = kRelevanceTol * proj.y_norm;

  ResidualPolynomial poly;
  poly.degree = k;
  poly.values_on_spectrum.resize(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const double ph = proj.p_hat(i);
    poly.values_on_spectrum(i) =
        std::abs(ph) > threshold ? path.residual_projections(k - 1, i) / ph : kNaN;
  }

  // One interpolation node per relevant tie group, carried by the member
  // with the largest |p_hat|.
  std::vector<std::pair<double, double>> pool;  // (lambda, value)
  Eigen::Index i = 0;
  while (i < r) {
    const double head = proj.eigenvalues(i);
    double group_mass = 0.0, best = 0.0;
    Eigen::Index best_at = i, j = i;
    while (j < r && head - proj.eigenvalues(j) <= kTieTol * head) {
      group_mass += proj.p_hat(j) * proj.p_hat(j);
      if (std::abs(proj.p_hat(j)) > best) {
        best = std::abs(proj.p_hat(j));
        best_at = j;
      }
      ++j;
    }
    if (std::sqrt(group_mass) > threshold) {
      pool.emplace_back(proj.eigenvalues(best_at), poly.values_on_spectrum(best_at));
    }
    i = j;
  }

  if (static_cast<int>(pool.size()) >= k + 1) {
    // Greedy well-separated node selection, relaxing the separation until k
    // nodes fit; the pool is sorted by descending eigenvalue already.
    std::vector<std::pair<double, double>> nodes;
    for (double sep = 0.05; nodes.size() < static_cast<std::size_t>(k); sep *= 0.25) {
      nodes.clear();
      for (const auto& cand : pool) {
        bool ok = true;
        for (const auto& acc : nodes) {
          if (std::abs(acc.first - cand.first) < sep * acc.first) {
            ok = false;
            break;
          }
        }
        if (ok) nodes.push_back(cand);
        if (nodes.size() == static_cast<std::size_t>(k)) break;
      }
      if (sep < kTieTol) break;
    }
    if (nodes.size() == static_cast<std::size_t>(k)) {
      std::vector<double> xs(1, 0.0), ys(1, 1.0);
      for (const auto& nd : nodes) {
        xs.push_back(nd.first);
        ys.push_back(nd.second);
      }
      const std::vector<double> coeffs = newton_interpolate<double>(xs, ys);
      poly.coefficients = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), coeffs.size());
      for (Eigen::Index t = 0; t < r; ++t) {
        if (std::isnan(poly.values_on_spectrum(t))) {
          poly.values_on_spectrum(t) = evaluate(poly, proj.eigenvalues(t));
        }
      }
    }
  }
  return poly;
}

ResidualPolynomial residual_poly_moments(const DiscreteMeasure& mu, int k, MomentSolveMode mode,
                                         double cond_tol) {
  if (k < 1) throw ValidationError("residual_poly_moments: k must be >= 1");
  if (cond_tol <= 0) throw ValidationError("residual_poly_moments: cond_tol must be positive");
  const int s_pos = count_positive(mu);
  if (k > s_pos) {
    throw ValidationError("residual_poly_moments: degree " + std::to_string(k) +
                          " exceeds the " + std::to_string(s_pos) +
                          " positive-mass support points");
  }

  // Hankel system in the scaled variable x/lambda_max for a balanced
  // condition estimate.
  const double scale = mu.support(0);
  Eigen::VectorXd msc(2 * k);
  {
    Eigen::VectorXd pw = Eigen::VectorXd::Ones(mu.points());
    const Eigen::ArrayXd scaled = mu.support.array() / scale;
    for (int j = 0; j < 2 * k; ++j) {
      msc(j) = (mu.masses.array() * pw.array()).sum();
      pw.array() *= scaled;
    }
  }
  Eigen::MatrixXd H(k, k);
  Eigen::VectorXd rhs(k);
  for (int row = 0; row < k; ++row) {
    for (int col = 0; col < k; ++col) H(row, col) = msc(row + col + 1);
    rhs(row) = -msc(row);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
  const double smin = svd.singularValues()(k - 1);
  const double cond = smin > 0 ? svd.singularValues()(0) / smin
                               : std::numeric_limits<double>::infinity();
  if (mode == MomentSolveMode::Double && cond > 1.0 / cond_tol) {
    throw IllConditionedMomentsError(k, cond);
  }
  const bool rational =
      mode == MomentSolveMode::Rational || (mode == MomentSolveMode::Auto && cond > kMomentAutoSwitch);

  ResidualPolynomial poly;
  poly.degree = k;
  poly.coefficients.resize(k + 1);
  poly.coefficients(0) = 1.0;
  poly.values_on_spectrum.resize(mu.points());

  if (!rational) {
    Eigen::JacobiSVD<Eigen::MatrixXd> solver(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd alpha_scaled = solver.solve(rhs);
    double pw = 1.0;
    for (int l = 1; l <= k; ++l) {
      pw /= scale;
      poly.coefficients(l) = alpha_scaled(l - 1) * pw;
    }
    for (Eigen::Index j = 0; j < mu.points(); ++j) {
      poly.values_on_spectrum(j) = evaluate(poly, mu.support(j));
    }
    return poly;
  }

  // Exact path: the support/mass doubles are binary rationals, so the
  // moments, the Hankel solve and the support values are all exact.
  const int s = static_cast<int>(mu.points());
  std::vector<Rational> lam(s), mass(s);
  for (int j = 0; j < s; ++j) {
    lam[j] = Rational(mu.support(j));
    mass[j] = Rational(mu.masses(j));
  }
  std::vector<Rational> m(2 * k);
  {
    std::vector<Rational> pw(s, Rational(1));
    for (int j = 0; j < 2 * k; ++j) {
      Rational acc(0);
      for (int t = 0; t < s; ++t) acc += mass[t] * pw[t];
      m[j] = acc;
      for (int t = 0; t < s; ++t) pw[t] *= lam[t];
    }
  }
  std::vector<std::vector<Rational>> A(k, std::vector<Rational>(k));
  std::vector<Rational> b(k);
  for (int row = 0; row < k; ++row) {
    for (int col = 0; col < k; ++col) A[row][col] = m[row + col + 1];
    b[row] = -m[row];
  }
  const std::vector<Rational> alpha = solve_rational_system(std::move(A), std::move(b));
  std::vector<Rational> coeffs(k + 1);
  coeffs[0] = Rational(1);
  for (int l = 1; l <= k; ++l) {
    coeffs[l] = alpha[l - 1];
    poly.coefficients(l) = static_cast<double>(coeffs[l]);
  }
  for (int j = 0; j < s; ++j) {
    poly.values_on_spectrum(j) = static_cast<double>(horner(coeffs, lam[j]));
  }
  return poly;
}

VandermondeResult residual_values_vandermonde(const SpectralDecomposition& decomp,
                                              const Eigen::VectorXd& p_vec, int k,
                                              std::size_t cap) {
  if (k < 1) throw ValidationError("residual_values_vandermonde: k must be >= 1");
  const Eigen::Index r = decomp.rank();
  if (k > r) throw ValidationError("residual_values_vandermonde: k exceeds the rank");
  const DiscreteMeasure mu = build_measure(decomp, p_vec);

  std::vector<int> pos;
  for (Eigen::Index j = 0; j < mu.points(); ++j) {
    if (mu.masses(j) > 0.0) pos.push_back(static_cast<int>(j));
  }
  const int s = static_cast<int>(pos.size());

  VandermondeResult out;
  out.values = Eigen::VectorXd::Zero(r);
  if (s < k) return out;  // fewer than k distinct relevant eigenvalues: all residuals vanish

  const double count = subset_count(s, k);
  if (count > static_cast<double>(cap)) {
    throw CombinatorialCapError(static_cast<std::size_t>(count), cap);
  }

  // log D per subset keeps the Vandermonde-squared products representable.
  Eigen::VectorXd log_factor(s);
  for (int a = 0; a < s; ++a) {
    log_factor(a) = std::log(mu.masses(pos[a])) + std::log(mu.support(pos[a]));
  }
  Eigen::MatrixXd log_gap(s, s);
  for (int a = 0; a < s; ++a) {
    for (int b = a + 1; b < s; ++b) {
      log_gap(a, b) = std::log(std::abs(mu.support(pos[a]) - mu.support(pos[b])));
    }
  }

  std::vector<int> comb(k);
  for (int t = 0; t < k; ++t) comb[t] = t;
  std::vector<double> log_d;
  log_d.reserve(static_cast<std::size_t>(count));
  do {
    double ld = 0.0;
    for (int a = 0; a < k; ++a) {
      ld += log_factor(comb[a]);
      for (int b = a + 1; b < k; ++b) ld += 2.0 * log_gap(comb[a], comb[b]);
    }
    log_d.push_back(ld);
    std::vector<int> subset(k);
    for (int t = 0; t < k; ++t) subset[t] = pos[comb[t]];
    out.weights.index_subsets.push_back(std::move(subset));
  } while (next_combination(comb, s));

  const double log_max = *std::max_element(log_d.begin(), log_d.end());
  out.weights.weights.resize(static_cast<Eigen::Index>(log_d.size()));
  for (std::size_t t = 0; t < log_d.size(); ++t) {
    out.weights.weights(static_cast<Eigen::Index>(t)) = std::exp(log_d[t] - log_max);
  }
  out.weights.weights /= out.weights.weights.sum();

  for (std::size_t t = 0; t < out.weights.index_subsets.size(); ++t) {
    const double w = out.weights.weights(static_cast<Eigen::Index>(t));
    const std::vector<int>& subset = out.weights.index_subsets[t];
    for (Eigen::Index i = 0; i < r; ++i) {
      double g = 1.0;
      for (int j : subset) g *= 1.0 - decomp.eigenvalues(i) / mu.support(j);
      out.values(i) += w * g;
    }
  }
  return out;
}

double evaluate_from_weights(const SubsetWeights& weights, const DiscreteMeasure& mu, double x) {
  double value = 0.0;
  for (std::size_t t = 0; t < weights.index_subsets.size(); ++t) {
    double g = 1.0;
    for (int j : weights.index_subsets[t]) g *= 1.0 - x / mu.support(j);
    value += weights.weights(static_cast<Eigen::Index>(t)) * g;
  }
  return value;
}

NoiseFreeResult noise_free_poly(const SpectralDecomposition& decomp, const Eigen::VectorXd& p_clean,
                                int k, std::size_t cap, MomentSolveMode mode) {
  NoiseFreeResult out;
  VandermondeResult vr = residual_values_vandermonde(decomp, p_clean, k, cap);
  out.weights = std::move(vr.weights);
  out.poly.degree = k;
  out.poly.values_on_spectrum = std::move(vr.values);
  const DiscreteMeasure mu = build_measure(decomp, p_clean);
  if (k <= count_positive(mu)) {
    ResidualPolynomial from_moments = residual_poly_moments(mu, k, mode);
    out.poly.coefficients = std::move(from_moments.coefficients);
  }
  return out;
}

Eigen::MatrixXd orthogonality_defect(const std::vector<ResidualPolynomial>& polys,
                                     const DiscreteMeasure& mu) {
  const Eigen::Index m = static_cast<Eigen::Index>(polys.size());
  Eigen::MatrixXd values(m, mu.points());
  for (Eigen::Index a = 0; a < m; ++a) {
    if (!polys[a].has_coefficients()) {
      throw ValidationError("orthogonality_defect: polynomial " + std::to_string(a) +
                            " has no coefficients");
    }
    for (Eigen::Index j = 0; j < mu.points(); ++j) {
      values(a, j) = evaluate(polys[a], mu.support(j));
    }
  }
  Eigen::VectorXd norms(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    norms(a) = std::sqrt((mu.masses.array() * values.row(a).transpose().array().square()).sum());
  }
  Eigen::MatrixXd defect = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const double dot =
          (mu.masses.array() * values.row(a).transpose().array() * values.row(b).transpose().array())
              .sum();
      const double d = std::abs(dot) / (norms(a) * norms(b));
      defect(a, b) = d;
      defect(b, a) = d;
    }
  }
  return defect;
}

PerturbationGap perturbation_gap(const SpectralDecomposition& decomp, const Eigen::VectorXd& p_vec,
                                 int k, int index, double delta, std::size_t cap) {
  const Eigen::Index r = decomp.rank();
  if (index < 0 || index >= r) throw ValidationError("perturbation_gap: index out of range");
  const double lam = decomp.eigenvalues(index);
  if (lam + delta <= 0) throw ValidationError("perturbation_gap: perturbed eigenvalue not positive");

  const DiscreteMeasure mu = build_measure(decomp, p_vec);
  const VandermondeResult vr = residual_values_vandermonde(decomp, p_vec, k, cap);

  PerturbationGap out;
  out.gap = std::abs(evaluate_from_weights(vr.weights, mu, lam) -
                     evaluate_from_weights(vr.weights, mu, lam + delta));

  const int s = static_cast<int>(mu.points());
  if (s >= k) {
    const double count = subset_count(s, k);
    if (count > static_cast<double>(cap)) {
      throw CombinatorialCapError(static_cast<std::size_t>(count), cap);
    }
    std::vector<int> comb(k);
    for (int t = 0; t < k; ++t) comb[t] = t;
    double worst = 0.0;
    do {
      double term = 0.0;
      for (int l = 0; l < k; ++l) {
        double prod = 1.0;
        for (int mpos = 0; mpos < k; ++mpos) {
          if (mpos == l) continue;
          prod *= std::abs(1.0 - lam / mu.support(comb[mpos]));
        }
        term += prod / mu.support(comb[l]);
      }
      worst = std::max(worst, term);
    } while (next_combination(comb, s));
    out.bound = std::abs(delta) * worst;
  }
  return out;
}

double value_envelope(const SpectralDecomposition& decomp, int k, int index) {
  if (k < 1) throw ValidationError("value_envelope: k must be >= 1");
  const Eigen::Index r = decomp.rank();
  if (index < 0 || index >= r) throw ValidationError("value_envelope: index out of range");
  const double lam = decomp.eigenvalues(index);

  // Distinct support points (ties merged), no mass involved.
  std::vector<double> factors;
  Eigen::Index i = 0;
  while (i < r) {
    const double head = decomp.eigenvalues(i);
    double weighted = 0.0, count = 0.0;
    Eigen::Index j = i;
    while (j < r && head - decomp.eigenvalues(j) <= kTieTol * head) {
      weighted += decomp.eigenvalues(j);
      count += 1.0;
      ++j;
    }
    factors.push_back(std::abs(1.0 - lam / (weighted / count)));
    i = j;
  }
  if (static_cast<int>(factors.size()) < k) return 0.0;
  // The max over k-subsets of a product of fixed nonnegative factors is the
  // product of the k largest.
  std::sort(factors.begin(), factors.end(), std::greater<double>());
  double prod = 1.0;
  for (int t = 0; t < k; ++t) prod *= factors[static_cast<std::size_t>(t)];
  return prod;
}

}  // namespace pls
