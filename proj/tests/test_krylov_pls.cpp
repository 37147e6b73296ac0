#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "pls/errors.hpp"
#include "pls/krylov.hpp"
#include "pls/pls.hpp"
#include "pls/rng.hpp"
#include "testutil.hpp"

using namespace pls;
using plstest::diag_instance;
using plstest::gaussian_instance;

namespace {

/// Oracle: orthonormal span of the explicitly built power basis
/// [s, Ss, S^2 s, ...] via column-pivoted QR.
Eigen::MatrixXd power_basis_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k) {
  const Eigen::MatrixXd S = X.transpose() * X;
  Eigen::MatrixXd powers(X.cols(), k);
  powers.col(0) = X.transpose() * y;
  for (int j = 1; j < k; ++j) powers.col(j) = S * powers.col(j - 1);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(powers);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(X.cols(), k);
  return q;
}

/// Largest principal angle between equal-dimension spans.
double max_principal_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A.transpose() * B);
  const double c = svd.singularValues().minCoeff();
  return std::acos(std::min(1.0, c));
}

}  // namespace

TEST_CASE("krylov_basis: single eigenvalue terminates at dimension 1") {
  Eigen::VectorXd lam = Eigen::VectorXd::Constant(4, 2.5);
  const auto inst = diag_instance(lam);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
  const KrylovBasis basis = krylov_basis(inst.X.entries, y, 2);
  CHECK(basis.dimension() == 1);
  CHECK(basis.grade_reached);
}

TEST_CASE("krylov_basis: grade equals the number of relevant distinct eigenvalues") {
  Eigen::VectorXd lam(5);
  lam << 9, 9, 4, 4, 1;  // three distinct values
  const auto inst = diag_instance(lam);
  Eigen::VectorXd y(5);
  y << 1, -1, 2, 1, 1;
  const KrylovBasis basis = krylov_basis(inst.X.entries, y, 5);
  CHECK(basis.dimension() == 3);
  CHECK(basis.grade_reached);
}

TEST_CASE("krylov_basis: orthonormal and spans the explicit power basis") {
  auto rng = make_rng(21, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto inst = gaussian_instance(rng, 8, 8);
    const int k = 6;
    const KrylovBasis basis = krylov_basis(inst.X.entries, inst.y, k);
    REQUIRE(basis.dimension() == k);
    CHECK((basis.basis_vectors.transpose() * basis.basis_vectors -
           Eigen::MatrixXd::Identity(k, k))
              .norm() < 1e-10);
    const Eigen::MatrixXd oracle = power_basis_oracle(inst.X.entries, inst.y, k);
    CHECK(max_principal_angle(basis.basis_vectors, oracle) < 1e-7);
  }
}

TEST_CASE("krylov_basis: zero seed") {
  const auto inst = diag_instance(Eigen::Vector2d(4, 1));
  CHECK_THROWS_AS(krylov_basis(inst.X.entries, Eigen::VectorXd::Zero(2), 1), ZeroSeedError);
}

TEST_CASE("pls_fit: exact fit at the grade with full relevance") {
  auto rng = make_rng(33, 0);
  const auto inst = gaussian_instance(rng, 6, 6);
  const Eigen::VectorXd y = inst.y;
  const PlsPath path = pls_fit(inst.X, y, 6);
  REQUIRE(path.k_max == 6);
  CHECK(path.residual_norms.back() <= 1e-8 * y.norm());
}

TEST_CASE("pls_fit: one eigenvalue cluster fits in a single step") {
  Eigen::VectorXd lam = Eigen::VectorXd::Constant(3, 1.7);
  const auto inst = diag_instance(lam);
  const Eigen::VectorXd y = Eigen::Vector3d(1, 2, 3);
  const PlsPath path = pls_fit(inst.X, y, 3);
  CHECK(path.residual_norms[0] <= 1e-10 * y.norm());
  CHECK(path.truncated_at_grade);
}

TEST_CASE("pls_fit: first-step residual matches the univariate oracle") {
  Eigen::VectorXd lam(3);
  lam << 4, 2, 1;
  const auto inst = diag_instance(lam);
  const Eigen::VectorXd y = Eigen::Vector3d(1, 1, 1);
  const PlsPath path = pls_fit(inst.X, y, 1);

  // Oracle: minimize sum (1 - a lambda_i)^2 p_i^2 over the scalar a.
  const double a = (lam.array()).sum() / (lam.array().square()).sum();
  double expected = 0.0;
  for (int i = 0; i < 3; ++i) expected += std::pow(1 - a * lam(i), 2);
  CHECK(expected == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(path.residual_norms[0] * path.residual_norms[0] ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  // Qhat_1(t) = 1 - t/3 along the spectrum.
  CHECK(path.residual_values(0, 0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-9));
  CHECK(path.residual_values(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(path.residual_values(0, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("pls_fit: path invariants on random instances") {
  auto rng = make_rng(55, 0);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 10);
    const int p = 3 + static_cast<int>(rng() % 10);
    const auto inst = gaussian_instance(rng, n, p);
    const PlsPath path = pls_fit(inst.X, inst.y, std::min(n, p));
    const OlsSolution ols = ols_fit(inst.X, inst.y);

    for (int k = 1; k < path.k_max; ++k) {
      CHECK(path.residual_norms[k] <= path.residual_norms[k - 1] + 1e-10);
      CHECK(path.betas[k - 1].norm() <= path.betas[k].norm() + 1e-10);
    }
    CHECK(path.betas.back().norm() <= ols.beta_ols.norm() + 1e-8);

    // Residual orthogonal to the Krylov image.
    const KrylovBasis basis = krylov_basis(inst.X.entries, inst.y, path.k_max);
    for (int k = 1; k <= path.k_max; ++k) {
      const Eigen::VectorXd resid = inst.y - path.fitted[k - 1];
      for (int j = 0; j < k; ++j) {
        const Eigen::VectorXd xb = inst.X.entries * basis.basis_vectors.col(j);
        CHECK(std::abs(resid.dot(xb)) <= 1e-8 * inst.y.norm() * xb.norm());
      }
    }
  }
}

TEST_CASE("pls_fit: scale equivariance in y") {
  auto rng = make_rng(56, 0);
  const auto inst = gaussian_instance(rng, 9, 5);
  const PlsPath a = pls_fit(inst.X, inst.y, 4);
  const PlsPath b = pls_fit(inst.X, 3.5 * inst.y, 4);
  for (int k = 0; k < a.k_max; ++k) {
    CHECK((3.5 * a.betas[k] - b.betas[k]).norm() <= 1e-9 * b.betas[k].norm());
  }
}

TEST_CASE("pls_fit: requesting beyond the grade truncates with a marker") {
  Eigen::VectorXd lam(4);
  lam << 9, 9, 1, 1;
  const auto inst = diag_instance(lam);
  const Eigen::VectorXd y = Eigen::Vector4d(1, 1, 1, 1);
  const PlsPath path = pls_fit(inst.X, y, 4);
  CHECK(path.k_max == 2);
  CHECK(path.truncated_at_grade);
  CHECK(path.grade_reached);
}

TEST_CASE("nipals: scores orthogonal, unit weights, agrees with the Krylov route") {
  auto rng = make_rng(77, 0);
  const auto inst = gaussian_instance(rng, 10, 6);
  const SpectralDecomposition decomp = decompose(inst.X);
  const PlsPath krylov = pls_fit(inst.X, decomp, inst.y, 5);
  const PlsPath nipals = pls_fit_nipals(inst.X, decomp, inst.y, 5);
  REQUIRE(nipals.k_max == krylov.k_max);
  CHECK_FALSE(nipals.orthogonality_warning);
  for (int k = 0; k < krylov.k_max; ++k) {
    CHECK((nipals.betas[k] - krylov.betas[k]).norm() <= 1e-6 * krylov.betas[k].norm());
    CHECK((nipals.fitted[k] - krylov.fitted[k]).norm() <=
          1e-6 * std::max(1.0, krylov.fitted[k].norm()));
  }
}

TEST_CASE("nipals: score orthogonality holds directly") {
  // Recompute the scores as the algorithm does and check t_j' t_l ~ 0.
  auto rng = make_rng(78, 0);
  const auto inst = gaussian_instance(rng, 12, 7);
  Eigen::MatrixXd Xd = inst.X.entries;
  const int K = 5;
  Eigen::MatrixXd T(12, K);
  for (int j = 0; j < K; ++j) {
    Eigen::VectorXd w = Xd.transpose() * inst.y;
    w /= w.norm();
    CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::VectorXd t = Xd * w;
    T.col(j) = t;
    const Eigen::VectorXd pl = Xd.transpose() * t / t.squaredNorm();
    Xd -= t * pl.transpose();
  }
  for (int j = 0; j < K; ++j) {
    for (int l = j + 1; l < K; ++l) {
      CHECK(std::abs(T.col(j).dot(T.col(l))) <= 1e-8 * T.col(j).norm() * T.col(l).norm());
    }
  }
}

TEST_CASE("ols_fit") {
  SUBCASE("identity design returns y") {
    DesignMatrix X(Eigen::MatrixXd::Identity(3, 3));
    const Eigen::VectorXd y = Eigen::Vector3d(0.5, -1, 2);
    const OlsSolution sol = ols_fit(X, y);
    CHECK((sol.beta_ols - y).norm() < 1e-12);
    CHECK(sol.residual_norm < 1e-12);
  }
  SUBCASE("orthogonal columns solve coordinatewise") {
    Eigen::MatrixXd m(4, 2);
    m << 1, 1, 1, -1, 1, 1, 1, -1;
    m.col(1) *= 0.5;
    const DesignMatrix X(m);
    auto rng = make_rng(8, 0);
    const Eigen::VectorXd y = gaussian_vector(rng, 4);
    const OlsSolution sol = ols_fit(X, y);
    for (int j = 0; j < 2; ++j) {
      const double expected = m.col(j).dot(y) / m.col(j).squaredNorm();
      CHECK(sol.beta_ols(j) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
  SUBCASE("normal equations residual and terminal-step agreement") {
    auto rng = make_rng(9, 0);
    const auto inst = gaussian_instance(rng, 7, 7);
    const OlsSolution sol = ols_fit(inst.X, inst.y);
    const Eigen::VectorXd grad =
        inst.X.entries.transpose() * (inst.y - inst.X.entries * sol.beta_ols);
    CHECK(grad.norm() <= 1e-8 * (inst.X.entries.transpose() * inst.y).norm());

    const PlsPath path = pls_fit(inst.X, inst.y, 7);
    REQUIRE(path.k_max == 7);
    CHECK((path.betas.back() - sol.beta_ols).norm() <= 1e-7 * sol.beta_ols.norm());
  }
}

TEST_CASE("filter_factors: exact fit gives factors of one") {
  Eigen::VectorXd lam = Eigen::VectorXd::Constant(3, 2.0);
  const auto inst = diag_instance(lam);
  const Eigen::VectorXd y = Eigen::Vector3d(1, -2, 1);
  const PlsPath path = pls_fit(inst.X, y, 1);
  const Eigen::MatrixXd f = filter_factors(path, path.projections);
  for (int i = 0; i < 3; ++i) CHECK(f(0, i) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("filter_factors: sign pattern and reconstruction") {
  auto rng = make_rng(91, 0);
  for (int trial = 0; trial < 8; ++trial) {
    const int r = 5 + static_cast<int>(rng() % 4);
    const Eigen::VectorXd lam = plstest::separated_spectrum(rng, r);
    const auto inst = diag_instance(lam);
    const Eigen::VectorXd y = plstest::bounded_p_hat(rng, r);
    const PlsPath path = pls_fit(inst.X, y, r);
    REQUIRE(path.k_max == r);
    const Eigen::MatrixXd f = filter_factors(path, path.projections);
    for (int k = 1; k < r; ++k) {
      if (k % 2 == 1) {
        CHECK(f(k - 1, 0) > 1.0);
      } else {
        CHECK(f(k - 1, 0) < 1.0);
      }
      CHECK(f(k - 1, r - 1) > 0.0);
      CHECK(f(k - 1, r - 1) < 1.0);
    }
    // beta_k = sum_i f_i^k (p_hat_i / sqrt(lambda_i)) v_i
    for (int k = 1; k <= r; ++k) {
      Eigen::VectorXd rebuilt = Eigen::VectorXd::Zero(r);
      for (int i = 0; i < r; ++i) {
        rebuilt += f(k - 1, i) * path.projections.p_hat(i) / std::sqrt(lam(i)) *
                   inst.decomp.right_vectors.col(i);
      }
      CHECK((rebuilt - path.betas[k - 1]).norm() <= 1e-7 * path.betas[k - 1].norm());
    }
  }
}

TEST_CASE("filter_factors: undefined where the projection carries no mass") {
  Eigen::VectorXd lam(3);
  lam << 4, 2, 1;
  const auto inst = diag_instance(lam);
  const Eigen::VectorXd y = Eigen::Vector3d(1, 0, 1);
  const PlsPath path = pls_fit(inst.X, y, 2);
  const Eigen::MatrixXd f = filter_factors(path, path.projections);
  CHECK(std::isnan(f(0, 1)));
  CHECK_FALSE(std::isnan(f(0, 0)));
}
