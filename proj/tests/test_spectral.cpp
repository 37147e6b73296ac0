#include <doctest.h>

#include <Eigen/Dense>
#include <sstream>

#include "pls/errors.hpp"
#include "pls/matrix_io.hpp"
#include "pls/spectral.hpp"
#include "testutil.hpp"

using namespace pls;
using plstest::gaussian_instance;

TEST_CASE("decompose: identity design") {
  DesignMatrix X(Eigen::MatrixXd::Identity(3, 3));
  const SpectralDecomposition d = decompose(X);
  CHECK(d.rank() == 3);
  for (int i = 0; i < 3; ++i) CHECK(d.eigenvalues(i) == doctest::Approx(1.0).epsilon(1e-12));
  // Sign convention makes U and V exactly the identity here.
  CHECK((d.left_vectors - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
  CHECK((d.right_vectors - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("decompose: diagonal design") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  const SpectralDecomposition d = decompose(DesignMatrix(m));
  CHECK(d.eigenvalues(0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(d.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((d.left_vectors - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
  CHECK((d.right_vectors - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("decompose: eigenvalues match a symmetric eigensolve of X^T X") {
  auto rng = make_rng(42, 0);
  const auto inst = gaussian_instance(rng, 6, 4);
  const SpectralDecomposition d = decompose(inst.X);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inst.X.entries.transpose() * inst.X.entries);
  Eigen::VectorXd expected = es.eigenvalues().reverse();  // descending
  REQUIRE(d.rank() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(plstest::rel_diff(d.eigenvalues(i), expected(i)) < 1e-8);
  }
}

TEST_CASE("decompose: orthonormality, SVD relations, reconstruction") {
  auto rng = make_rng(7, 0);
  const auto inst = gaussian_instance(rng, 8, 5);
  const SpectralDecomposition d = decompose(inst.X);
  const Eigen::Index r = d.rank();

  CHECK((d.left_vectors.transpose() * d.left_vectors - Eigen::MatrixXd::Identity(r, r)).norm() <
        1e-10);
  CHECK((d.right_vectors.transpose() * d.right_vectors - Eigen::MatrixXd::Identity(r, r)).norm() <
        1e-10);
  const double lambda1 = d.eigenvalues(0);
  for (Eigen::Index i = 0; i < r; ++i) {
    const double root = std::sqrt(d.eigenvalues(i));
    CHECK((inst.X.entries * d.right_vectors.col(i) - root * d.left_vectors.col(i)).norm() <=
          1e-8 * std::sqrt(lambda1));
    CHECK((inst.X.entries.transpose() * d.left_vectors.col(i) - root * d.right_vectors.col(i))
              .norm() <= 1e-8 * std::sqrt(lambda1));
    CHECK((inst.X.entries.transpose() * (inst.X.entries * d.right_vectors.col(i)) -
           d.eigenvalues(i) * d.right_vectors.col(i))
              .norm() <= 1e-8 * lambda1);
  }
  const Eigen::MatrixXd rebuilt = d.left_vectors *
                                  d.eigenvalues.array().sqrt().matrix().asDiagonal() *
                                  d.right_vectors.transpose();
  CHECK((inst.X.entries - rebuilt).norm() <= 1e-8 * inst.X.entries.norm());
}

TEST_CASE("decompose: rank truncation and the zero matrix") {
  Eigen::MatrixXd m(4, 3);
  m.setZero();
  m.col(0) << 1, 2, 3, 4;
  m.col(1) = 2 * m.col(0);
  m.col(2) = -m.col(0);
  const SpectralDecomposition d = decompose(DesignMatrix(m));
  CHECK(d.rank() == 1);

  CHECK_THROWS_AS(decompose(DesignMatrix(Eigen::MatrixXd::Zero(3, 2))), RankDeficientError);
}

TEST_CASE("standardized flag validation") {
  Eigen::MatrixXd m(4, 2);
  m << 1, 2, -1, 0, 1, -2, -1, 0;
  CHECK_THROWS_AS(DesignMatrix(m, true), ValidationError);
  const DesignMatrix s = standardize(m);
  CHECK(s.standardized);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(s.entries.col(j).mean()) < 1e-12);
    CHECK(std::abs(s.entries.col(j).squaredNorm() / 4.0 - 1.0) < 1e-12);
  }
}

TEST_CASE("project: orthonormality cases and the noise split") {
  auto rng = make_rng(3, 0);
  const auto inst = gaussian_instance(rng, 7, 4);
  const SpectralDecomposition d = decompose(inst.X);

  SUBCASE("y equal to the first left vector") {
    const SpectralProjections proj = project(d, d.left_vectors.col(0));
    CHECK(proj.p_hat(0) == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index i = 1; i < d.rank(); ++i) CHECK(std::abs(proj.p_hat(i)) < 1e-12);
  }
  SUBCASE("zero response") {
    const SpectralProjections proj = project(d, Eigen::VectorXd::Zero(7));
    CHECK(proj.p_hat.norm() == 0.0);
  }
  SUBCASE("p_hat = p + eps_tilde when y follows the model") {
    Eigen::VectorXd beta = gaussian_instance(rng, 4, 1).y;
    Eigen::VectorXd eps = 0.1 * gaussian_instance(rng, 7, 1).y;
    const Eigen::VectorXd y = inst.X.entries * beta + eps;
    const SpectralProjections proj = project(d, y, beta, eps);
    REQUIRE(proj.p_clean);
    REQUIRE(proj.eps_tilde);
    REQUIRE(proj.beta_tilde);
    const double scale = 1e-10 * y.norm();
    for (Eigen::Index i = 0; i < d.rank(); ++i) {
      CHECK(std::abs(proj.p_hat(i) - (*proj.p_clean)(i) - (*proj.eps_tilde)(i)) <= scale);
      CHECK(std::abs((*proj.p_clean)(i) -
                     std::sqrt(d.eigenvalues(i)) * (*proj.beta_tilde)(i)) <=
            1e-10 * (inst.X.entries * beta).norm());
    }
  }
  SUBCASE("dimension mismatches") {
    CHECK_THROWS_AS(project(d, Eigen::VectorXd::Zero(6)), ValidationError);
    CHECK_THROWS_AS(project(d, Eigen::VectorXd::Zero(7), Eigen::VectorXd::Zero(5)), ValidationError);
  }
}

TEST_CASE("Parseval: projection mass never exceeds the response norm") {
  auto rng = make_rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = gaussian_instance(rng, 9, 5);
    const SpectralDecomposition d = decompose(inst.X);
    const SpectralProjections proj = project(d, inst.y);
    CHECK(proj.p_hat.squaredNorm() <= inst.y.squaredNorm() * (1 + 1e-12));
    // Equality when the response lies in the column span.
    const Eigen::VectorXd in_span = inst.X.entries * Eigen::VectorXd::Random(5);
    const SpectralProjections proj2 = project(d, in_span);
    CHECK(std::abs(proj2.p_hat.squaredNorm() - in_span.squaredNorm()) <=
          1e-10 * in_span.squaredNorm());
  }
}

TEST_CASE("relevant_count") {
  auto lam3 = Eigen::VectorXd(3);
  lam3 << 4, 2, 1;
  const auto inst = plstest::diag_instance(lam3);

  SUBCASE("all projections relevant") {
    const SpectralProjections proj = project(inst.decomp, Eigen::Vector3d(1, 1, 1));
    CHECK(relevant_count(proj, 0.0) == 3);
  }
  SUBCASE("zero projection drops out at tol = 0") {
    const SpectralProjections proj = project(inst.decomp, Eigen::Vector3d(1, 0, 1));
    CHECK(relevant_count(proj, 0.0) == 2);
  }
  SUBCASE("invariant under positive rescaling of y") {
    auto rng = make_rng(5, 0);
    const SpectralProjections a = project(inst.decomp, Eigen::Vector3d(0.3, -2, 1e-6));
    const SpectralProjections b = project(inst.decomp, 1e3 * Eigen::Vector3d(0.3, -2, 1e-6));
    for (double tol : {0.0, 1e-8, 1e-3}) {
      CHECK(relevant_count(a, tol) == relevant_count(b, tol));
    }
  }
}

TEST_CASE("relevant_count: repeated eigenvalue counts once, matching the Krylov rank") {
  Eigen::VectorXd lam(3);
  lam << 4, 2, 2;
  const auto inst = plstest::diag_instance(lam);
  const Eigen::Vector3d y(1, 1, 1);
  const SpectralProjections proj = project(inst.decomp, y);
  CHECK(relevant_count(proj, 0.0) == 2);

  // Oracle: rank of the explicitly built Krylov matrix [s, Ss, S^2 s].
  const Eigen::MatrixXd S = inst.X.entries.transpose() * inst.X.entries;
  const Eigen::VectorXd s = inst.X.entries.transpose() * y;
  Eigen::MatrixXd krylov(3, 3);
  krylov.col(0) = s;
  krylov.col(1) = S * s;
  krylov.col(2) = S * krylov.col(1);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(krylov);
  qr.setThreshold(1e-10);
  CHECK(qr.rank() == 2);
}

TEST_CASE("condition_ratio") {
  Eigen::VectorXd flat(3);
  flat << 4, 4, 4;
  CHECK(condition_ratio(plstest::diag_instance(flat).decomp) == doctest::Approx(1.0));
  Eigen::VectorXd spread(3);
  spread << 4, 2, 1;
  CHECK(condition_ratio(plstest::diag_instance(spread).decomp) == doctest::Approx(4.0));
  Eigen::VectorXd wide(2);
  wide << 10, 0.1;
  CHECK(condition_ratio(plstest::diag_instance(wide).decomp) == doctest::Approx(100.0));
}

TEST_CASE("matrix text format round trips bit-exactly") {
  auto rng = make_rng(13, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = gaussian_instance(rng, 5, 3);
    std::stringstream buf;
    write_dense_matrix(buf, inst.X.entries);
    const Eigen::MatrixXd back = read_dense_matrix(buf);
    REQUIRE(back.rows() == 5);
    REQUIRE(back.cols() == 3);
    CHECK((back.array() == inst.X.entries.array()).all());
  }
}

TEST_CASE("matrix reader rejects malformed input") {
  std::stringstream missing_header("abc");
  CHECK_THROWS_AS(read_dense_matrix(missing_header), ValidationError);
  std::stringstream truncated("2 2\n1.0 2.0\n3.0");
  CHECK_THROWS_AS(read_dense_matrix(truncated), ValidationError);
  std::stringstream bad_token("1 2\n1.0 x2");
  CHECK_THROWS_AS(read_dense_matrix(bad_token), ValidationError);
}
