#include "oracles.hpp"

#include <doctest.h>
#include <jcglasso/model.hpp>

#include <random>

using namespace jcglasso;

namespace {

ModelParams random_params(std::mt19937_64& rng, int q, int p) {
  ModelParams m;
  m.mu = oracle::random_matrix(rng, q, 1);
  m.xi = oracle::random_matrix(rng, p, 1);
  m.omega = oracle::random_spd(rng, q);
  m.theta = oracle::random_spd(rng, p);
  m.b = oracle::random_matrix(rng, q, p);
  return m;
}

SufficientStats stats_from_cov(const Matrix& cov, const Vector& mean, Index q) {
  SufficientStats s;
  const Index p = cov.rows() - q;
  s.zbar = mean;
  s.s_xx = cov.topLeftCorner(q, q);
  s.s_xy = cov.topRightCorner(q, p);
  s.s_yy = cov.bottomRightCorner(p, p);
  s.n = 10;
  return s;
}

}  // namespace

TEST_CASE("joint precision of identity blocks is the identity") {
  ModelParams m;
  m.mu = Vector::Zero(2);
  m.xi = Vector::Zero(3);
  m.omega = Matrix::Identity(2, 2);
  m.theta = Matrix::Identity(3, 3);
  m.b = Matrix::Zero(2, 3);
  const JointPrecision j = assemble_joint_precision(m);
  CHECK((j.precision - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("joint precision scalar blocks") {
  ModelParams m;
  m.mu = Vector::Zero(1);
  m.xi = Vector::Zero(1);
  m.omega = Matrix::Constant(1, 1, 2.0);
  m.theta = Matrix::Constant(1, 1, 3.0);
  m.b = Matrix::Constant(1, 1, 1.0);
  const Matrix psi = assemble_joint_precision(m).precision;
  CHECK(psi(0, 0) == doctest::Approx(5.0));
  CHECK(psi(0, 1) == doctest::Approx(-3.0));
  CHECK(psi(1, 0) == doctest::Approx(-3.0));
  CHECK(psi(1, 1) == doctest::Approx(3.0));
}

TEST_CASE("joint precision inverse has the marginal covariance of X in its corner") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const ModelParams m = random_params(rng, 3, 2);
    const Matrix cov = oracle::lu_inverse(assemble_joint_precision(m).precision);
    const Matrix sxx = oracle::lu_inverse(m.omega);
    CHECK((cov.topLeftCorner(3, 3) - sxx).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("joint precision round trip and positive definiteness") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int rep = 0; rep < 1000; ++rep) {
    const int q = dim(rng), p = dim(rng);
    const ModelParams m = random_params(rng, q, p);
    const Matrix psi = assemble_joint_precision(m).precision;
    const Matrix theta = psi.bottomRightCorner(p, p);
    const Matrix b = -psi.topRightCorner(q, p) * oracle::lu_inverse(theta);
    REQUIRE((theta - m.theta).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((b - m.b).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(psi);
    REQUIRE(es.eigenvalues()(0) > 0.0);
  }
}

TEST_CASE("joint precision rejects invalid parameters") {
  ModelParams m;
  m.mu = Vector::Zero(1);
  m.xi = Vector::Zero(1);
  m.omega = Matrix::Constant(1, 1, -1.0);
  m.theta = Matrix::Identity(1, 1);
  m.b = Matrix::Zero(1, 1);
  CHECK_THROWS_AS(assemble_joint_precision(m), Error);
  try {
    assemble_joint_precision(m);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameters);
  }
}

TEST_CASE("conditional residual covariance") {
  std::mt19937_64 rng(13);
  const Matrix cov = oracle::random_spd(rng, 5);
  const SufficientStats s = stats_from_cov(cov, Vector::Zero(5), 2);
  SUBCASE("zero coefficients return S_yy") {
    CHECK((conditional_residual_covariance(s, Matrix::Zero(2, 3)) - s.s_yy).cwiseAbs().maxCoeff() ==
          0.0);
  }
  SUBCASE("least squares coefficients give the Schur complement") {
    const Matrix b = oracle::lu_inverse(s.s_xx) * s.s_xy;
    const Matrix schur = s.s_yy - s.s_xy.transpose() * oracle::lu_inverse(s.s_xx) * s.s_xy;
    CHECK((conditional_residual_covariance(s, b) - schur).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("stays positive semidefinite") {
    for (int rep = 0; rep < 200; ++rep) {
      const Matrix c = oracle::random_spd(rng, 6, 0.0);
      const SufficientStats st = stats_from_cov(c, Vector::Zero(6), 3);
      const Matrix b = oracle::random_matrix(rng, 3, 3, 3.0);
      Eigen::SelfAdjointEigenSolver<Matrix> es(conditional_residual_covariance(st, b));
      REQUIRE(es.eigenvalues()(0) >= -1e-10);
    }
  }
  SUBCASE("shape mismatch") {
    try {
      conditional_residual_covariance(s, Matrix::Zero(3, 3));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ShapeError);
    }
  }
}

TEST_CASE("q function values") {
  SUBCASE("identity model on identity statistics") {
    ModelParams m;
    m.mu = Vector::Zero(2);
    m.xi = Vector::Zero(3);
    m.omega = Matrix::Identity(2, 2);
    m.theta = Matrix::Identity(3, 3);
    m.b = Matrix::Zero(2, 3);
    const SufficientStats s = stats_from_cov(Matrix::Identity(5, 5), Vector::Zero(5), 2);
    const double f = 0.5;
    const QValue qv = q_function(std::span(&m, 1), std::span(&s, 1), std::span(&f, 1));
    CHECK(qv.q_x == doctest::Approx(-0.5 * 2));
    CHECK(qv.q_y_given_x == doctest::Approx(-0.5 * 3));
  }
  SUBCASE("inverse of S_xx maximizes q_x") {
    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 30; ++rep) {
      const Matrix cov = oracle::random_spd(rng, 5);
      const SufficientStats s = stats_from_cov(cov, Vector::Zero(5), 3);
      ModelParams m = random_params(rng, 3, 2);
      m.mu.setZero();
      m.xi.setZero();
      m.omega = oracle::lu_inverse(s.s_xx);
      m.omega = 0.5 * (m.omega + m.omega.transpose()).eval();
      const double f = 0.5;
      const double best = q_function(std::span(&m, 1), std::span(&s, 1), std::span(&f, 1)).q_x;
      ModelParams pert = m;
      const Matrix e = oracle::random_symmetric(rng, 3) * 0.05;
      pert.omega += e;
      const double other =
          q_function(std::span(&pert, 1), std::span(&s, 1), std::span(&f, 1)).q_x;
      CHECK(best >= other);
    }
  }
  SUBCASE("doubling sample sizes keeps the weights") {
    const std::vector<Index> a{10, 30}, b{20, 60};
    CHECK(condition_weights(a) == condition_weights(b));
    CHECK(condition_weights(a)[0] + condition_weights(a)[1] == doctest::Approx(0.5));
  }
  SUBCASE("concave in Theta") {
    std::mt19937_64 rng(15);
    for (int rep = 0; rep < 100; ++rep) {
      const SufficientStats s = stats_from_cov(oracle::random_spd(rng, 4), Vector::Zero(4), 2);
      ModelParams a = random_params(rng, 2, 2), b = a, mid = a;
      a.mu.setZero();
      a.xi.setZero();
      b = a;
      b.theta = oracle::random_spd(rng, 2);
      mid.mu = a.mu;
      mid.xi = a.xi;
      mid.theta = 0.5 * (a.theta + b.theta);
      const double f = 0.5;
      auto q = [&](const ModelParams& m) {
        return q_function(std::span(&m, 1), std::span(&s, 1), std::span(&f, 1)).q_y_given_x;
      };
      CHECK(q(mid) >= 0.5 * (q(a) + q(b)) - 1e-12);
    }
  }
  SUBCASE("mean offset enters through re-centering") {
    ModelParams m;
    m.mu = Vector::Constant(1, 1.0);
    m.xi = Vector::Zero(1);
    m.omega = Matrix::Identity(1, 1);
    m.theta = Matrix::Identity(1, 1);
    m.b = Matrix::Zero(1, 1);
    const SufficientStats s = stats_from_cov(Matrix::Identity(2, 2), Vector::Zero(2), 1);
    const double f = 0.5;
    // tr(Omega (S + (xbar - mu)^2)) = 1 + 1
    CHECK(q_function(std::span(&m, 1), std::span(&s, 1), std::span(&f, 1)).q_x ==
          doctest::Approx(-0.5 * 2.0));
  }
}

TEST_CASE("penalty values") {
  SUBCASE("diagonal matrices and zero coefficients") {
    ModelParams m;
    m.mu = Vector::Zero(2);
    m.xi = Vector::Zero(2);
    m.omega = Vector::Constant(2, 3.0).asDiagonal();
    m.theta = Vector::Constant(2, 2.0).asDiagonal();
    m.b = Matrix::Zero(2, 2);
    PenaltyConfig c;
    const PenaltyValue v = penalty_value(std::span(&m, 1), c);
    CHECK(v.b == 0.0);
    CHECK(v.theta == 0.0);
    CHECK(v.omega == 0.0);
  }
  SUBCASE("off-diagonal pairs are counted in both triangles") {
    Matrix t(3, 3);
    t << 1, 0.5, 0, 0.5, 1, -0.5, 0, -0.5, 1;
    CHECK(joint_penalty(std::span(&t, 1), 1.0, PenaltyKind::Group) == doctest::Approx(2.0));
    CHECK(joint_penalty(std::span(&t, 1), 1.0, PenaltyKind::Fused) == doctest::Approx(2.0));
  }
  SUBCASE("identical matrices have no fusion cost") {
    std::mt19937_64 rng(16);
    const Matrix t = oracle::random_symmetric(rng, 4);
    const MatrixList two{t, t};
    const double l1 = joint_penalty(std::span(&t, 1), 1.0, PenaltyKind::Fused);
    CHECK(joint_penalty(two, 0.0, PenaltyKind::Fused) == 0.0);
    CHECK(joint_penalty(two, 1.0, PenaltyKind::Fused) == doctest::Approx(2.0 * l1));
  }
  SUBCASE("sparse group penalty by hand") {
    Matrix b1(1, 2), b2(1, 2);
    b1 << 3, 0;
    b2 << 4, -1;
    const MatrixList bs{b1, b2};
    // l1 = 8, groups = 5 + 1
    CHECK(sparse_group_penalty(bs, 0.25) == doctest::Approx(0.25 * 8 + 0.75 * 6));
  }
  SUBCASE("convex along segments") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 200; ++rep) {
      MatrixList a{oracle::random_symmetric(rng, 4), oracle::random_symmetric(rng, 4),
                   oracle::random_symmetric(rng, 4)};
      MatrixList b{oracle::random_symmetric(rng, 4), oracle::random_symmetric(rng, 4),
                   oracle::random_symmetric(rng, 4)};
      MatrixList mid;
      for (int k = 0; k < 3; ++k) mid.push_back(0.5 * (a[k] + b[k]));
      for (PenaltyKind kind : {PenaltyKind::Fused, PenaltyKind::Group}) {
        CHECK(joint_penalty(mid, 0.3, kind) <=
              0.5 * (joint_penalty(a, 0.3, kind) + joint_penalty(b, 0.3, kind)) + 1e-12);
      }
      CHECK(sparse_group_penalty(mid, 0.3) <=
            0.5 * (sparse_group_penalty(a, 0.3) + sparse_group_penalty(b, 0.3)) + 1e-12);
    }
  }
}

TEST_CASE("penalty config validation") {
  PenaltyConfig c;
  c.alpha2 = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c.alpha2 = 0.5;
  c.rho = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("intercept") {
  ModelParams m;
  m.mu = Vector::Constant(2, 1.0);
  m.xi = Vector::Constant(1, 3.0);
  m.b = Matrix::Constant(2, 1, 0.5);
  CHECK(m.intercept()[0] == doctest::Approx(2.0));
}
