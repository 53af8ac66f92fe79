#include "oracles.hpp"

#include <doctest.h>
#include <jcglasso/estep.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace jcglasso;

namespace {

ModelParams independent_model(int q, int p) {
  ModelParams m;
  m.mu = Vector::Zero(q);
  m.xi = Vector::Zero(p);
  m.omega = Matrix::Identity(q, q);
  m.theta = Matrix::Identity(p, p);
  m.b = Matrix::Zero(q, p);
  return m;
}

ConditionDataset complete_dataset(const Matrix& x, const Matrix& y) {
  ConditionDataset d;
  d.x = x;
  d.y = y;
  d.status = StatusGrid(x.rows(), x.cols() + y.cols());
  d.lower = Vector::Constant(x.cols() + y.cols(), -std::numeric_limits<double>::infinity());
  d.upper = Vector::Constant(x.cols() + y.cols(), std::numeric_limits<double>::infinity());
  return d;
}

}  // namespace

TEST_CASE("truncated moments on the whole line return the inputs") {
  const TruncatedMoments t = truncated_moments_univariate(0.0, 1.0, Interval::whole());
  CHECK(t.mean == 0.0);
  CHECK(t.variance == 1.0);
}

TEST_CASE("truncated moments above 1.96") {
  const TruncatedMoments t = truncated_moments_univariate(0.0, 1.0, Interval::above(1.96));
  CHECK(t.mean == doctest::Approx(2.3378).epsilon(1e-4));
  CHECK(t.variance == doctest::Approx(0.11669).epsilon(1e-4));
  const auto [qm, qv] = oracle::upper_truncated_moments_quadrature(0.0, 1.0, 1.96);
  CHECK(t.mean == doctest::Approx(qm).epsilon(1e-9));
  CHECK(t.variance == doctest::Approx(qv).epsilon(1e-7));
}

TEST_CASE("half-normal identity for a lower tail") {
  const TruncatedMoments t = truncated_moments_univariate(3.0, 4.0, Interval::below(3.0));
  CHECK(t.mean == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-12));
  CHECK(t.variance == doctest::Approx(4.0 * (1.0 - 2.0 / std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("truncated moments agree with quadrature across the tail") {
  for (double a : {-6.0, -3.0, -1.0, 0.0, 0.7, 2.5, 5.0, 7.9, 8.1, 10.0, 15.0, 30.0}) {
    const auto [qm, qv] = oracle::upper_truncated_moments_quadrature(1.5, 2.0, 1.5 + 2.0 * a);
    const TruncatedMoments t = truncated_moments_univariate(1.5, 4.0, Interval::above(1.5 + 2 * a));
    CAPTURE(a);
    CHECK(t.mean == doctest::Approx(qm).epsilon(1e-9));
    CHECK(t.variance == doctest::Approx(qv).epsilon(1e-6));
    // mirrored lower tail
    const TruncatedMoments l =
        truncated_moments_univariate(-1.5, 4.0, Interval::below(-1.5 - 2 * a));
    CHECK(l.mean == doctest::Approx(-qm).epsilon(1e-9));
    CHECK(l.variance == doctest::Approx(qv).epsilon(1e-6));
  }
}

TEST_CASE("asymptotic branch joins the closed form continuously") {
  const TruncatedMoments lo = truncated_moments_univariate(0.0, 1.0, Interval::above(8.0));
  const TruncatedMoments hi =
      truncated_moments_univariate(0.0, 1.0, Interval::above(std::nextafter(8.0, 9.0)));
  CHECK(hi.mean == doctest::Approx(lo.mean).epsilon(1e-12));
  CHECK(hi.variance == doctest::Approx(lo.variance).epsilon(1e-9));
  const TruncatedMoments far = truncated_moments_univariate(0.0, 1.0, Interval::above(1e4));
  CHECK(far.mean >= 1e4);
  CHECK(far.variance > 0.0);
  CHECK(far.variance == doctest::Approx(1e-8).epsilon(1e-6));
}

TEST_CASE("invalid truncation regions") {
  const double inf = std::numeric_limits<double>::infinity();
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ParseError;
  };
  CHECK(kind_of([&] { truncated_moments_univariate(0, 1, Interval{inf, inf}); }) ==
        ErrorKind::InvalidRegion);
  CHECK(kind_of([&] { truncated_moments_univariate(0, 1, Interval{-inf, -inf}); }) ==
        ErrorKind::InvalidRegion);
  CHECK(kind_of([&] { truncated_moments_univariate(0, 1, Interval{0.0, 1.0}); }) ==
        ErrorKind::InvalidRegion);
  CHECK(kind_of([&] { truncated_moments_univariate(0, 0.0, Interval::above(1.0)); }) ==
        ErrorKind::InvalidParameters);
}

TEST_CASE("row moments") {
  SUBCASE("fully observed row is unchanged") {
    const ModelParams m = independent_model(1, 2);
    const JointPrecision j = assemble_joint_precision(m);
    Vector z(3);
    z << 0.3, -1.0, 2.0;
    const std::vector<CellStatus> st(3, CellStatus::Observed);
    const RowMoments r = conditional_row_moments(z, st.data(), j, Vector::Zero(3), Vector::Zero(3));
    CHECK(r.zhat == z);
    CHECK(r.variance.isZero());
  }
  SUBCASE("right-censored coordinate under independence") {
    ModelParams m = independent_model(1, 2);
    m.theta(1, 1) = 4.0;  // sd 0.5
    m.xi[1] = 1.0;
    const JointPrecision j = assemble_joint_precision(m);
    Vector z(3);
    z << 0.3, -1.0, 1.2;
    std::vector<CellStatus> st(3, CellStatus::Observed);
    st[2] = CellStatus::RightCensored;
    Vector upper = Vector::Constant(3, 1.2);
    const RowMoments r = conditional_row_moments(z, st.data(), j, Vector::Zero(3), upper);
    const TruncatedMoments t = truncated_moments_univariate(1.0, 0.25, Interval::above(1.2));
    CHECK(r.zhat[2] == doctest::Approx(t.mean));
    CHECK(r.variance[2] == doctest::Approx(t.variance));
    CHECK(r.zhat[0] == 0.3);
  }
  SUBCASE("missing coordinate takes the regression prediction") {
    // bivariate covariance [[1, 0.8], [0.8, 1]] with means (1, -2)
    Matrix cov(2, 2);
    cov << 1.0, 0.8, 0.8, 1.0;
    const Matrix prec = oracle::lu_inverse(cov);
    ModelParams m;
    m.mu = Vector::Constant(1, 1.0);
    m.xi = Vector::Constant(1, -2.0);
    m.omega = Matrix::Constant(1, 1, 1.0 / cov(0, 0));
    m.theta = Matrix::Constant(1, 1, prec(1, 1));
    m.b = Matrix::Constant(1, 1, cov(0, 1) / cov(0, 0));
    const JointPrecision j = assemble_joint_precision(m);
    Vector z(2);
    z << 1.5, 0.0;
    std::vector<CellStatus> st{CellStatus::Observed, CellStatus::MissingAtRandom};
    const RowMoments r = conditional_row_moments(z, st.data(), j, Vector::Zero(2), Vector::Zero(2));
    CHECK(r.zhat[1] == doctest::Approx(-2.0 + 0.8 * (1.5 - 1.0)));
    CHECK(r.variance[1] == doctest::Approx(1.0 - 0.64));
    st = {CellStatus::MissingAtRandom, CellStatus::Observed};
    z << 0.0, -1.0;
    const RowMoments r2 = conditional_row_moments(z, st.data(), j, Vector::Zero(2), Vector::Zero(2));
    CHECK(r2.zhat[0] == doctest::Approx(1.0 + 0.8 * (-1.0 + 2.0)));
  }
}

TEST_CASE("sufficient statistics of complete data") {
  std::mt19937_64 rng(21);
  const Matrix x = oracle::random_matrix(rng, 40, 2);
  const Matrix y = oracle::random_matrix(rng, 40, 3);
  const ConditionDataset d = complete_dataset(x, y);
  const SufficientStats s = compute_sufficient_stats(d, independent_model(2, 3));
  Matrix z(40, 5);
  z << x, y;
  CHECK((s.zhat - z).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.chat - z.transpose() * z / 40.0).cwiseAbs().maxCoeff() < 1e-13);
  const Vector mean = z.colwise().mean();
  const Matrix c = z.rowwise() - mean.transpose();
  const Matrix cov = c.transpose() * c / 40.0;
  CHECK((s.s_xx - cov.topLeftCorner(2, 2)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((s.s_xy - cov.topRightCorner(2, 3)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((s.s_yy - cov.bottomRightCorner(3, 3)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(s.psd_shift == 0.0);
}

TEST_CASE("fully censored column imputes the truncated mean") {
  std::mt19937_64 rng(22);
  const Matrix x = oracle::random_matrix(rng, 25, 1);
  Matrix y = oracle::random_matrix(rng, 25, 2);
  ConditionDataset d = complete_dataset(x, y);
  d.upper[2] = 0.0;
  for (Index i = 0; i < 25; ++i) {
    d.y(i, 1) = 0.0;
    d.status(i, 2) = CellStatus::RightCensored;
  }
  const SufficientStats s = compute_sufficient_stats(d, independent_model(1, 2));
  for (Index i = 0; i < 25; ++i) {
    CHECK(s.zhat(i, 2) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-12));
  }
  // second moment of the half normal is 1
  CHECK(s.chat(2, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("censored imputations respect their limits") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const int q = 2, p = 3, n = 25;
    ModelParams m;
    m.mu = oracle::random_matrix(rng, q, 1);
    m.xi = oracle::random_matrix(rng, p, 1);
    m.omega = oracle::random_spd(rng, q);
    m.theta = oracle::random_spd(rng, p);
    m.b = oracle::random_matrix(rng, q, p, 0.5);
    ConditionDataset d = complete_dataset(oracle::random_matrix(rng, n, q),
                                          oracle::random_matrix(rng, n, p));
    d.lower[2] = -0.5;
    d.upper[3] = 0.4;
    d.upper[4] = 1.0;
    for (Index i = 0; i < n; ++i) {
      if (u01(rng) < 0.3) {
        d.status(i, 2) = CellStatus::LeftCensored;
        d.y(i, 0) = -0.5;
      }
      if (u01(rng) < 0.3) {
        d.status(i, 3) = CellStatus::RightCensored;
        d.y(i, 1) = 0.4;
      }
      if (u01(rng) < 0.3) {
        d.status(i, 4) = CellStatus::RightCensored;
        d.y(i, 2) = 1.0;
      }
      if (u01(rng) < 0.2) d.status(i, 0) = CellStatus::MissingAtRandom;
    }
    const SufficientStats s = compute_sufficient_stats(d, m);
    for (Index i = 0; i < n; ++i) {
      if (d.status(i, 2) == CellStatus::LeftCensored) REQUIRE(s.zhat(i, 2) <= -0.5);
      if (d.status(i, 3) == CellStatus::RightCensored) REQUIRE(s.zhat(i, 3) >= 0.4);
      if (d.status(i, 4) == CellStatus::RightCensored) REQUIRE(s.zhat(i, 4) >= 1.0);
    }
    const Matrix centered = s.chat - s.zbar * s.zbar.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(centered);
    CHECK(es.eigenvalues()(0) >= -1e-8);

    // shuffled rows give the same moments
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    ConditionDataset e = d;
    for (Index i = 0; i < n; ++i) {
      e.x.row(i) = d.x.row(perm[i]);
      e.y.row(i) = d.y.row(perm[i]);
      for (Index j = 0; j < q + p; ++j) e.status(i, j) = d.status(perm[i], j);
    }
    const SufficientStats t = compute_sufficient_stats(e, m);
    CHECK((t.chat - s.chat).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((t.zbar - s.zbar).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("bivariate E-step against Monte Carlo conditional moments") {
  // X observed, Y right-censored at 0.5; correlation 0.6
  Matrix cov(2, 2);
  cov << 1.0, 0.6, 0.6, 1.0;
  ModelParams m;
  m.mu = Vector::Zero(1);
  m.xi = Vector::Zero(1);
  m.omega = Matrix::Identity(1, 1);
  m.b = Matrix::Constant(1, 1, 0.6);
  m.theta = Matrix::Constant(1, 1, 1.0 / (1.0 - 0.36));
  ConditionDataset d = complete_dataset(Matrix::Constant(1, 1, 0.2), Matrix::Constant(1, 1, 0.5));
  d.upper[1] = 0.5;
  d.status(0, 1) = CellStatus::RightCensored;
  const SufficientStats s = compute_sufficient_stats(d, m);

  std::mt19937_64 rng(24);
  oracle::UpperTruncatedNormal draw(0.6 * 0.2, std::sqrt(0.64), 0.5);
  const int n = 1000000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = draw(rng);
    s1 += v;
    s2 += v * v;
  }
  const double mean = s1 / n, m2 = s2 / n;
  const double se_mean = std::sqrt((m2 - mean * mean) / n);
  CHECK(std::abs(s.zhat(0, 1) - mean) < 3.0 * se_mean);
  // second moment E[Y^2 | .] on the diagonal of C
  CHECK(s.chat(1, 1) == doctest::Approx(m2).epsilon(5e-3));
}
