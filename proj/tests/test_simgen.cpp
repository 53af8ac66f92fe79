#include "oracles.hpp"

#include <doctest.h>
#include <jcglasso/linalg.hpp>
#include <jcglasso/simgen.hpp>

#include <cmath>
#include <random>
#include <set>

using namespace jcglasso;

namespace {

// Double-loop reference for precision, recall and MSE.
SupportMetrics naive_metrics(const MatrixList& est, const MatrixList& truth, bool upper) {
  double ps = 0, rs = 0, mse = 0;
  int pn = 0, rn = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    int hit = 0, e = 0, t = 0;
    for (Index i = 0; i < truth[k].rows(); ++i) {
      for (Index j = 0; j < truth[k].cols(); ++j) {
        mse += std::pow(est[k](i, j) - truth[k](i, j), 2);
        if (upper && i >= j) continue;
        if (est[k](i, j) != 0) ++e;
        if (truth[k](i, j) != 0) ++t;
        if (est[k](i, j) != 0 && truth[k](i, j) != 0) ++hit;
      }
    }
    if (e > 0) { ps += double(hit) / e; ++pn; }
    if (t > 0) { rs += double(hit) / t; ++rn; }
  }
  SupportMetrics m;
  if (pn) m.precision = ps / pn;
  if (rn) m.recall = rs / rn;
  m.mse = mse / truth.size();
  return m;
}

Matrix sparse_random(std::mt19937_64& rng, int d, double density) {
  std::uniform_real_distribution<double> u(0, 1);
  Matrix m = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    m(i, i) = 1.0;
    for (int j = i + 1; j < d; ++j)
      if (u(rng) < density) m(i, j) = m(j, i) = u(rng) - 0.5;
  }
  return m;
}

Matrix with_edges(int d, std::initializer_list<std::pair<int, int>> edges) {
  Matrix m = Matrix::Identity(d, d);
  for (auto [a, b] : edges) m(a, b) = m(b, a) = 0.3;
  return m;
}

}  // namespace

TEST_CASE("upper normal quantile matches the tail probability") {
  CHECK(standard_normal_upper_quantile(0.40) == doctest::Approx(0.2533471031357997).epsilon(1e-12));
  CHECK(standard_normal_upper_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  for (double t : {1e-6, 0.025, 0.3, 0.9}) {
    const double x = standard_normal_upper_quantile(t);
    CHECK(0.5 * std::erfc(x / std::sqrt(2.0)) == doctest::Approx(t).epsilon(1e-10));
  }
  CHECK(std::isinf(standard_normal_upper_quantile(0.0)));
}

TEST_CASE("hub pattern for p = 10") {
  ScenarioConfig c;
  c.k = 2;
  c.p = 10;
  c.censored_count_y = 0;
  const SimulatedData s = generate(c);
  std::set<std::pair<int, int>> expected;
  for (int h : {0, 5})
    for (int j = 1; j <= 4; ++j) expected.insert({h, h + j});
  for (const auto& m : s.truth.params) {
    for (int i = 0; i < 10; ++i) {
      CHECK(m.theta(i, i) == 1.0);
      for (int j = i + 1; j < 10; ++j) {
        const bool nz = m.theta(i, j) != 0.0;
        CHECK(nz == (expected.count({i, j}) == 1));
        CHECK(m.theta(i, j) == m.theta(j, i));
        if (nz) CHECK((m.theta(i, j) >= 0.3 && m.theta(i, j) <= 0.5));
      }
    }
  }
  CHECK(s.truth.params[0].theta != s.truth.params[1].theta);
}

TEST_CASE("generated precisions are positive definite and boosts are recorded") {
  ScenarioConfig c;
  c.p = 30;
  c.q = 12;
  c.band_step = 3;
  c.band_width = 6;
  c.band_low = 0.6;
  c.band_high = 0.9;
  const SimulatedData s = generate(c);
  for (std::size_t k = 0; k < s.truth.params.size(); ++k) {
    const auto& m = s.truth.params[k];
    CHECK(Eigen::LLT<Matrix>(m.theta).info() == Eigen::Success);
    CHECK(Eigen::LLT<Matrix>(m.omega).info() == Eigen::Success);
    CHECK(s.truth.theta_boost[k] > 0.0);
    CHECK(min_eigenvalue(m.theta) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(m.theta(0, 0) == doctest::Approx(1.0 + s.truth.theta_boost[k]));
  }
}

TEST_CASE("generation is reproducible and replicates differ") {
  ScenarioConfig c;
  c.p = 12;
  c.q = 4;
  c.mar_fraction_x = 0.5;
  const SimulatedData a = generate(c, 3), b = generate(c, 3), d = generate(c, 4);
  for (std::size_t k = 0; k < a.datasets.size(); ++k) {
    CHECK(a.datasets[k].y == b.datasets[k].y);
    CHECK(a.datasets[k].status == b.datasets[k].status);
    CHECK(a.truth.params[k].b == b.truth.params[k].b);
  }
  CHECK(a.datasets[0].y != d.datasets[0].y);
}

TEST_CASE("zero fractions give complete data") {
  ScenarioConfig c;
  c.p = 8;
  c.q = 3;
  c.censored_fraction_y = 0.0;
  c.mar_fraction_x = 0.0;
  for (const auto& d : generate(c).datasets) {
    CHECK(d.status.all_observed());
    CHECK(d.x.allFinite());
    d.validate();
  }
}

TEST_CASE("censoring, MAR deletion and B structure") {
  ScenarioConfig c;
  c.p = 10;
  c.q = 5;
  c.censored_count_y = 4;
  c.mar_count_x = 2;
  const SimulatedData s = generate(c);
  CHECK(s.truth.censored_y.size() == 4);
  CHECK(s.truth.missing_x.size() == 2);
  for (std::size_t k = 0; k < s.datasets.size(); ++k) {
    const auto& d = s.datasets[k];
    d.validate();
    const auto& b = s.truth.params[k].b;
    CHECK(b.topRows(2).minCoeff() >= 0.3);
    CHECK(b.topRows(2).maxCoeff() <= 0.7);
    CHECK(b.bottomRows(3).isZero(0.0));
    std::set<Index> cens(s.truth.censored_y.begin(), s.truth.censored_y.end());
    std::set<Index> mar(s.truth.missing_x.begin(), s.truth.missing_x.end());
    for (Index i = 0; i < d.n(); ++i) {
      for (Index j = 0; j < c.q; ++j) {
        const bool missing = d.status(i, j) == CellStatus::MissingAtRandom;
        if (missing) CHECK(mar.count(j) == 1);
        CHECK(std::isnan(d.x(i, j)) == missing);
      }
      for (Index j = 0; j < c.p; ++j) {
        const CellStatus st = d.status(i, c.q + j);
        if (cens.count(j)) {
          CHECK(d.y(i, j) <= 40.0);
          CHECK((st == CellStatus::RightCensored) == (d.y(i, j) == 40.0));
          CHECK(d.upper(c.q + j) == 40.0);
        } else {
          CHECK(st == CellStatus::Observed);
        }
      }
    }
  }
}

TEST_CASE("empirical censoring rate matches the event probability") {
  for (int q : {0, 3}) {
    ScenarioConfig c;
    c.k = 1;
    c.n = 100000;
    c.p = 6;
    c.q = q;
    c.censored_count_y = 6;
    c.seed = 17;
    const SimulatedData s = generate(c);
    const auto& d = s.datasets[0];
    for (Index j = 0; j < c.p; ++j) {
      int censored = 0;
      for (Index i = 0; i < d.n(); ++i) censored += d.status(i, q + j) == CellStatus::RightCensored;
      CHECK(censored / double(c.n) == doctest::Approx(0.40).epsilon(0.025));
    }
  }
}

TEST_CASE("metrics agree exactly with a double-loop reference") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixList est, truth;
    for (int k = 0; k < 3; ++k) {
      truth.push_back(sparse_random(rng, 9, 0.3));
      est.push_back(sparse_random(rng, 9, trial % 4 == 0 ? 0.0 : 0.4));
    }
    for (bool upper : {true, false}) {
      const SupportMetrics a = support_metrics(est, truth, upper);
      const SupportMetrics b = naive_metrics(est, truth, upper);
      CHECK(a.precision == b.precision);
      CHECK(a.recall == b.recall);
      CHECK(a.mse == doctest::Approx(b.mse).epsilon(1e-14));
    }
  }
}

TEST_CASE("metric hand cases") {
  const Matrix t = with_edges(5, {{0, 1}, {0, 2}});
  const MatrixList truth{t, t};
  SupportMetrics m = support_metrics(truth, truth, true);
  CHECK(*m.precision == 1.0);
  CHECK(*m.recall == 1.0);
  CHECK(m.mse == 0.0);

  const Matrix dense = Matrix::Constant(5, 5, 0.1);
  m = support_metrics(MatrixList{dense, dense}, truth, true);
  CHECK(*m.recall == 1.0);
  CHECK(*m.precision == doctest::Approx(2.0 / 10.0));

  Matrix e = Matrix::Zero(5, 5);
  e(1, 3) = e(3, 1) = std::sqrt(0.125);
  m = support_metrics(MatrixList{t + e, t + e}, truth, true);
  CHECK(m.mse == doctest::Approx(0.25));

  // An empty estimate has undefined precision and is left out of the average.
  const Matrix empty = Matrix::Identity(5, 5);
  m = support_metrics(MatrixList{empty, t}, truth, true);
  CHECK(*m.precision == 1.0);
  CHECK(*m.recall == 0.5);
  m = support_metrics(MatrixList{empty, empty}, truth, true);
  CHECK_FALSE(m.precision.has_value());
}

TEST_CASE("evaluate covers all three families") {
  ScenarioConfig c;
  c.p = 10;
  c.q = 5;
  const SimulatedData s = generate(c);
  const Evaluation ev = evaluate(s.truth.params, s.truth);
  CHECK(*ev.theta.precision == 1.0);
  CHECK(*ev.omega.recall == 1.0);
  CHECK(*ev.b.precision == 1.0);
  CHECK(ev.b.mse == 0.0);
}

TEST_CASE("auc_pr hand cases") {
  const Matrix t = with_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const MatrixList truth{t};
  // Perfect estimator at every point.
  std::vector<MatrixList> perfect{{with_edges(5, {{0, 1}})}, {with_edges(5, {{0, 1}, {0, 2}})}, {t}};
  CHECK(auc_pr(perfect, truth, true) == doctest::Approx(1.0));
  // Precision 1/2 throughout.
  std::vector<MatrixList> half{{with_edges(5, {{0, 1}, {1, 2}})},
                               {with_edges(5, {{0, 1}, {0, 2}, {1, 2}, {1, 3}})},
                               {with_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3},
                                               {1, 4}, {2, 3}})}};
  CHECK(auc_pr(half, truth, true) == doctest::Approx(0.5));
  // Precision 1 at recall 1/4, 1/2 at recall 1: area 0.75 over 0.75 of recall.
  std::vector<MatrixList> mixed{{with_edges(5, {{0, 1}})}, half[2]};
  const double base = auc_pr(mixed, truth, true);
  CHECK(base == doctest::Approx(0.75));
  std::vector<MatrixList> dup = mixed;
  dup.push_back(mixed[0]);
  dup.push_back(mixed[1]);
  dup.push_back(mixed[1]);
  CHECK(auc_pr(dup, truth, true) == base);
  // Only one distinct recall.
  std::vector<MatrixList> flat{{t}, {t}};
  CHECK_THROWS_AS(auc_pr(flat, truth, true), Error);
  CHECK_THROWS_AS(auc_pr({{t}}, truth, true), Error);
}

TEST_CASE("scenario validation names the field") {
  ScenarioConfig c;
  c.event_probability = 1.5;
  try {
    c.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
    CHECK(std::string(e.what()).find("event_probability") != std::string::npos);
  }
  c = ScenarioConfig{};
  c.censored_count_y = 51;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK_THROWS_AS(scenario_preset(9), Error);
  CHECK(scenario_preset(1).p == 50);
  CHECK(scenario_preset(4).censored_y() == 80);
}

TEST_CASE("small benchmark produces a complete table") {
  BenchmarkConfig cfg;
  ScenarioConfig s;
  s.name = "tiny";
  s.p = 10;
  s.censored_count_y = 3;
  s.n = 60;
  cfg.scenarios = {s};
  cfg.replicates = 2;
  const BenchmarkReport r = run_benchmark(cfg);
  CHECK(r.outcomes.size() == 4);
  REQUIRE(r.summary.size() == 2);
  for (const auto& row : r.summary) {
    CHECK(row.replicates == 2);
    CHECK(row.mse_mean.size() == 5);
    CHECK(row.mse_se.size() == 5);
    CHECK(row.auc_mean >= 0.0);
    CHECK(row.auc_mean <= 1.0);
  }
  CHECK(r.summary[0].method == BenchmarkMethod::Jcglasso);
  CHECK(r.summary[1].method == BenchmarkMethod::CensorImputeBaseline);
}

TEST_CASE("without censoring both methods agree") {
  BenchmarkConfig cfg;
  ScenarioConfig s;
  s.p = 15;
  s.censored_count_y = 0;
  cfg.scenarios = {s};
  cfg.replicates = 3;
  const BenchmarkReport r = run_benchmark(cfg);
  for (std::size_t i = 0; i < 5; ++i) {
    const double gap = std::abs(r.summary[0].mse_mean[i] - r.summary[1].mse_mean[i]);
    CHECK(gap <= 2.0 * (r.summary[0].mse_se[i] + r.summary[1].mse_se[i]) + 1e-6);
  }
}
