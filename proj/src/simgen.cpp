#include "jcglasso/simgen.hpp"

#include "jcglasso/linalg.hpp"
#include "jcglasso/model_select.hpp"
#include "jcglasso/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace jcglasso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidConfig, field + ": " + what);
}

int affected(int total, int count, double fraction) {
  if (count >= 0) return count;
  return static_cast<int>(std::lround(fraction * total));
}

std::vector<Index> choose_subset(int total, int count, std::mt19937_64& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(count));
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Rows of the returned matrix are draws from N(0, precision^{-1}).
Matrix gaussian_rows(const Matrix& precision, int n, std::mt19937_64& rng) {
  const Index d = precision.rows();
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::ConditioningFailure, "generated precision matrix is not positive definite");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(d, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) z(j, i) = normal(rng);
  // L^{-T} z has covariance (L L^T)^{-1}.
  const Matrix draws = llt.matrixU().solve(z);
  return draws.transpose();
}

struct Counts {
  Index hits = 0;
  Index estimated = 0;
  Index relevant = 0;
};

Counts support_counts(const Matrix& est, const Matrix& truth, bool offdiag_upper) {
  Counts c;
  for (Index j = 0; j < truth.cols(); ++j) {
    const Index rows = offdiag_upper ? std::min(j, truth.rows()) : truth.rows();
    for (Index i = 0; i < rows; ++i) {
      const bool e = est(i, j) != 0.0;
      const bool t = truth(i, j) != 0.0;
      c.estimated += e;
      c.relevant += t;
      c.hits += e && t;
    }
  }
  return c;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

int ScenarioConfig::censored_y() const { return affected(p, censored_count_y, censored_fraction_y); }

int ScenarioConfig::missing_x() const { return affected(q, mar_count_x, mar_fraction_x); }

void ScenarioConfig::validate() const {
  require(k >= 1, "k", "must be at least 1");
  require(n >= 2, "n", "must be at least 2");
  require(p >= 1, "p", "must be at least 1");
  require(q >= 0, "q", "must be non-negative");
  require(censored_fraction_y >= 0.0 && censored_fraction_y <= 1.0, "censored_fraction_y",
          "must lie in [0, 1]");
  require(mar_fraction_x >= 0.0 && mar_fraction_x <= 1.0, "mar_fraction_x", "must lie in [0, 1]");
  require(censored_count_y <= p, "censored_count_y", "exceeds p");
  require(mar_count_x <= q, "mar_count_x", "exceeds q");
  require(event_probability >= 0.0 && event_probability <= 1.0, "event_probability",
          "must lie in [0, 1]");
  require(std::isfinite(censor_value), "censor_value", "must be finite");
  require(band_step >= 1, "band_step", "must be at least 1");
  require(band_width >= 0, "band_width", "must be non-negative");
  require(band_low <= band_high && std::isfinite(band_low) && std::isfinite(band_high), "band_low",
          "range must be finite with band_low <= band_high");
  require(b_rows >= 0, "b_rows", "must be non-negative");
  require(b_low <= b_high && std::isfinite(b_low) && std::isfinite(b_high), "b_low",
          "range must be finite with b_low <= b_high");
  require(min_eigenvalue > 0.0 && std::isfinite(min_eigenvalue), "min_eigenvalue",
          "must be positive");
}

std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32)};
  return std::mt19937_64(seq);
}

Matrix hub_precision(int d, const ScenarioConfig& config, std::mt19937_64& rng, double& boost) {
  std::uniform_real_distribution<double> value(config.band_low, config.band_high);
  Matrix m = Matrix::Identity(d, d);
  for (int h = 0; h < d; h += config.band_step) {
    for (int j = 1; j <= config.band_width && h + j < d; ++j) {
      const double v = value(rng);
      m(h, h + j) = v;
      m(h + j, h) = v;
    }
  }
  boost = 0.0;
  if (d > 0) {
    const double lo = min_eigenvalue(m);
    if (lo < config.min_eigenvalue) {
      boost = config.min_eigenvalue - lo;
      m.diagonal().array() += boost;
    }
  }
  return m;
}

double standard_normal_upper_quantile(double upper_tail) {
  if (!(upper_tail >= 0.0 && upper_tail <= 1.0)) {
    throw Error(ErrorKind::InvalidParameters, "tail probability must lie in [0, 1]");
  }
  if (upper_tail == 0.0) return kInf;
  if (upper_tail == 1.0) return -kInf;
  auto tail = [](double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); };
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > upper_tail ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SimulatedData generate(const ScenarioConfig& config, std::uint64_t replicate) {
  config.validate();
  std::mt19937_64 rng = replicate_rng(config.seed, replicate);
  const int p = config.p, q = config.q, n = config.n;

  SimulatedData out;
  GroundTruth& truth = out.truth;
  truth.censored_y = choose_subset(p, config.censored_y(), rng);
  truth.missing_x = choose_subset(q, config.missing_x(), rng);

  // Mean offset below the censoring value; clamped so probabilities 0 and 1
  // stay finite.
  const double z =
      std::clamp(standard_normal_upper_quantile(config.event_probability), -10.0, 10.0);
  std::uniform_real_distribution<double> coef(config.b_low, config.b_high);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int k = 0; k < config.k; ++k) {
    ModelParams m;
    double theta_boost = 0.0, omega_boost = 0.0;
    m.theta = hub_precision(p, config, rng, theta_boost);
    m.omega = hub_precision(q, config, rng, omega_boost);
    m.b = Matrix::Zero(q, p);
    for (int j = 0; j < std::min(config.b_rows, q); ++j)
      for (int h = 0; h < p; ++h) m.b(j, h) = coef(rng);
    m.mu = Vector::Zero(q);
    m.xi = Vector::Zero(p);

    const Matrix theta_inv = *inverse_pd(m.theta);
    Matrix marginal = theta_inv;
    if (q > 0) marginal += m.b.transpose() * (*inverse_pd(m.omega)) * m.b;
    for (Index j : truth.censored_y) {
      m.xi(j) = config.censor_value - z * std::sqrt(marginal(j, j));
    }

    ConditionDataset d;
    d.x = q > 0 ? gaussian_rows(m.omega, n, rng) : Matrix(n, 0);
    d.y = gaussian_rows(m.theta, n, rng);
    d.y.rowwise() += m.xi.transpose();
    if (q > 0) d.y += (d.x.rowwise() - m.mu.transpose()) * m.b;
    d.status = StatusGrid(n, q + p);
    d.lower = Vector::Constant(q + p, -kInf);
    d.upper = Vector::Constant(q + p, kInf);

    for (Index j : truth.censored_y) {
      d.upper(q + j) = config.censor_value;
      for (int i = 0; i < n; ++i) {
        if (d.y(i, j) > config.censor_value) {
          d.y(i, j) = config.censor_value;
          d.status(i, q + j) = CellStatus::RightCensored;
        }
      }
    }
    for (Index j : truth.missing_x) {
      for (int i = 0; i < n; ++i) {
        if (unit(rng) < config.event_probability) {
          d.x(i, j) = std::numeric_limits<double>::quiet_NaN();
          d.status(i, j) = CellStatus::MissingAtRandom;
        }
      }
    }
    out.datasets.push_back(std::move(d));
    truth.params.push_back(std::move(m));
    truth.theta_boost.push_back(theta_boost);
    truth.omega_boost.push_back(omega_boost);
  }
  return out;
}

SupportMetrics support_metrics(std::span<const Matrix> estimate, std::span<const Matrix> truth,
                               bool offdiag_upper) {
  if (estimate.size() != truth.size()) {
    throw Error(ErrorKind::ShapeError, "estimate and truth have different condition counts");
  }
  SupportMetrics out;
  double prec_sum = 0.0, rec_sum = 0.0, mse_sum = 0.0;
  int prec_n = 0, rec_n = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (estimate[k].rows() != truth[k].rows() || estimate[k].cols() != truth[k].cols()) {
      throw Error(ErrorKind::ShapeError, "estimate and truth shapes differ");
    }
    const Counts c = support_counts(estimate[k], truth[k], offdiag_upper);
    if (c.estimated > 0) {
      prec_sum += static_cast<double>(c.hits) / static_cast<double>(c.estimated);
      ++prec_n;
    }
    if (c.relevant > 0) {
      rec_sum += static_cast<double>(c.hits) / static_cast<double>(c.relevant);
      ++rec_n;
    }
    mse_sum += (estimate[k] - truth[k]).squaredNorm();
  }
  if (prec_n > 0) out.precision = prec_sum / prec_n;
  if (rec_n > 0) out.recall = rec_sum / rec_n;
  out.mse = truth.empty() ? 0.0 : mse_sum / static_cast<double>(truth.size());
  return out;
}

Evaluation evaluate(std::span<const ModelParams> estimate, const GroundTruth& truth) {
  MatrixList et, eo, eb, tt, to, tb;
  for (const auto& m : estimate) {
    et.push_back(m.theta);
    eo.push_back(m.omega);
    eb.push_back(m.b);
  }
  for (const auto& m : truth.params) {
    tt.push_back(m.theta);
    to.push_back(m.omega);
    tb.push_back(m.b);
  }
  return Evaluation{support_metrics(et, tt, true), support_metrics(eo, to, true),
                    support_metrics(eb, tb, false)};
}

double auc_pr(const std::vector<MatrixList>& path, std::span<const Matrix> truth,
              bool offdiag_upper) {
  if (path.size() < 2) throw Error(ErrorKind::DegeneratePath, "path needs at least two points");
  double total = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    std::vector<std::pair<double, double>> pts;  // (recall, precision)
    for (const auto& point : path) {
      if (point.size() != truth.size()) {
        throw Error(ErrorKind::ShapeError, "path point has the wrong number of conditions");
      }
      const Counts c = support_counts(point[k], truth[k], offdiag_upper);
      if (c.estimated == 0 || c.relevant == 0) continue;
      pts.emplace_back(static_cast<double>(c.hits) / static_cast<double>(c.relevant),
                       static_cast<double>(c.hits) / static_cast<double>(c.estimated));
    }
    // Ascending recall; among ties the best precision comes first and is kept.
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      return a.first < b.first || (a.first == b.first && a.second > b.second);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              pts.end());
    if (pts.size() < 2) continue;
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      area += 0.5 * (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second);
    }
    total += area / (pts.back().first - pts.front().first);
    ++used;
  }
  if (used == 0) {
    throw Error(ErrorKind::DegeneratePath, "no condition covers two distinct recall values");
  }
  return total / used;
}

const char* to_string(BenchmarkMethod method) noexcept {
  return method == BenchmarkMethod::Jcglasso ? "jcglasso" : "censor-impute-baseline";
}

BenchmarkConfig::BenchmarkConfig() {
  for (int i = 0; i < 20; ++i) rho_ratios.push_back((20 - i) * 0.05);
  fit.penalties.alpha2 = 0.5;
  fit.penalties.theta_kind = PenaltyKind::Group;
}

void BenchmarkConfig::validate() const {
  require(replicates >= 1, "replicates", "must be at least 1");
  require(rho_ratios.size() >= 2, "rho_ratios", "needs at least two values");
  for (std::size_t i = 0; i < rho_ratios.size(); ++i) {
    require(rho_ratios[i] >= 0.0 && std::isfinite(rho_ratios[i]), "rho_ratios",
            "values must be finite and non-negative");
    require(i == 0 || rho_ratios[i] < rho_ratios[i - 1], "rho_ratios", "must be decreasing");
  }
  for (double r : mse_ratios) {
    const bool on_path = std::any_of(rho_ratios.begin(), rho_ratios.end(),
                                     [r](double v) { return std::abs(v - r) <= 1e-9; });
    require(on_path, "mse_ratios", "every value must be on the rho path");
  }
  for (const auto& s : scenarios) s.validate();
  fit.validate();
}

ReplicateOutcome run_replicate(const SimulatedData& data, const ScenarioConfig& scenario,
                               int replicate, BenchmarkMethod method,
                               const BenchmarkConfig& config) {
  ReplicateOutcome out;
  out.scenario = scenario.name;
  out.method = method;
  out.replicate = replicate;

  // The baseline has no covariates; censored cells keep their limit.
  std::vector<ConditionDataset> datasets = data.datasets;
  if (method == BenchmarkMethod::CensorImputeBaseline) {
    for (auto& d : datasets) {
      const Index q = d.q();
      StatusGrid status(d.n(), d.p());
      for (Index i = 0; i < d.n(); ++i)
        for (Index j = 0; j < d.p(); ++j) status(i, j) = d.status(i, q + j);
      d.status = std::move(status);
      d.x = Matrix(d.n(), 0);
      d.lower = Vector(d.lower.tail(d.p()));
      d.upper = Vector(d.upper.tail(d.p()));
    }
  }

  FitConfig fc = config.fit;
  fc.skip_estep = method == BenchmarkMethod::CensorImputeBaseline;
  fc.penalties.lambda = 0.0;
  fc.penalties.nu = 0.0;

  const std::vector<ModelParams> init = initialize(datasets);
  const std::vector<SufficientStats> stats = expected_stats(datasets, init, fc.skip_estep);
  const std::vector<double> f = condition_weights(condition_sizes(datasets));
  out.rho_max = rho_max(stats, f, fc.penalties.alpha2, fc.penalties.theta_kind);
  if (!std::isfinite(out.rho_max)) {
    throw Error(ErrorKind::InvalidGrid, "rho_max is infinite for scenario " + scenario.name);
  }

  MatrixList truth;
  for (const auto& m : data.truth.params) truth.push_back(m.theta);

  std::vector<MatrixList> path;
  std::vector<ModelParams> warm;
  out.mse.assign(config.mse_ratios.size(), 0.0);
  for (double ratio : config.rho_ratios) {
    fc.penalties.rho = ratio * out.rho_max;
    FitResult r = fit(datasets, fc, warm);
    MatrixList thetas;
    for (const auto& m : r.params) thetas.push_back(m.theta);
    const double mse = support_metrics(thetas, truth, true).mse;
    for (std::size_t i = 0; i < config.mse_ratios.size(); ++i) {
      if (std::abs(config.mse_ratios[i] - ratio) <= 1e-9) out.mse[i] = mse;
    }
    path.push_back(std::move(thetas));
    warm = std::move(r.params);
  }
  out.auc = auc_pr(path, truth, true);
  return out;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  constexpr BenchmarkMethod methods[] = {BenchmarkMethod::Jcglasso,
                                         BenchmarkMethod::CensorImputeBaseline};
  BenchmarkReport report;
  for (const auto& scenario : config.scenarios) {
    const std::size_t reps = static_cast<std::size_t>(config.replicates);
    std::vector<ReplicateOutcome> cells(reps * 2);
    parallel_for(reps, [&](std::size_t r) {
      const SimulatedData data = generate(scenario, r);
      for (std::size_t m = 0; m < 2; ++m) {
        cells[m * reps + r] = run_replicate(data, scenario, static_cast<int>(r), methods[m], config);
      }
    });
    for (std::size_t m = 0; m < 2; ++m) {
      SummaryRow row;
      row.scenario = scenario.name;
      row.method = methods[m];
      row.replicates = config.replicates;
      std::vector<double> auc;
      std::vector<std::vector<double>> mse(config.mse_ratios.size());
      for (std::size_t r = 0; r < reps; ++r) {
        const ReplicateOutcome& o = cells[m * reps + r];
        auc.push_back(o.auc);
        for (std::size_t i = 0; i < mse.size(); ++i) mse[i].push_back(o.mse[i]);
        report.outcomes.push_back(o);
      }
      for (const auto& v : mse) {
        row.mse_mean.push_back(mean(v));
        row.mse_se.push_back(standard_error(v));
      }
      row.auc_mean = mean(auc);
      row.auc_se = standard_error(auc);
      report.summary.push_back(std::move(row));
    }
  }
  return report;
}

ScenarioConfig scenario_preset(int index) {
  ScenarioConfig s;
  s.q = 0;
  switch (index) {
    case 0: s.p = 100; s.censored_count_y = 20; break;
    case 1: s.p = 50; s.censored_count_y = 10; break;
    case 2: s.p = 50; s.censored_count_y = 20; break;
    case 3: s.p = 200; s.censored_count_y = 40; break;
    case 4: s.p = 200; s.censored_count_y = 80; break;
    default: throw Error(ErrorKind::InvalidConfig, "scenario: unknown preset " + std::to_string(index));
  }
  s.name = index == 0 ? "reduced-p100" : "scenario" + std::to_string(index);
  return s;
}

}  // namespace jcglasso
