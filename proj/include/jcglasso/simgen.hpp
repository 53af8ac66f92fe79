#pragma once

#include "jcglasso/dataset.hpp"
#include "jcglasso/em.hpp"
#include "jcglasso/model.hpp"
#include "jcglasso/types.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace jcglasso {

struct ScenarioConfig {
  std::string name = "scenario";
  int k = 3;
  int n = 100;  // rows per condition
  int p = 50;
  int q = 0;
  // Affected variables: a count when >= 0, otherwise the fraction is used.
  double censored_fraction_y = 0.4;
  int censored_count_y = -1;
  double mar_fraction_x = 0.0;
  int mar_count_x = -1;
  double event_probability = 0.4;
  double censor_value = 40.0;
  std::uint64_t seed = 1;
  // Hub structure: hubs at 0, step, 2 step, ... each linked to the next
  // `band_width` variables, values U[band_low, band_high], unit diagonal.
  int band_step = 5;
  int band_width = 4;
  double band_low = 0.3;
  double band_high = 0.5;
  int b_rows = 2;
  double b_low = 0.3;
  double b_high = 0.7;
  double min_eigenvalue = 0.1;

  int censored_y() const;
  int missing_x() const;
  void validate() const;
};

struct GroundTruth {
  std::vector<ModelParams> params;
  std::vector<double> theta_boost;  // ridge added to reach min_eigenvalue, per condition
  std::vector<double> omega_boost;
  std::vector<Index> censored_y;  // response indices subject to right-censoring
  std::vector<Index> missing_x;  // covariate indices subject to MAR deletion
};

struct SimulatedData {
  std::vector<ConditionDataset> datasets;
  GroundTruth truth;
};

/// Stream for one replicate: mt19937_64 seeded by seed_seq{seed, replicate}.
std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t replicate);

/// Hub-structured precision matrix with values drawn from `rng`; a ridge is
/// added when the smallest eigenvalue falls below `min_eigenvalue`.
Matrix hub_precision(int d, const ScenarioConfig& config, std::mt19937_64& rng, double& boost);

/// x with P(Z > x) = upper_tail for standard normal Z.
double standard_normal_upper_quantile(double upper_tail);

SimulatedData generate(const ScenarioConfig& config, std::uint64_t replicate = 0);

/// Support recovery against the nonzero pattern of the truth, averaged over
/// conditions; conditions whose ratio is undefined (empty denominator) are
/// left out and the field is empty when none remain.
struct SupportMetrics {
  std::optional<double> precision;
  std::optional<double> recall;
  double mse = 0.0;  // (1/K) sum_k ||est_k - truth_k||_F^2
};

/// Positions are the strict upper triangle when `offdiag_upper`, otherwise
/// every entry.
SupportMetrics support_metrics(std::span<const Matrix> estimate, std::span<const Matrix> truth,
                               bool offdiag_upper);

struct Evaluation {
  SupportMetrics theta;
  SupportMetrics omega;
  SupportMetrics b;
};

Evaluation evaluate(std::span<const ModelParams> estimate, const GroundTruth& truth);

/// Area under the precision-recall curve traced by a path of estimates
/// (path[i][k] is condition k at point i). Per condition, points with defined
/// precision are sorted by recall (ties keep the best precision) and the
/// trapezoid area is divided by the covered recall range; the result is the
/// average over conditions. Throws degenerate-path when no condition covers
/// two distinct recall values.
double auc_pr(const std::vector<MatrixList>& path, std::span<const Matrix> truth,
              bool offdiag_upper);

enum class BenchmarkMethod { Jcglasso, CensorImputeBaseline };

const char* to_string(BenchmarkMethod method) noexcept;

struct BenchmarkConfig {
  std::vector<ScenarioConfig> scenarios;
  int replicates = 10;
  // rho / rho_max along the path, decreasing
  std::vector<double> rho_ratios;
  // ratios at which the MSE of {Theta} is reported; each must be on the path
  std::vector<double> mse_ratios{0.10, 0.25, 0.50, 0.75, 1.00};
  FitConfig fit;  // alpha2, kind and solver settings; weights are overwritten

  BenchmarkConfig();
  void validate() const;
};

struct ReplicateOutcome {
  std::string scenario;
  BenchmarkMethod method = BenchmarkMethod::Jcglasso;
  int replicate = 0;
  double rho_max = 0.0;
  std::vector<double> mse;  // aligned with mse_ratios
  double auc = 0.0;
};

struct SummaryRow {
  std::string scenario;
  BenchmarkMethod method = BenchmarkMethod::Jcglasso;
  int replicates = 0;
  std::vector<double> mse_mean;
  std::vector<double> mse_se;
  double auc_mean = 0.0;
  double auc_se = 0.0;
};

struct BenchmarkReport {
  std::vector<ReplicateOutcome> outcomes;
  std::vector<SummaryRow> summary;
};

/// Fits one method along the rho path on one simulated replicate.
ReplicateOutcome run_replicate(const SimulatedData& data, const ScenarioConfig& scenario,
                               int replicate, BenchmarkMethod method,
                               const BenchmarkConfig& config);

/// Every scenario x replicate x method; replicates run in parallel.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

/// Scenarios 1-4 (p = 50, 50, 200, 200 with M = 10, 20, 40, 80 censored
/// responses, no covariates); index 0 is the p = 100, M = 20 reduced variant.
ScenarioConfig scenario_preset(int index);

}  // namespace jcglasso
