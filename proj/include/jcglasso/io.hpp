#pragma once

#include "jcglasso/dataset.hpp"
#include "jcglasso/em.hpp"
#include "jcglasso/path.hpp"
#include "jcglasso/simgen.hpp"
#include "jcglasso/types.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace jcglasso {

/// Comma-separated text with a header row. Fields are trimmed; quoting is not
/// supported. `lines` holds the 1-based source line of each row.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;
};

CsvTable parse_csv(const std::string& text, const std::string& source);
CsvTable read_csv(const std::filesystem::path& path);

/// Numeric cell; accepts "inf", "+inf", "-inf". Throws parse-error naming
/// source, line and column.
double parse_number(const std::string& token, const std::string& where);

/// %.17g, with "+inf", "-inf" and "NA" for non-finite values.
std::string format_double(double v);

struct VariableRoles {
  std::vector<std::string> covariates;
  std::vector<std::string> responses;
};

/// Columns: variable, role (covariate | response).
VariableRoles read_roles(const std::filesystem::path& path);

/// (variable, condition) -> (lower, upper)
using LimitTable = std::map<std::pair<std::string, std::string>, std::pair<double, double>>;

/// Columns: variable, condition, lower, upper.
LimitTable read_limits(const std::filesystem::path& path);

struct InputData {
  std::vector<std::string> conditions;  // file stems
  VariableRoles variables;
  std::vector<ConditionDataset> datasets;
};

/// One file per condition. "NA" cells are missing at random. With
/// `censor_at_limits`, every variable needs limits for every condition and
/// cells equal to a finite bound are censored at it.
InputData load_data(const std::vector<std::filesystem::path>& files, const VariableRoles& roles,
                    const LimitTable* limits, bool censor_at_limits);

/// Writes the data file, covariates first; censored cells carry their limit.
void write_dataset(const std::filesystem::path& path, const ConditionDataset& data,
                   const VariableRoles& variables);
void write_roles(const std::filesystem::path& path, const VariableRoles& variables);
void write_limits(const std::filesystem::path& path, const InputData& data);

/// Every tunable of a run. Read from flat `key = value` text.
struct RunConfig {
  FitConfig fit;
  PathConfig path;  // path.base is replaced by `fit` when used
  ScenarioConfig scenario;
  BenchmarkConfig benchmark;
  std::vector<int> benchmark_presets;  // empty: benchmark `scenario`
};

/// `#` starts a comment; keys may appear once; unknown keys are errors.
/// A `scenario_preset` key is applied before the other scenario keys.
RunConfig parse_config(const std::string& text, const std::string& source);
RunConfig read_config(const std::filesystem::path& path);

/// Keys understood by parse_config, in documentation order.
std::vector<std::string> config_keys();

/// Structured fit document (JSON text).
std::string fit_document(const FitResult& fit, const FitConfig& config,
                         const std::vector<std::string>& conditions,
                         const VariableRoles& variables);

/// fit.json, theta_edges_<condition>.csv, omega_edges_<condition>.csv and
/// coefficients.csv under `dir`.
void write_fit_outputs(const std::filesystem::path& dir, const FitResult& fit,
                       const FitConfig& config, const std::vector<std::string>& conditions,
                       const VariableRoles& variables);

/// bic_nu.csv and bic_lambda_rho.csv, plus the selected fit under
/// `dir`/selected.
void write_path_outputs(const std::filesystem::path& dir, const PathResult& path,
                        const FitConfig& config, const std::vector<std::string>& conditions,
                        const VariableRoles& variables);

/// Simulated data in the ingestion format: <condition>.csv per condition,
/// roles.csv, limits.csv and truth.json. Returns the data as it will be
/// ingested.
InputData write_simulation(const std::filesystem::path& dir, const SimulatedData& sim,
                           const ScenarioConfig& scenario);

/// Variable and condition names used for simulated data.
VariableRoles simulated_variables(const ScenarioConfig& scenario);
std::vector<std::string> simulated_conditions(const ScenarioConfig& scenario);

/// report.csv (means and standard errors), replicates.csv and summary.json.
void write_benchmark(const std::filesystem::path& dir, const BenchmarkReport& report,
                     const BenchmarkConfig& config);

}  // namespace jcglasso
