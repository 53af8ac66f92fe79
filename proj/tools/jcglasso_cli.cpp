#include <CLI11.hpp>
#include <jcglasso/io.hpp>
#include <jcglasso/parallel.hpp>
#include <jcglasso/path.hpp>
#include <jcglasso/simgen.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace jcglasso;

namespace {

constexpr int kInputError = 2;
constexpr int kNotConverged = 3;
constexpr int kInternalError = 4;

struct Options {
  std::vector<std::string> data;
  std::string roles;
  std::string limits;
  std::string config;
  std::string out;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  int replicate = 0;
  bool censor_at_limits = false;
  bool verbose = false;
  bool strict = false;
};

RunConfig load_config(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : read_config(o.config);
  if (o.seed) cfg.scenario.seed = *o.seed;
  return cfg;
}

InputData load_inputs(const Options& o) {
  const VariableRoles roles = read_roles(o.roles);
  std::optional<LimitTable> limits;
  if (!o.limits.empty()) limits = read_limits(o.limits);
  std::vector<fs::path> files(o.data.begin(), o.data.end());
  return load_data(files, roles, limits ? &*limits : nullptr, o.censor_at_limits);
}

int cmd_fit(const Options& o) {
  const RunConfig cfg = load_config(o);
  const InputData in = load_inputs(o);
  const FitResult r = fit(in.datasets, cfg.fit);
  write_fit_outputs(o.out, r, cfg.fit, in.conditions, in.variables);
  if (o.verbose) {
    std::fprintf(stderr, "em iterations %d, converged %s, bic %s\n", r.em_iterations,
                 r.converged ? "yes" : "no", format_double(r.bic.total).c_str());
  }
  return o.strict && !r.converged ? kNotConverged : 0;
}

int cmd_path(const Options& o) {
  const RunConfig cfg = load_config(o);
  const InputData in = load_inputs(o);
  PathConfig pc = cfg.path;
  pc.base = cfg.fit;
  const PathResult r = fit_path(in.datasets, pc);
  write_path_outputs(o.out, r, cfg.fit, in.conditions, in.variables);
  bool all_converged = true;
  for (const auto& pt : r.nu_path) all_converged = all_converged && pt.converged;
  for (const auto& pt : r.lambda_rho_path) all_converged = all_converged && pt.converged;
  if (o.verbose) {
    const PathPoint& s = r.lambda_rho_path[r.selected_lambda_rho];
    std::fprintf(stderr, "selected nu %s, lambda %s, rho %s\n",
                 format_double(r.nu_path[r.selected_nu].nu).c_str(),
                 format_double(s.lambda).c_str(), format_double(s.rho).c_str());
    if (r.threshold_checked && !(r.threshold_b_zero && r.threshold_theta_diagonal)) {
      std::fprintf(stderr, "note: refit at (lambda_max, rho_max) is not fully sparse\n");
    }
  }
  return o.strict && !all_converged ? kNotConverged : 0;
}

int cmd_simulate(const Options& o) {
  const RunConfig cfg = load_config(o);
  const SimulatedData sim = generate(cfg.scenario, static_cast<std::uint64_t>(o.replicate));
  write_simulation(o.out, sim, cfg.scenario);
  if (o.verbose) std::fprintf(stderr, "wrote %d conditions to %s\n", cfg.scenario.k, o.out.c_str());
  return 0;
}

int cmd_benchmark(const Options& o) {
  const RunConfig cfg = load_config(o);
  BenchmarkConfig bc = cfg.benchmark;
  bc.fit = cfg.fit;
  bc.scenarios.clear();
  if (cfg.benchmark_presets.empty()) {
    bc.scenarios.push_back(cfg.scenario);
  } else {
    for (int idx : cfg.benchmark_presets) {
      ScenarioConfig s = scenario_preset(idx);
      s.seed = cfg.scenario.seed;
      bc.scenarios.push_back(s);
    }
  }
  const BenchmarkReport report = run_benchmark(bc);
  write_benchmark(o.out, report, bc);
  if (o.verbose) {
    for (const auto& row : report.summary) {
      std::fprintf(stderr, "%s %s auc %.3f (%.3f)\n", row.scenario.c_str(), to_string(row.method),
                   row.auc_mean, row.auc_se);
    }
  }
  return 0;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ParseError:
    case ErrorKind::InvalidConfig:
    case ErrorKind::ShapeError:
    case ErrorKind::InvalidParameters:
    case ErrorKind::InvalidRegion:
    case ErrorKind::DegenerateVariable:
    case ErrorKind::InvalidGrid:
      return kInputError;
    default:
      return kInternalError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint conditional graphical lasso for censored and missing data"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "key = value configuration file");
    sub->add_option("--out", o.out, "output directory")->required();
    sub->add_option("--threads", o.threads, "worker threads, 0 for all cores");
    sub->add_flag("--verbose", o.verbose, "progress on stderr");
  };
  auto data_opts = [&](CLI::App* sub) {
    sub->add_option("--data", o.data, "one data file per condition")->required();
    sub->add_option("--roles", o.roles, "variable roles file")->required();
    sub->add_option("--limits", o.limits, "detection limits file");
    sub->add_flag("--censor-at-limits", o.censor_at_limits,
                  "treat cells equal to a limit as censored");
    sub->add_flag("--strict", o.strict, "exit 3 when a fit does not converge");
  };

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit at fixed penalty weights");
  common(fit_cmd);
  data_opts(fit_cmd);
  CLI::App* path_cmd = app.add_subcommand("path", "two-stage BIC selection over weight grids");
  common(path_cmd);
  data_opts(path_cmd);
  CLI::App* sim_cmd = app.add_subcommand("simulate", "write a simulated data set");
  common(sim_cmd);
  sim_cmd->add_option("--seed", o.seed, "overrides the configured seed");
  sim_cmd->add_option("--replicate", o.replicate, "replicate index of the random stream");
  CLI::App* bench_cmd = app.add_subcommand("benchmark", "compare against the limit-imputation baseline");
  common(bench_cmd);
  bench_cmd->add_option("--seed", o.seed, "overrides the configured seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    set_thread_count(o.threads);
    if (fit_cmd->parsed()) return cmd_fit(o);
    if (path_cmd->parsed()) return cmd_path(o);
    if (sim_cmd->parsed()) return cmd_simulate(o);
    return cmd_benchmark(o);
  } catch (const Error& e) {
    std::fprintf(stderr, "jcglasso: %s\n", e.what());
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "jcglasso: %s\n", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "jcglasso: internal error: %s\n", e.what());
    return kInternalError;
  }
}
