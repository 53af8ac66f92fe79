#include "jcglasso/path.hpp"

#include "jcglasso/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace jcglasso {

namespace {

void check_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw Error(ErrorKind::InvalidGrid, std::string(name) + " grid is empty");
  for (double v : grid) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidGrid, std::string(name) + " grid has an invalid value");
    }
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

PathPoint point_of(const FitResult& r, const PenaltyConfig& p) {
  return PathPoint{p.nu, p.lambda, p.rho, r.bic, r.df, r.converged};
}

bool theta_diagonal(const FitResult& r) {
  for (const auto& m : r.params) {
    for (Index j = 0; j < m.p(); ++j)
      for (Index i = 0; i < j; ++i)
        if (m.theta(i, j) != 0.0) return false;
  }
  return true;
}

}  // namespace

PathResult fit_path(std::span<const ConditionDataset> datasets, const PathConfig& config) {
  config.base.validate();
  PathResult out;
  const PenaltyConfig& base_pen = config.base.penalties;

  std::vector<double> nu_grid = config.nu_grid, lambda_grid = config.lambda_grid,
                      rho_grid = config.rho_grid;
  if (nu_grid.empty() || lambda_grid.empty() || rho_grid.empty()) {
    if (config.nu_points < 1 || config.lambda_rho_points < 1) {
      throw Error(ErrorKind::InvalidGrid, "grid sizes must be at least 1");
    }
    const std::vector<ModelParams> init = initialize(datasets);
    const std::vector<SufficientStats> stats =
        expected_stats(datasets, init, config.base.skip_estep);
    const std::vector<double> f = condition_weights(condition_sizes(datasets));
    out.nu_max = nu_max(stats, f, base_pen.alpha3, base_pen.omega_kind);
    out.lambda_max = lambda_max(stats, f, base_pen.alpha1);
    out.rho_max = rho_max(stats, f, base_pen.alpha2, base_pen.theta_kind);
    auto build = [](double hi, double ratio, int count) {
      if (!std::isfinite(hi)) {
        throw Error(ErrorKind::InvalidGrid, "threshold is infinite; supply an explicit grid");
      }
      return hi > 0.0 ? log_grid(hi, ratio, count) : std::vector<double>{0.0};
    };
    if (nu_grid.empty()) nu_grid = build(out.nu_max, config.nu_min_ratio, config.nu_points);
    if (lambda_grid.empty()) {
      lambda_grid = build(out.lambda_max, config.lambda_rho_min_ratio, config.lambda_rho_points);
    }
    if (rho_grid.empty()) {
      rho_grid = build(out.rho_max, config.lambda_rho_min_ratio, config.lambda_rho_points);
    }
  }
  check_grid(nu_grid, "nu");
  check_grid(lambda_grid, "lambda");
  check_grid(rho_grid, "rho");

  // Stage 1
  FitConfig stage1 = config.base;
  stage1.penalties.lambda = median(lambda_grid);
  stage1.penalties.rho = median(rho_grid);
  std::vector<ModelParams> warm;
  FitResult best1;
  double best_bic = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nu_grid.size(); ++i) {
    stage1.penalties.nu = nu_grid[i];
    FitResult r = fit(datasets, stage1, warm);
    warm = r.params;
    out.nu_path.push_back(point_of(r, stage1.penalties));
    if (r.bic.x < best_bic || i == 0) {
      best_bic = r.bic.x;
      out.selected_nu = i;
      best1 = r;
    }
    if (config.keep_fits) out.nu_fits.push_back(std::move(r));
  }

  // Stage 2: lambda rows are independent given the stage-1 fit.
  FitConfig stage2 = config.base;
  stage2.fix_omega = true;
  stage2.penalties.nu = nu_grid[out.selected_nu];
  const std::size_t nl = lambda_grid.size(), nr = rho_grid.size();
  std::vector<FitResult> fits(nl * nr);
  parallel_for(nl, [&](std::size_t li) {
    FitConfig cfg = stage2;
    cfg.penalties.lambda = lambda_grid[li];
    std::vector<ModelParams> row_warm = best1.params;
    for (std::size_t ri = 0; ri < nr; ++ri) {
      cfg.penalties.rho = rho_grid[ri];
      fits[li * nr + ri] = fit(datasets, cfg, row_warm);
      row_warm = fits[li * nr + ri].params;
    }
  });
  best_bic = std::numeric_limits<double>::infinity();
  for (std::size_t li = 0; li < nl; ++li) {
    for (std::size_t ri = 0; ri < nr; ++ri) {
      const std::size_t idx = li * nr + ri;
      PenaltyConfig pen = stage2.penalties;
      pen.lambda = lambda_grid[li];
      pen.rho = rho_grid[ri];
      out.lambda_rho_path.push_back(point_of(fits[idx], pen));
      if (fits[idx].bic.y_given_x < best_bic || idx == 0) {
        best_bic = fits[idx].bic.y_given_x;
        out.selected_lambda_rho = idx;
      }
    }
  }
  out.selected = fits[out.selected_lambda_rho];
  if (config.keep_fits) out.lambda_rho_fits = std::move(fits);

  if (config.check_thresholds && (out.lambda_max > 0.0 || out.rho_max > 0.0) &&
      std::isfinite(out.rho_max)) {
    FitConfig guard = stage2;
    guard.penalties.lambda = out.lambda_max;
    guard.penalties.rho = out.rho_max;
    const FitResult r = fit(datasets, guard, best1.params);
    out.threshold_checked = true;
    out.threshold_b_zero = std::all_of(r.params.begin(), r.params.end(), [](const ModelParams& m) {
      return m.b.size() == 0 || m.b.cwiseAbs().maxCoeff() <= 1e-8;
    });
    out.threshold_theta_diagonal = theta_diagonal(r);
  }
  return out;
}

}  // namespace jcglasso
