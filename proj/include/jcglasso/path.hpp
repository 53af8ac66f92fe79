#pragma once

#include "jcglasso/em.hpp"

#include <span>
#include <vector>

namespace jcglasso {

struct PathConfig {
  // Alphas, penalty kinds and solver settings; the three weights are ignored.
  FitConfig base;
  // Explicit grids in decreasing order; empty grids are built log-spaced from
  // the thresholds of the starting E-step.
  std::vector<double> nu_grid;
  std::vector<double> lambda_grid;
  std::vector<double> rho_grid;
  int nu_points = 50;
  double nu_min_ratio = 0.01;
  int lambda_rho_points = 10;
  double lambda_rho_min_ratio = 0.05;
  // Refit at (lambda_max, rho_max) and report whether B and Theta came out
  // fully sparse.
  bool check_thresholds = true;
  bool keep_fits = false;
};

struct PathPoint {
  double nu = 0.0;
  double lambda = 0.0;
  double rho = 0.0;
  BicValue bic;
  DegreesOfFreedom df;
  bool converged = false;
};

struct PathResult {
  std::vector<PathPoint> nu_path;  // stage 1, one row per nu
  std::vector<PathPoint> lambda_rho_path;  // stage 2, lambda-major
  std::size_t selected_nu = 0;
  std::size_t selected_lambda_rho = 0;
  FitResult selected;
  double nu_max = 0.0;
  double lambda_max = 0.0;
  double rho_max = 0.0;
  bool threshold_checked = false;
  bool threshold_b_zero = true;
  bool threshold_theta_diagonal = true;
  std::vector<FitResult> nu_fits;  // only with keep_fits
  std::vector<FitResult> lambda_rho_fits;
};

/// Two-stage BIC selection. Stage 1 walks the nu grid (warm-started, lambda
/// and rho at the medians of their grids) and keeps the fit with the least
/// bic_x. Stage 2 fixes {Omega} and {mu} at that fit and sweeps the (lambda, rho) grid:
/// each lambda row starts from the stage-1 fit and descends rho with warm
/// starts; the least bic_y|x is selected.
PathResult fit_path(std::span<const ConditionDataset> datasets, const PathConfig& config);

}  // namespace jcglasso
