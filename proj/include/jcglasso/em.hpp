#pragma once

#include "jcglasso/dataset.hpp"
#include "jcglasso/jgl_admm.hpp"
#include "jcglasso/model.hpp"
#include "jcglasso/model_select.hpp"
#include "jcglasso/types.hpp"

#include <span>
#include <vector>

namespace jcglasso {

struct FitConfig {
  PenaltyConfig penalties;
  double em_tol = 1e-4;
  int em_max_iter = 100;
  double inner_tol = 1e-4;
  int inner_max_iter = 50;
  double admm_tau = 2.0;
  double jgl_tol = 1e-5;
  int jgl_max_iter = 500;
  double multilasso_tol = 1e-5;
  int multilasso_max_iter = 1000;
  // Keep {Omega} and {mu} at their starting values; xi is still updated.
  bool fix_omega = false;
  // Take censored and missing cells at face value instead of running the
  // E-step; used by the censor-imputation baseline.
  bool skip_estep = false;

  void validate() const;
};

struct FitDiagnostics {
  int jgl_calls = 0;
  int jgl_unconverged = 0;
  int multilasso_calls = 0;
  int multilasso_unconverged = 0;
  int inner_iterations = 0;
  int inner_unconverged = 0;
  int rejected_steps = 0;  // block updates discarded for lowering the objective
  int psd_shifts = 0;  // E-steps that needed the PSD safeguard
};

struct FitResult {
  std::vector<ModelParams> params;
  QValue q;  // at the returned parameters, under the last E-step
  double penalty = 0.0;  // lambda P_B + rho P_Theta + nu P_Omega
  DegreesOfFreedom df;
  BicValue bic;
  int em_iterations = 0;
  bool converged = false;
  // Penalized Q after each M-step (under that iteration's E-step) and before
  // it, at the previous parameters.
  std::vector<double> penalized_q_trace;
  std::vector<double> penalized_q_before_trace;
  FitDiagnostics diagnostics;
  std::vector<SufficientStats> stats;  // last E-step

  double penalized_q() const { return q.total() - penalty; }
};

/// Column means over observed and censored cells (censored at their limit),
/// diagonal precisions from the matching variances floored at 1e-6, B = 0.
/// A variable without any observed cell in some condition throws
/// degenerate-variable.
std::vector<ModelParams> initialize(std::span<const ConditionDataset> datasets);

/// mu_k, xi_k <- imputed column means.
void update_means(std::span<const SufficientStats> stats, std::span<ModelParams> params);

/// Penalized EM. `warm`, when non-empty, replaces the initializer.
FitResult fit(std::span<const ConditionDataset> datasets, const FitConfig& config,
              std::span<const ModelParams> warm = {});

/// E-step for every condition under `params` (or face-value statistics when
/// `skip_estep`).
std::vector<SufficientStats> expected_stats(std::span<const ConditionDataset> datasets,
                                            std::span<const ModelParams> params,
                                            bool skip_estep);

std::vector<Index> condition_sizes(std::span<const ConditionDataset> datasets);

}  // namespace jcglasso
