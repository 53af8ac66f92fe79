#pragma once

#include "jcglasso/model.hpp"
#include "jcglasso/types.hpp"

#include <span>
#include <vector>

namespace jcglasso {

/// One joint graphical lasso problem:
///   max sum_k f_k [logdet T_k - tr(T_k S_k)] - weight P_alpha({T_k})
/// with P the fused or group penalty on off-diagonal entries.
struct JglProblem {
  MatrixList s;
  std::vector<double> f;
  double weight = 0.0;
  double alpha = 0.5;
  PenaltyKind kind = PenaltyKind::Group;
  double tau = 2.0;
  double tol = 1e-5;
  int max_iter = 500;

  Index dim() const { return s.empty() ? 0 : s.front().rows(); }
};

struct AdmmDiagnostics {
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  // Set when the sparse iterate was not positive definite and the smooth
  // iterate was returned instead.
  bool returned_smooth_iterate = false;
};

struct JglResult {
  MatrixList theta;
  AdmmDiagnostics diagnostics;
};

/// Applies the prox of t P_alpha to the K values of one off-diagonal position.
void joint_entry_prox(std::span<double> values, double alpha, double t, PenaltyKind kind);

/// ADMM with the sparse iterate Z returned as the estimate. `warm`, when
/// non-empty, seeds Z and the matching dual; otherwise Z starts at diag(1 / S_hh). A zero weight with
/// positive-definite S is answered by direct inversion, and a weight at which
/// diag(1 / S_hh) already satisfies the optimality conditions returns it
/// without iterating. Non-convergence is
/// reported in the diagnostics, not thrown. S with an eigenvalue below -1e-8
/// throws invalid-stats.
JglResult solve_jgl(const JglProblem& problem, std::span<const Matrix> warm = {});

/// Penalized objective value (to be maximized); -inf when some T_k is not
/// positive definite.
double jgl_objective(std::span<const Matrix> theta, const JglProblem& problem);

/// max |T - prox_{weight P}(T - G)| with G_k = f_k (S_k - T_k^-1), the
/// proximal-gradient stationarity residual; 0 exactly at the optimum and
/// ||G||_inf when weight is 0. +inf when some T_k is not positive definite.
double kkt_residual(std::span<const Matrix> theta, const JglProblem& problem);

}  // namespace jcglasso
