#pragma once

#include "jcglasso/jgl_admm.hpp"
#include "jcglasso/types.hpp"

#include <span>
#include <vector>

namespace jcglasso {

/// min_B sum_k f_k tr(Theta_k S_y|x,k(B_k)) + lambda P_alpha(B), Theta fixed.
struct MultiLassoProblem {
  MatrixList theta;  // p x p, positive definite
  MatrixList s_xx;  // q x q
  MatrixList s_xy;  // q x p
  std::vector<double> f;
  double lambda = 0.0;
  double alpha = 0.5;
  double tau = 2.0;
  double tol = 1e-5;
  int max_iter = 1000;
};

/// Solver for 2 f S_xx B Theta + tau B = R. Both factors are eigendecomposed
/// once, so each solve is two pairs of dense products and an elementwise
/// division.
class BUpdateSolver {
 public:
  BUpdateSolver(const Matrix& theta, const Matrix& s_xx, double f, double tau);

  Matrix solve(const Matrix& rhs) const;

 private:
  Matrix p_;  // eigenvectors of S_xx
  Matrix q_;  // eigenvectors of Theta
  Matrix denom_;  // 2 f s_i t_j + tau
};

/// Closed-form B step of the ADMM:
///   B = argmin f tr(Theta S_y|x(B)) + (tau / 2) ||B - Gamma + U||_F^2.
Matrix b_update(const Matrix& theta, const Matrix& s_xx, const Matrix& s_xy, double f, double tau,
                const Matrix& gamma, const Matrix& u);

struct MultiLassoResult {
  MatrixList b;  // the sparse iterate Gamma
  AdmmDiagnostics diagnostics;
  double relative_change = 0.0;
};

/// ADMM over (B, Gamma, U); converged when both the change in B and the
/// primal residual B - Gamma are below tol times max(sum_k ||B_k||_1, 1e-4 q p K).
/// Zero lambda with positive-definite S_xx is solved directly; a lambda at
/// which B = 0 satisfies the optimality conditions returns zeros at once.
MultiLassoResult solve_multilasso(const MultiLassoProblem& problem,
                                  std::span<const Matrix> warm = {});

/// sum_k f_k tr(Theta_k (B_k^T S_xx,k B_k - 2 S_yx,k B_k)) + lambda P_alpha(B):
/// the objective without its B-free term.
double multilasso_objective(std::span<const Matrix> b, const MultiLassoProblem& problem);

}  // namespace jcglasso
