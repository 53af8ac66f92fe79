#include "jcglasso/multilasso_admm.hpp"

#include "jcglasso/linalg.hpp"
#include "jcglasso/model.hpp"
#include "jcglasso/model_select.hpp"
#include "jcglasso/parallel.hpp"
#include "jcglasso/prox.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace jcglasso {

BUpdateSolver::BUpdateSolver(const Matrix& theta, const Matrix& s_xx, double f, double tau) {
  Eigen::SelfAdjointEigenSolver<Matrix> ex(s_xx);
  Eigen::SelfAdjointEigenSolver<Matrix> et(theta);
  p_ = ex.eigenvectors();
  q_ = et.eigenvectors();
  const Vector s = ex.eigenvalues().cwiseMax(0.0);
  const Vector t = et.eigenvalues();
  denom_ = (2.0 * f) * s * t.transpose();
  denom_.array() += tau;
}

Matrix BUpdateSolver::solve(const Matrix& rhs) const {
  const Matrix rotated = p_.transpose() * rhs * q_;
  return p_ * rotated.cwiseQuotient(denom_) * q_.transpose();
}

Matrix b_update(const Matrix& theta, const Matrix& s_xx, const Matrix& s_xy, double f, double tau,
                const Matrix& gamma, const Matrix& u) {
  const BUpdateSolver solver(theta, s_xx, f, tau);
  return solver.solve(2.0 * f * s_xy * theta + tau * (gamma - u));
}

namespace {

void validate_problem(const MultiLassoProblem& pb) {
  const std::size_t kk = pb.theta.size();
  if (kk == 0 || pb.s_xx.size() != kk || pb.s_xy.size() != kk || pb.f.size() != kk) {
    throw Error(ErrorKind::ShapeError, "multilasso inputs differ in length");
  }
  const Index q = pb.s_xx.front().rows();
  const Index p = pb.theta.front().rows();
  for (std::size_t k = 0; k < kk; ++k) {
    if (pb.theta[k].rows() != p || pb.theta[k].cols() != p || pb.s_xx[k].rows() != q ||
        pb.s_xx[k].cols() != q || pb.s_xy[k].rows() != q || pb.s_xy[k].cols() != p) {
      throw Error(ErrorKind::ShapeError,
                  "multilasso inputs of condition " + std::to_string(k) + " are inconsistent");
    }
  }
  if (!(pb.lambda >= 0.0) || !(pb.alpha >= 0.0 && pb.alpha <= 1.0) || !(pb.tau > 0.0) ||
      !(pb.tol > 0.0) || pb.max_iter < 1) {
    throw Error(ErrorKind::InvalidParameters, "invalid multilasso settings");
  }
}

double sum_l1(std::span<const Matrix> m) {
  double acc = 0.0;
  for (const Matrix& x : m) acc += l1_norm(x);
  return acc;
}

// B = 0 is optimal exactly when the prox of 2 f_k S_xy,k Theta_k at the full
// weight lambda is zero at every position. The weight carries a 1e-12 relative
// slack so that lambda = lambda_max is not lost to rounding in the gradient.
bool zero_is_optimal(const MultiLassoProblem& pb) {
  const MatrixList g = b_zero_gradient(pb.s_xy, pb.theta, pb.f);
  std::vector<double> vals(g.size());
  for (Index h = 0; h < g.front().cols(); ++h) {
    for (Index j = 0; j < g.front().rows(); ++j) {
      for (std::size_t k = 0; k < g.size(); ++k) vals[k] = g[k](j, h);
      sparse_group_prox(vals, pb.alpha, pb.lambda * (1.0 + 1e-12), 1.0);
      for (double v : vals) {
        if (v != 0.0) return false;
      }
    }
  }
  return true;
}

}  // namespace

MultiLassoResult solve_multilasso(const MultiLassoProblem& pb, std::span<const Matrix> warm) {
  validate_problem(pb);
  const std::size_t kk = pb.theta.size();
  const Index q = pb.s_xx.front().rows();
  const Index p = pb.theta.front().rows();
  MultiLassoResult out;

  if (q == 0 || p == 0) {
    out.b.assign(kk, Matrix::Zero(q, p));
    out.diagnostics.converged = true;
    return out;
  }

  if (pb.lambda == 0.0) {
    bool all_pd = true;
    for (std::size_t k = 0; k < kk && all_pd; ++k) {
      Eigen::LLT<Matrix> llt(pb.s_xx[k]);
      if (llt.info() == Eigen::Success) {
        out.b.push_back(llt.solve(pb.s_xy[k]));
      } else {
        all_pd = false;
      }
    }
    if (all_pd) {
      out.diagnostics.converged = true;
      return out;
    }
    out.b.clear();
  }

  if (pb.lambda > 0.0 && zero_is_optimal(pb)) {
    out.b.assign(kk, Matrix::Zero(q, p));
    out.diagnostics.converged = true;
    return out;
  }

  std::vector<BUpdateSolver> solvers;
  MatrixList base_rhs(kk);
  solvers.reserve(kk);
  for (std::size_t k = 0; k < kk; ++k) {
    solvers.emplace_back(pb.theta[k], pb.s_xx[k], pb.f[k], pb.tau);
    base_rhs[k] = 2.0 * pb.f[k] * pb.s_xy[k] * pb.theta[k];
  }

  MatrixList b(kk, Matrix::Zero(q, p)), gamma(kk, Matrix::Zero(q, p)), u(kk, Matrix::Zero(q, p));
  if (!warm.empty()) {
    if (warm.size() != kk) throw Error(ErrorKind::ShapeError, "warm start has the wrong length");
    for (std::size_t k = 0; k < kk; ++k) {
      if (warm[k].rows() != q || warm[k].cols() != p) {
        throw Error(ErrorKind::ShapeError, "warm start has the wrong shape");
      }
      gamma[k] = warm[k];
      b[k] = warm[k];
      // Dual that makes a stationary warm start a fixed point of the iteration.
      u[k] = (base_rhs[k] - 2.0 * pb.f[k] * pb.s_xx[k] * warm[k] * pb.theta[k]) / pb.tau;
    }
  }

  const double floor = 1e-4 * static_cast<double>(q * p * static_cast<Index>(kk));
  std::vector<double> vals(kk);
  MatrixList b_prev(kk);
  AdmmDiagnostics& diag = out.diagnostics;
  for (int it = 1; it <= pb.max_iter; ++it) {
    b_prev = b;
    parallel_for(kk, [&](std::size_t k) {
      b[k] = solvers[k].solve(base_rhs[k] + pb.tau * (gamma[k] - u[k]));
    });
    for (Index h = 0; h < p; ++h) {
      for (Index j = 0; j < q; ++j) {
        for (std::size_t k = 0; k < kk; ++k) vals[k] = b[k](j, h) + u[k](j, h);
        if (pb.lambda > 0.0) sparse_group_prox(vals, pb.alpha, pb.lambda, pb.tau);
        for (std::size_t k = 0; k < kk; ++k) gamma[k](j, h) = vals[k];
      }
    }
    double change = 0.0, primal = 0.0;
    for (std::size_t k = 0; k < kk; ++k) {
      const Matrix r = b[k] - gamma[k];
      u[k] += r;
      primal += l1_norm(r);
      change += l1_norm(b[k] - b_prev[k]);
    }
    const double scale = std::max(sum_l1(b_prev), floor);
    diag.iterations = it;
    diag.primal_residual = primal / scale;
    diag.dual_residual = change / scale;
    out.relative_change = diag.dual_residual;
    if (diag.primal_residual < pb.tol && diag.dual_residual < pb.tol) {
      diag.converged = true;
      break;
    }
  }
  out.b = std::move(gamma);
  return out;
}

double multilasso_objective(std::span<const Matrix> b, const MultiLassoProblem& pb) {
  double obj = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const Matrix quad = b[k].transpose() * pb.s_xx[k] * b[k] -
                        2.0 * pb.s_xy[k].transpose() * b[k];
    obj += pb.f[k] * pb.theta[k].cwiseProduct(quad).sum();
  }
  return obj + pb.lambda * sparse_group_penalty(b, pb.alpha);
}

}  // namespace jcglasso
