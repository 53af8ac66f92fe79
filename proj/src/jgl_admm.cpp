#include "jcglasso/jgl_admm.hpp"

#include "jcglasso/linalg.hpp"
#include "jcglasso/model_select.hpp"
#include "jcglasso/parallel.hpp"
#include "jcglasso/prox.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace jcglasso {

namespace {

void validate_problem(const JglProblem& pb) {
  if (pb.s.empty() || pb.s.size() != pb.f.size()) {
    throw Error(ErrorKind::ShapeError, "need one weight per covariance matrix");
  }
  const Index d = pb.dim();
  for (std::size_t k = 0; k < pb.s.size(); ++k) {
    if (pb.s[k].rows() != d || pb.s[k].cols() != d) {
      throw Error(ErrorKind::ShapeError, "covariance matrices differ in shape");
    }
    if (!(pb.f[k] > 0.0)) throw Error(ErrorKind::InvalidParameters, "weights must be positive");
    if (!is_symmetric(pb.s[k], 1e-8)) {
      throw Error(ErrorKind::InvalidStats, "covariance " + std::to_string(k) + " is not symmetric");
    }
    if (min_eigenvalue(pb.s[k]) < -1e-8) {
      throw Error(ErrorKind::InvalidStats,
                  "covariance " + std::to_string(k) + " is not positive semidefinite");
    }
  }
  if (!(pb.weight >= 0.0) || !(pb.alpha >= 0.0 && pb.alpha <= 1.0) || !(pb.tau > 0.0) ||
      !(pb.tol > 0.0) || pb.max_iter < 1) {
    throw Error(ErrorKind::InvalidParameters, "invalid joint graphical lasso settings");
  }
}

double frob_sq(std::span<const Matrix> m) {
  double acc = 0.0;
  for (const Matrix& x : m) acc += x.squaredNorm();
  return acc;
}

// Z <- prox_{(weight / tau) P}(A) with unpenalized diagonal.
void z_update(const MatrixList& a, double alpha, double t, PenaltyKind kind, MatrixList& z) {
  const std::size_t kk = a.size();
  const Index d = a.front().rows();
  std::vector<double> vals(kk);
  for (Index m = 0; m < d; ++m) {
    for (std::size_t k = 0; k < kk; ++k) z[k](m, m) = a[k](m, m);
    for (Index h = m + 1; h < d; ++h) {
      for (std::size_t k = 0; k < kk; ++k) vals[k] = 0.5 * (a[k](h, m) + a[k](m, h));
      joint_entry_prox(vals, alpha, t, kind);
      for (std::size_t k = 0; k < kk; ++k) {
        z[k](h, m) = vals[k];
        z[k](m, h) = vals[k];
      }
    }
  }
}

// The diagonal solution diag(1 / S_hh) is optimal exactly when the prox of
// the off-diagonal gradients f_k S_k[h,m] at the full weight is zero, with the
// same 1e-12 relative slack as the B screen.
bool diagonal_is_optimal(const JglProblem& pb) {
  const std::size_t kk = pb.s.size();
  const Index d = pb.dim();
  for (const Matrix& s : pb.s) {
    for (Index h = 0; h < d; ++h) {
      if (!(s(h, h) > 0.0)) return false;
    }
  }
  const MatrixList g = offdiag_zero_gradient(pb.s, pb.f);
  std::vector<double> vals(kk);
  for (Index m = 0; m < d; ++m) {
    for (Index h = 0; h < m; ++h) {
      for (std::size_t k = 0; k < kk; ++k) vals[k] = g[k](h, m);
      joint_entry_prox(vals, pb.alpha, pb.weight * (1.0 + 1e-12), pb.kind);
      for (double v : vals) {
        if (v != 0.0) return false;
      }
    }
  }
  return true;
}

}  // namespace

void joint_entry_prox(std::span<double> values, double alpha, double t, PenaltyKind kind) {
  if (kind == PenaltyKind::Group) {
    sparse_group_prox(values, alpha, t, 1.0);
  } else {
    fused_prox(values, alpha * t, (1.0 - alpha) * t);
  }
}

JglResult solve_jgl(const JglProblem& pb, std::span<const Matrix> warm) {
  validate_problem(pb);
  const std::size_t kk = pb.s.size();
  const Index d = pb.dim();
  JglResult out;

  if (pb.weight == 0.0) {
    bool all_pd = true;
    for (std::size_t k = 0; k < kk && all_pd; ++k) {
      auto inv = inverse_pd(pb.s[k]);
      if (inv) {
        out.theta.push_back(std::move(*inv));
      } else {
        all_pd = false;
      }
    }
    if (all_pd) {
      out.diagnostics.converged = true;
      return out;
    }
    out.theta.clear();
  }

  if (pb.weight > 0.0 && diagonal_is_optimal(pb)) {
    for (std::size_t k = 0; k < kk; ++k) {
      Matrix t = Matrix::Zero(d, d);
      for (Index h = 0; h < d; ++h) t(h, h) = 1.0 / pb.s[k](h, h);
      out.theta.push_back(std::move(t));
    }
    out.diagnostics.converged = true;
    return out;
  }

  MatrixList z(kk), u(kk, Matrix::Zero(d, d)), theta(kk), z_prev(kk), a(kk);
  if (!warm.empty()) {
    if (warm.size() != kk) throw Error(ErrorKind::ShapeError, "warm start has the wrong length");
    for (std::size_t k = 0; k < kk; ++k) {
      if (warm[k].rows() != d || warm[k].cols() != d) {
        throw Error(ErrorKind::ShapeError, "warm start has the wrong shape");
      }
      z[k] = warm[k];
      // Dual that makes a stationary warm start a fixed point of the iteration.
      if (auto inv = inverse_pd(z[k])) u[k] = (pb.f[k] / pb.tau) * (*inv - pb.s[k]);
    }
  } else {
    for (std::size_t k = 0; k < kk; ++k) {
      z[k] = Matrix::Zero(d, d);
      for (Index h = 0; h < d; ++h) z[k](h, h) = 1.0 / std::max(pb.s[k](h, h), 1e-6);
    }
  }

  const double t = pb.weight / pb.tau;
  AdmmDiagnostics& diag = out.diagnostics;
  for (int it = 1; it <= pb.max_iter; ++it) {
    parallel_for(kk, [&](std::size_t k) {
      theta[k] = logdet_prox(pb.s[k], z[k] - u[k], pb.f[k], pb.tau);
      a[k] = theta[k] + u[k];
    });
    z_prev = z;
    z_update(a, pb.alpha, t, pb.kind, z);
    double primal = 0.0, dual = 0.0;
    for (std::size_t k = 0; k < kk; ++k) {
      const Matrix r = theta[k] - z[k];
      u[k] += r;
      primal += r.squaredNorm();
      dual += (z[k] - z_prev[k]).squaredNorm();
    }
    const double zn = std::sqrt(frob_sq(z));
    const double scale = std::max({std::sqrt(frob_sq(theta)), zn, 1e-12});
    diag.iterations = it;
    diag.primal_residual = std::sqrt(primal) / scale;
    diag.dual_residual = std::sqrt(dual) / std::max(zn, 1e-12);
    if (diag.primal_residual < pb.tol && diag.dual_residual < pb.tol) {
      diag.converged = true;
      break;
    }
  }

  bool z_pd = true;
  for (std::size_t k = 0; k < kk && z_pd; ++k) z_pd = log_det_pd(z[k]).has_value();
  if (z_pd) {
    out.theta = std::move(z);
  } else {
    diag.returned_smooth_iterate = true;
    out.theta = std::move(theta);
  }
  return out;
}

double jgl_objective(std::span<const Matrix> theta, const JglProblem& pb) {
  double obj = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const auto ld = log_det_pd(theta[k]);
    if (!ld) return -std::numeric_limits<double>::infinity();
    obj += pb.f[k] * (*ld - theta[k].cwiseProduct(pb.s[k]).sum());
  }
  return obj - pb.weight * joint_penalty(theta, pb.alpha, pb.kind);
}

double kkt_residual(std::span<const Matrix> theta, const JglProblem& pb) {
  const std::size_t kk = theta.size();
  if (kk != pb.s.size()) throw Error(ErrorKind::ShapeError, "solution has the wrong length");
  const Index d = pb.dim();
  MatrixList step(kk);
  for (std::size_t k = 0; k < kk; ++k) {
    auto inv = inverse_pd(theta[k]);
    if (!inv) return std::numeric_limits<double>::infinity();
    step[k] = theta[k] - pb.f[k] * (pb.s[k] - *inv);
  }
  MatrixList prox(kk, Matrix::Zero(d, d));
  z_update(step, pb.alpha, pb.weight, pb.kind, prox);
  double worst = 0.0;
  for (std::size_t k = 0; k < kk; ++k) {
    worst = std::max(worst, (theta[k] - prox[k]).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace jcglasso
