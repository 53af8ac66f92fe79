#include "jcglasso/em.hpp"

#include "jcglasso/estep.hpp"
#include "jcglasso/linalg.hpp"
#include "jcglasso/multilasso_admm.hpp"
#include "jcglasso/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

namespace jcglasso {

void FitConfig::validate() const {
  penalties.validate();
  if (!(em_tol > 0.0) || !(inner_tol > 0.0) || !(jgl_tol > 0.0) || !(multilasso_tol > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "tolerances must be positive");
  }
  if (em_max_iter < 1 || inner_max_iter < 1 || jgl_max_iter < 1 || multilasso_max_iter < 1) {
    throw Error(ErrorKind::InvalidConfig, "iteration caps must be at least 1");
  }
  if (!(admm_tau > 0.0)) throw Error(ErrorKind::InvalidConfig, "admm_tau must be positive");
}

std::vector<Index> condition_sizes(std::span<const ConditionDataset> datasets) {
  std::vector<Index> sizes;
  for (const auto& d : datasets) sizes.push_back(d.n());
  return sizes;
}

namespace {

void check_datasets(std::span<const ConditionDataset> datasets) {
  if (datasets.empty()) throw Error(ErrorKind::ShapeError, "no conditions given");
  const Index q = datasets.front().q(), p = datasets.front().p();
  if (p < 1) throw Error(ErrorKind::ShapeError, "at least one response is required");
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    if (datasets[k].q() != q || datasets[k].p() != p) {
      throw Error(ErrorKind::ShapeError,
                  "condition " + std::to_string(k) + " has different dimensions");
    }
    if (datasets[k].n() < 1) {
      throw Error(ErrorKind::ShapeError, "condition " + std::to_string(k) + " has no rows");
    }
    datasets[k].validate();
  }
}

double penalized_q(std::span<const ModelParams> params, std::span<const SufficientStats> stats,
                   std::span<const double> f, const PenaltyConfig& pen) {
  return q_function(params, stats, f).total() - penalty_value(params, pen).total(pen);
}

MatrixList collect(std::span<const ModelParams> params, Matrix ModelParams::*member) {
  MatrixList out;
  for (const auto& m : params) out.push_back(m.*member);
  return out;
}

void store(std::span<ModelParams> params, Matrix ModelParams::*member, MatrixList values) {
  for (std::size_t k = 0; k < params.size(); ++k) params[k].*member = std::move(values[k]);
}

double frob_sum(const MatrixList& m) {
  double acc = 0.0;
  for (const auto& x : m) acc += x.norm();
  return acc;
}

double frob_diff(const MatrixList& a, const MatrixList& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]).norm();
  return acc;
}

struct MStepContext {
  std::span<const SufficientStats> stats;
  std::span<const double> f;
  const FitConfig& config;
};

JglProblem jgl_problem(MatrixList s, const MStepContext& ctx, double weight, double alpha,
                       PenaltyKind kind) {
  JglProblem pb;
  pb.s = std::move(s);
  pb.f.assign(ctx.f.begin(), ctx.f.end());
  pb.weight = weight;
  pb.alpha = alpha;
  pb.kind = kind;
  pb.tau = ctx.config.admm_tau;
  pb.tol = ctx.config.jgl_tol;
  pb.max_iter = ctx.config.jgl_max_iter;
  return pb;
}

// Solves one joint graphical lasso block and keeps the previous value when
// the new one has a lower objective.
MatrixList jgl_step(const JglProblem& pb, const MatrixList& current, FitDiagnostics& diag) {
  JglResult res = solve_jgl(pb, current);
  ++diag.jgl_calls;
  if (!res.diagnostics.converged) ++diag.jgl_unconverged;
  if (jgl_objective(res.theta, pb) < jgl_objective(current, pb)) {
    ++diag.rejected_steps;
    return current;
  }
  return std::move(res.theta);
}

MatrixList omega_step(const MStepContext& ctx, const MatrixList& omega, FitDiagnostics& diag) {
  MatrixList s;
  for (const auto& st : ctx.stats) s.push_back(st.s_xx);
  const PenaltyConfig& pen = ctx.config.penalties;
  return jgl_step(jgl_problem(std::move(s), ctx, pen.nu, pen.alpha3, pen.omega_kind), omega,
                  diag);
}

void b_theta_steps(const MStepContext& ctx, MatrixList& b, MatrixList& theta,
                   FitDiagnostics& diag) {
  const PenaltyConfig& pen = ctx.config.penalties;
  const std::size_t kk = ctx.stats.size();
  MultiLassoProblem ml;
  for (const auto& st : ctx.stats) {
    ml.s_xx.push_back(st.s_xx);
    ml.s_xy.push_back(st.s_xy);
  }
  ml.f.assign(ctx.f.begin(), ctx.f.end());
  ml.lambda = pen.lambda;
  ml.alpha = pen.alpha1;
  ml.tau = ctx.config.admm_tau;
  ml.tol = ctx.config.multilasso_tol;
  ml.max_iter = ctx.config.multilasso_max_iter;

  bool converged = false;
  for (int r = 1; r <= ctx.config.inner_max_iter; ++r) {
    ++diag.inner_iterations;
    const MatrixList b_old = b, theta_old = theta;

    if (ml.s_xx.front().rows() == 0 && r > 1) {
      converged = true;
      break;
    }
    ml.theta = theta;
    MultiLassoResult mres = solve_multilasso(ml, b);
    ++diag.multilasso_calls;
    if (!mres.diagnostics.converged) ++diag.multilasso_unconverged;
    if (multilasso_objective(mres.b, ml) > multilasso_objective(b, ml)) {
      ++diag.rejected_steps;
    } else {
      b = std::move(mres.b);
    }

    MatrixList s_cond(kk);
    for (std::size_t k = 0; k < kk; ++k) {
      s_cond[k] = conditional_residual_covariance(ctx.stats[k], b[k]);
    }
    theta = jgl_step(jgl_problem(std::move(s_cond), ctx, pen.rho, pen.alpha2, pen.theta_kind),
                     theta, diag);

    const double change = (frob_diff(b, b_old) + frob_diff(theta, theta_old)) /
                          std::max(frob_sum(b_old) + frob_sum(theta_old), 1e-12);
    if (change < ctx.config.inner_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) ++diag.inner_unconverged;
}

void merge(FitDiagnostics& into, const FitDiagnostics& from) {
  into.jgl_calls += from.jgl_calls;
  into.jgl_unconverged += from.jgl_unconverged;
  into.multilasso_calls += from.multilasso_calls;
  into.multilasso_unconverged += from.multilasso_unconverged;
  into.inner_iterations += from.inner_iterations;
  into.inner_unconverged += from.inner_unconverged;
  into.rejected_steps += from.rejected_steps;
  into.psd_shifts += from.psd_shifts;
}

void m_step(const MStepContext& ctx, std::vector<ModelParams>& params, FitDiagnostics& diag) {
  const bool update_omega = !ctx.config.fix_omega && params.front().q() > 0;
  MatrixList omega = collect(params, &ModelParams::omega);
  MatrixList b = collect(params, &ModelParams::b);
  MatrixList theta = collect(params, &ModelParams::theta);
  FitDiagnostics omega_diag, bt_diag;

  if (update_omega && thread_count() > 1) {
    auto omega_future = std::async(std::launch::async, [&] {
      return omega_step(ctx, omega, omega_diag);
    });
    b_theta_steps(ctx, b, theta, bt_diag);
    omega = omega_future.get();
  } else {
    if (update_omega) omega = omega_step(ctx, omega, omega_diag);
    b_theta_steps(ctx, b, theta, bt_diag);
  }
  merge(diag, omega_diag);
  merge(diag, bt_diag);
  store(params, &ModelParams::omega, std::move(omega));
  store(params, &ModelParams::b, std::move(b));
  store(params, &ModelParams::theta, std::move(theta));
}

}  // namespace

std::vector<ModelParams> initialize(std::span<const ConditionDataset> datasets) {
  check_datasets(datasets);
  std::vector<ModelParams> out;
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    const ConditionDataset& d = datasets[k];
    const Index q = d.q(), dim = d.q() + d.p();
    Vector mean(dim), var(dim);
    for (Index j = 0; j < dim; ++j) {
      double sum = 0.0, sq = 0.0;
      Index used = 0, observed = 0;
      for (Index i = 0; i < d.n(); ++i) {
        const CellStatus s = d.status(i, j);
        if (s == CellStatus::MissingAtRandom) continue;
        const double v = j < q ? d.x(i, j) : d.y(i, j - q);
        sum += v;
        sq += v * v;
        ++used;
        if (s == CellStatus::Observed) ++observed;
      }
      if (observed == 0) {
        throw Error(ErrorKind::DegenerateVariable,
                    "variable " + std::to_string(j) + " has no observed cells in condition " +
                        std::to_string(k));
      }
      const double m = sum / static_cast<double>(used);
      mean[j] = m;
      var[j] = std::max(sq / static_cast<double>(used) - m * m, 1e-6);
    }
    ModelParams p;
    p.mu = mean.head(q);
    p.xi = mean.tail(d.p());
    p.omega = var.head(q).cwiseInverse().asDiagonal();
    p.theta = var.tail(d.p()).cwiseInverse().asDiagonal();
    p.b = Matrix::Zero(q, d.p());
    out.push_back(std::move(p));
  }
  return out;
}

void update_means(std::span<const SufficientStats> stats, std::span<ModelParams> params) {
  for (std::size_t k = 0; k < params.size(); ++k) {
    params[k].mu = stats[k].xbar();
    params[k].xi = stats[k].ybar();
  }
}

std::vector<SufficientStats> expected_stats(std::span<const ConditionDataset> datasets,
                                            std::span<const ModelParams> params,
                                            bool skip_estep) {
  std::vector<SufficientStats> out(datasets.size());
  parallel_for(datasets.size(), [&](std::size_t k) {
    if (skip_estep) {
      const Matrix z = datasets[k].joint();
      if (!z.allFinite()) {
        throw Error(ErrorKind::InvalidParameters,
                    "condition " + std::to_string(k) + " has non-finite cells");
      }
      out[k] = complete_data_stats(z, datasets[k].q());
    } else {
      out[k] = compute_sufficient_stats(datasets[k], params[k]);
    }
  });
  return out;
}

FitResult fit(std::span<const ConditionDataset> datasets, const FitConfig& config,
              std::span<const ModelParams> warm) {
  config.validate();
  check_datasets(datasets);
  const std::vector<Index> sizes = condition_sizes(datasets);
  const std::vector<double> f = condition_weights(sizes);

  std::vector<ModelParams> params;
  if (warm.empty()) {
    params = initialize(datasets);
  } else {
    if (warm.size() != datasets.size()) {
      throw Error(ErrorKind::ShapeError, "warm start has the wrong number of conditions");
    }
    params.assign(warm.begin(), warm.end());
    for (auto& m : params) {
      if (m.q() != datasets.front().q() || m.p() != datasets.front().p()) {
        throw Error(ErrorKind::ShapeError, "warm start has the wrong dimensions");
      }
      m.validate();
    }
  }

  bool static_stats = config.skip_estep;
  if (!static_stats) {
    static_stats = std::all_of(datasets.begin(), datasets.end(),
                               [](const ConditionDataset& d) { return d.status.all_observed(); });
  }

  FitResult result;
  std::vector<SufficientStats> stats;
  double q_prev = 0.0;
  for (int it = 1; it <= config.em_max_iter; ++it) {
    if (it == 1 || !static_stats) {
      stats = expected_stats(datasets, params, config.skip_estep);
      for (const auto& s : stats) {
        if (s.psd_shift > 0.0) ++result.diagnostics.psd_shifts;
      }
    }
    const double q_before = penalized_q(params, stats, f, config.penalties);
    if (it == 1) q_prev = q_before;
    if (config.fix_omega) {
      for (std::size_t k = 0; k < params.size(); ++k) params[k].xi = stats[k].ybar();
    } else {
      update_means(stats, params);
    }
    m_step(MStepContext{stats, f, config}, params, result.diagnostics);
    const double q_after = penalized_q(params, stats, f, config.penalties);
    result.penalized_q_before_trace.push_back(q_before);
    result.penalized_q_trace.push_back(q_after);
    result.em_iterations = it;
    if (std::abs(q_after - q_prev) <= config.em_tol * std::max(std::abs(q_prev), 1.0)) {
      result.converged = true;
      break;
    }
    q_prev = q_after;
  }

  result.q = q_function(params, stats, f);
  result.penalty = penalty_value(params, config.penalties).total(config.penalties);
  result.df = degrees_of_freedom(params);
  result.bic = bic(result.q, result.df, sizes);
  result.params = std::move(params);
  result.stats = std::move(stats);
  return result;
}

}  // namespace jcglasso
