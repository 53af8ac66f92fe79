#include "jcglasso/model_select.hpp"

#include "jcglasso/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jcglasso {

Index count_distinct_nonzero(std::span<const Matrix> mats, bool upper_triangle) {
  if (mats.empty()) return 0;
  const Index rows = mats.front().rows(), cols = mats.front().cols();
  std::vector<double> vals;
  Index count = 0;
  for (Index m = 0; m < cols; ++m) {
    for (Index h = 0; h < rows; ++h) {
      if (upper_triangle && h > m) continue;
      vals.clear();
      for (const Matrix& x : mats) {
        if (x(h, m) != 0.0) vals.push_back(x(h, m));
      }
      std::sort(vals.begin(), vals.end());
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i == 0 || vals[i] - vals[i - 1] > 1e-8) ++count;
      }
    }
  }
  return count;
}

DegreesOfFreedom degrees_of_freedom(std::span<const ModelParams> params) {
  MatrixList omega, b, theta;
  for (const auto& m : params) {
    omega.push_back(m.omega);
    b.push_back(m.b);
    theta.push_back(m.theta);
  }
  DegreesOfFreedom df;
  df.x = count_distinct_nonzero(omega, true);
  df.y_given_x = count_distinct_nonzero(b, false) + count_distinct_nonzero(theta, true);
  return df;
}

BicValue bic(const QValue& q, const DegreesOfFreedom& df, std::span<const Index> sizes) {
  double n = 0.0, log_sum = 0.0;
  for (Index s : sizes) {
    n += static_cast<double>(s);
    log_sum += std::log(static_cast<double>(s));
  }
  BicValue out;
  out.x = -2.0 * n * q.q_x + static_cast<double>(df.x) * log_sum;
  out.y_given_x = -2.0 * n * q.q_y_given_x + static_cast<double>(df.y_given_x) * log_sum;
  out.total = out.x + out.y_given_x;
  return out;
}

MatrixList b_zero_gradient(std::span<const Matrix> s_xy, std::span<const Matrix> theta,
                           std::span<const double> f) {
  MatrixList g;
  for (std::size_t k = 0; k < s_xy.size(); ++k) g.push_back(2.0 * f[k] * (s_xy[k] * theta[k]));
  return g;
}

MatrixList offdiag_zero_gradient(std::span<const Matrix> s, std::span<const double> f) {
  MatrixList g;
  for (std::size_t k = 0; k < s.size(); ++k) g.push_back(f[k] * s[k]);
  return g;
}

namespace {

bool prox_is_zero(std::span<const double> g, double alpha, bool group, double t,
                  std::vector<double>& work) {
  work.assign(g.begin(), g.end());
  if (group) {
    sparse_group_prox(work, alpha, t, 1.0);
  } else {
    fused_prox(work, alpha * t, (1.0 - alpha) * t);
  }
  return std::all_of(work.begin(), work.end(), [](double v) { return v == 0.0; });
}

}  // namespace

double zero_threshold(std::span<const double> g, double alpha, bool group) {
  std::vector<double> work;
  double max_abs = 0.0, norm = 0.0;
  for (double v : g) {
    max_abs = std::max(max_abs, std::abs(v));
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (max_abs == 0.0) return 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  double hi = alpha > 0.0 ? max_abs / alpha : inf;
  if (group && alpha < 1.0) hi = std::min(hi, norm / (1.0 - alpha));
  if (std::isinf(hi)) {
    // fused with no l1 part: zero only if total fusion lands on 0
    hi = 2.0 * max_abs * static_cast<double>(g.size() * g.size()) + 1.0;
    if (!prox_is_zero(g, alpha, group, hi, work)) return inf;
  }
  for (int i = 0; !prox_is_zero(g, alpha, group, hi, work); ++i) {
    hi = i < 64 ? std::nextafter(hi, inf) : 2.0 * hi;
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && std::nextafter(lo, inf) < hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (prox_is_zero(g, alpha, group, mid, work) ? hi : lo) = mid;
  }
  return hi;
}

namespace {

double family_threshold(const MatrixList& g, double alpha, bool group, bool offdiag_only) {
  const Index rows = g.front().rows(), cols = g.front().cols();
  std::vector<double> vals(g.size());
  double worst = 0.0;
  for (Index m = 0; m < cols; ++m) {
    for (Index h = 0; h < rows; ++h) {
      if (offdiag_only && h >= m) continue;
      for (std::size_t k = 0; k < g.size(); ++k) vals[k] = g[k](h, m);
      worst = std::max(worst, zero_threshold(vals, alpha, group));
    }
  }
  return worst;
}

MatrixList null_theta(std::span<const SufficientStats> stats) {
  MatrixList out;
  for (const auto& s : stats) {
    Matrix t = Matrix::Zero(s.p(), s.p());
    for (Index h = 0; h < s.p(); ++h) t(h, h) = 1.0 / s.s_yy(h, h);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

double lambda_max(std::span<const SufficientStats> stats, std::span<const double> f, double alpha1,
                  std::span<const Matrix> theta) {
  if (stats.empty() || stats.front().q() == 0) return 0.0;
  MatrixList s_xy;
  for (const auto& s : stats) s_xy.push_back(s.s_xy);
  const MatrixList null = theta.empty() ? null_theta(stats) : MatrixList();
  const std::span<const Matrix> th = theta.empty() ? std::span<const Matrix>(null) : theta;
  return family_threshold(b_zero_gradient(s_xy, th, f), alpha1, true, false);
}

double rho_max(std::span<const SufficientStats> stats, std::span<const double> f, double alpha2,
               PenaltyKind kind) {
  if (stats.empty() || stats.front().p() < 2) return 0.0;
  MatrixList s;
  for (const auto& st : stats) s.push_back(st.s_yy);
  return family_threshold(offdiag_zero_gradient(s, f), alpha2, kind == PenaltyKind::Group, true);
}

double nu_max(std::span<const SufficientStats> stats, std::span<const double> f, double alpha3,
              PenaltyKind kind) {
  if (stats.empty() || stats.front().q() < 2) return 0.0;
  MatrixList s;
  for (const auto& st : stats) s.push_back(st.s_xx);
  return family_threshold(offdiag_zero_gradient(s, f), alpha3, kind == PenaltyKind::Group, true);
}

double lambda_max_positive_part(std::span<const SufficientStats> stats,
                                std::span<const double> f) {
  if (stats.empty()) return 0.0;
  double worst = 0.0;
  const Index q = stats.front().q(), p = stats.front().p();
  for (Index j = 0; j < q; ++j) {
    for (Index h = 0; h < p; ++h) {
      double ss = 0.0;
      for (std::size_t k = 0; k < stats.size(); ++k) {
        const double v = std::max(f[k] * stats[k].s_xy(j, h), 0.0);
        ss += v * v;
      }
      worst = std::max(worst, std::sqrt(ss));
    }
  }
  return worst;
}

double rho_max_positive_part(std::span<const SufficientStats> stats, std::span<const double> f,
                             PenaltyKind kind) {
  if (stats.empty()) return 0.0;
  double worst = 0.0;
  const Index p = stats.front().p();
  for (Index m = 0; m < p; ++m) {
    for (Index h = 0; h < m; ++h) {
      if (kind == PenaltyKind::Fused) {
        for (std::size_t k = 0; k < stats.size(); ++k) {
          worst = std::max(worst, std::abs(f[k] * stats[k].s_yy(h, m)));
        }
      } else {
        double ss = 0.0;
        for (std::size_t k = 0; k < stats.size(); ++k) {
          const double v = f[k] * stats[k].s_yy(h, m);
          ss += v * v;
        }
        worst = std::max(worst, std::sqrt(ss));
      }
    }
  }
  return worst;
}

std::vector<double> log_grid(double hi, double ratio, int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {hi};
  const double lhi = std::log(hi), llo = std::log(hi * ratio);
  for (int i = 0; i < count; ++i) {
    out.push_back(std::exp(lhi + (llo - lhi) * static_cast<double>(i) / (count - 1)));
  }
  out.front() = hi;
  return out;
}

}  // namespace jcglasso
