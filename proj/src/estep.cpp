#include "jcglasso/estep.hpp"

#include "jcglasso/linalg.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace jcglasso {

namespace {

constexpr double kAsymptoticCutoff = 8.0;

struct StdTail {
  double lambda;  // inverse Mills ratio phi(a) / Q(a)
  double variance;  // variance of N(0,1) truncated to (a, inf)
};

// Series for the upper tail beyond the cutoff. With
//   t = a R(a) = sum_k (-1)^k (2k-1)!! / a^(2k)
// w = a^2 (1 - t) and v = 1 - w are summed term by term, so the variance
// (t^2 - w) / t^2 = (v - 2w/a^2 + w^2/a^4) / t^2 avoids the cancellation in
// 1 - lambda (lambda - a).
StdTail asymptotic_upper_tail(double a) {
  const double inv_a2 = 1.0 / (a * a);
  double one_minus_t = 0.0;
  double w = 0.0;
  double v = 0.0;
  double term = 1.0;  // (2k-1)!! / a^(2k)
  double prev_mag = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    term *= (2.0 * k - 1.0) * inv_a2;
    if (term >= prev_mag) break;  // optimal truncation of a divergent series
    prev_mag = term;
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    one_minus_t += sign * term;
    w += sign * term / inv_a2;
    if (k >= 2) v -= sign * term / inv_a2;
    if (term < 1e-18) break;
  }
  const double t = 1.0 - one_minus_t;
  StdTail out;
  out.lambda = a / t;
  out.variance = (v - 2.0 * w * inv_a2 + w * w * inv_a2 * inv_a2) / (t * t);
  return out;
}

StdTail upper_tail(double a) {
  if (a > kAsymptoticCutoff) return asymptotic_upper_tail(a);
  const double phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
  const double tail = 0.5 * std::erfc(a / std::numbers::sqrt2);
  StdTail out;
  out.lambda = phi / tail;
  out.variance = 1.0 - out.lambda * (out.lambda - a);
  return out;
}

}  // namespace

TruncatedMoments truncated_moments_univariate(double mean, double variance, Interval region) {
  if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
    throw Error(ErrorKind::InvalidParameters,
                "truncation needs a finite mean and a positive finite variance");
  }
  const bool lo_inf = std::isinf(region.lower);
  const bool hi_inf = std::isinf(region.upper);
  if (std::isnan(region.lower) || std::isnan(region.upper) ||
      (lo_inf && region.lower > 0) || (hi_inf && region.upper < 0)) {
    throw Error(ErrorKind::InvalidRegion, "region boundary at infinity on the wrong side");
  }
  if (!lo_inf && !hi_inf) {
    throw Error(ErrorKind::InvalidRegion, "two-sided truncation is not supported");
  }
  if (lo_inf && hi_inf) return {mean, variance};

  const double sd = std::sqrt(variance);
  if (!lo_inf) {
    const StdTail t = upper_tail((region.lower - mean) / sd);
    return {mean + sd * t.lambda, variance * t.variance};
  }
  const StdTail t = upper_tail((mean - region.upper) / sd);
  return {mean - sd * t.lambda, variance * t.variance};
}

Interval cell_region(CellStatus status, double lower, double upper) {
  switch (status) {
    case CellStatus::RightCensored: return Interval::above(upper);
    case CellStatus::LeftCensored: return Interval::below(lower);
    default: return Interval::whole();
  }
}

namespace {

// Conditional law of Z_M given Z_O: covariance Psi_MM^-1 and mean
// psi_M - Psi_MM^-1 Psi_MO (z_O - psi_O).
struct PatternFactor {
  std::vector<Index> miss;
  std::vector<Index> obs;
  Matrix gain;  // Psi_MM^-1 Psi_MO
  Vector cond_var;  // diag(Psi_MM^-1)
};

PatternFactor factor_pattern(const CellStatus* status, const JointPrecision& joint,
                             Index row_index) {
  const Index d = joint.precision.rows();
  PatternFactor f;
  for (Index j = 0; j < d; ++j) {
    (is_unobserved(status[j]) ? f.miss : f.obs).push_back(j);
  }
  const Index m = static_cast<Index>(f.miss.size());
  const Index o = static_cast<Index>(f.obs.size());
  if (m == 0) return f;
  Matrix pmm(m, m), pmo(m, o);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) pmm(a, b) = joint.precision(f.miss[a], f.miss[b]);
    for (Index b = 0; b < o; ++b) pmo(a, b) = joint.precision(f.miss[a], f.obs[b]);
  }
  Eigen::LLT<Matrix> llt(pmm);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::ConditioningFailure,
                "singular unobserved block at row " + std::to_string(row_index));
  }
  f.gain = llt.solve(pmo);
  f.cond_var = llt.solve(Matrix::Identity(m, m)).diagonal();
  return f;
}

void apply_pattern(const PatternFactor& f, const Vector& z, const CellStatus* status,
                   const JointPrecision& joint, const Vector& lower, const Vector& upper,
                   Index row_index, RowMoments& out) {
  out.zhat = z;
  out.variance = Vector::Zero(z.size());
  if (f.miss.empty()) return;
  Vector resid(static_cast<Index>(f.obs.size()));
  for (std::size_t b = 0; b < f.obs.size(); ++b) {
    const Index j = f.obs[b];
    resid[static_cast<Index>(b)] = z[j] - joint.mean[j];
  }
  const Vector shift = f.gain * resid;
  for (std::size_t a = 0; a < f.miss.size(); ++a) {
    const Index j = f.miss[a];
    const Index ai = static_cast<Index>(a);
    const double m = joint.mean[j] - shift[ai];
    TruncatedMoments tm;
    try {
      tm = truncated_moments_univariate(m, f.cond_var[ai],
                                        cell_region(status[j], lower[j], upper[j]));
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (row " + std::to_string(row_index) + ")");
    }
    out.zhat[j] = tm.mean;
    out.variance[j] = tm.variance;
  }
}

SufficientStats stats_from_imputed(Matrix zhat, const Vector& variance_sum, Index q) {
  const Index n = zhat.rows();
  const Index d = zhat.cols();
  const Index p = d - q;
  SufficientStats s;
  s.n = n;
  const double inv_n = 1.0 / static_cast<double>(n);
  s.zbar = zhat.colwise().mean().transpose();
  const Matrix centered = zhat.rowwise() - s.zbar.transpose();
  Matrix cov = centered.transpose() * centered * inv_n;
  cov.diagonal() += variance_sum * inv_n;
  symmetrize(cov);
  const double min_eig = d > 0 ? min_eigenvalue(cov) : 0.0;
  if (min_eig < 0.0) {
    s.psd_shift = std::abs(min_eig) + 1e-8;
    cov.diagonal().array() += s.psd_shift;
  }
  s.chat = cov + s.zbar * s.zbar.transpose();
  symmetrize(s.chat);
  s.s_xx = cov.topLeftCorner(q, q);
  s.s_xy = cov.topRightCorner(q, p);
  s.s_yy = cov.bottomRightCorner(p, p);
  s.zhat = std::move(zhat);
  return s;
}

}  // namespace

RowMoments conditional_row_moments(const Vector& z, const CellStatus* status,
                                   const JointPrecision& joint, const Vector& lower,
                                   const Vector& upper, Index row_index) {
  const PatternFactor f = factor_pattern(status, joint, row_index);
  RowMoments out;
  apply_pattern(f, z, status, joint, lower, upper, row_index, out);
  return out;
}

SufficientStats compute_sufficient_stats(const ConditionDataset& data, const ModelParams& params) {
  data.validate();
  if (params.q() != data.q() || params.p() != data.p()) {
    throw Error(ErrorKind::ShapeError, "parameter dimensions do not match the dataset");
  }
  const JointPrecision joint = assemble_joint_precision(params);
  const Index n = data.n();
  const Index d = data.q() + data.p();
  Matrix z = data.joint();
  Vector variance_sum = Vector::Zero(d);

  // Rows grouped by status pattern; std::map keeps the processing order fixed.
  std::map<std::vector<CellStatus>, std::vector<Index>> patterns;
  for (Index i = 0; i < n; ++i) {
    const CellStatus* r = data.status.row(i);
    bool any = false;
    for (Index j = 0; j < d && !any; ++j) any = is_unobserved(r[j]);
    if (any) patterns[std::vector<CellStatus>(r, r + d)].push_back(i);
  }

  RowMoments rm;
  for (const auto& [pattern, rows] : patterns) {
    const PatternFactor f = factor_pattern(pattern.data(), joint, rows.front());
    for (Index i : rows) {
      apply_pattern(f, z.row(i).transpose(), pattern.data(), joint, data.lower, data.upper, i,
                    rm);
      z.row(i) = rm.zhat.transpose();
      variance_sum += rm.variance;
    }
  }
  return stats_from_imputed(std::move(z), variance_sum, data.q());
}

SufficientStats complete_data_stats(const Matrix& z, Index q) {
  return stats_from_imputed(z, Vector::Zero(z.cols()), q);
}

}  // namespace jcglasso
