#pragma once

#include "jcglasso/dataset.hpp"
#include "jcglasso/model.hpp"
#include "jcglasso/types.hpp"

#include <limits>

namespace jcglasso {

/// Integration region of one coordinate: (-inf, upper), (lower, +inf) or the
/// whole line. Two finite ends are not supported.
struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  static Interval whole() { return {}; }
  static Interval above(double u) { return {u, std::numeric_limits<double>::infinity()}; }
  static Interval below(double l) { return {-std::numeric_limits<double>::infinity(), l}; }
};

struct TruncatedMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of N(mean, variance) restricted to `region`. Standardized
/// bounds beyond 8 switch to the asymptotic Mills-ratio series.
TruncatedMoments truncated_moments_univariate(double mean, double variance, Interval region);

/// Integration region of coordinate j for a cell with the given status.
Interval cell_region(CellStatus status, double lower, double upper);

struct RowMoments {
  Vector zhat;  // conditional means, observed entries copied
  Vector variance;  // truncated conditional variances, 0 on observed entries
};

/// Conditional moments of one row given its observed coordinates. Each
/// unobserved coordinate is conditioned on the observed set only and then
/// truncated to its own region. The row's second-moment contribution is
/// zhat zhat^T + diag(variance).
RowMoments conditional_row_moments(const Vector& z, const CellStatus* status,
                                   const JointPrecision& joint, const Vector& lower,
                                   const Vector& upper, Index row_index = 0);

/// E-step for one condition. Rows sharing a missingness pattern share one
/// factorization of the unobserved precision block.
SufficientStats compute_sufficient_stats(const ConditionDataset& data, const ModelParams& params);

/// Sufficient statistics of the data taken at face value (no E-step).
SufficientStats complete_data_stats(const Matrix& z, Index q);

}  // namespace jcglasso
