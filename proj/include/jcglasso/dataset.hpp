#pragma once

#include "jcglasso/types.hpp"

#include <cstdint>
#include <vector>

namespace jcglasso {

enum class CellStatus : std::uint8_t {
  Observed,
  MissingAtRandom,
  LeftCensored,
  RightCensored,
};

inline bool is_unobserved(CellStatus s) { return s != CellStatus::Observed; }

/// Row-major grid of cell statuses, one row per observation and one column per
/// joint coordinate (covariates first, then responses).
class StatusGrid {
 public:
  StatusGrid() = default;
  StatusGrid(Index rows, Index cols, CellStatus fill = CellStatus::Observed)
      : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows * cols), fill) {}

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  CellStatus operator()(Index i, Index j) const { return cells_[offset(i, j)]; }
  CellStatus& operator()(Index i, Index j) { return cells_[offset(i, j)]; }

  const CellStatus* row(Index i) const { return cells_.data() + offset(i, 0); }

  bool all_observed() const;
  bool operator==(const StatusGrid&) const = default;

 private:
  std::size_t offset(Index i, Index j) const {
    return static_cast<std::size_t>(i * cols_ + j);
  }

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<CellStatus> cells_;
};

/// Observations from one condition. Censored cells hold their detection
/// limit: LeftCensored cells store lower[j], RightCensored cells upper[j].
struct ConditionDataset {
  Matrix x;  // n x q covariates
  Matrix y;  // n x p responses
  StatusGrid status;  // n x (q + p)
  Vector lower;  // q + p, may be -inf
  Vector upper;  // q + p, may be +inf

  Index n() const { return y.rows(); }
  Index q() const { return x.cols(); }
  Index p() const { return y.cols(); }

  /// [X Y]
  Matrix joint() const;

  /// Checks shapes, bound ordering and the stored-value convention for
  /// censored cells; throws shape-error or invalid-parameters.
  void validate() const;
};

/// Conditional first and second moments of one condition under the current
/// parameters. The S blocks are centered at `zbar`.
struct SufficientStats {
  Matrix zhat;  // n x (q + p) imputed data
  Matrix chat;  // (q + p) x (q + p) second moments
  Vector zbar;
  Matrix s_xx;  // q x q
  Matrix s_xy;  // q x p
  Matrix s_yy;  // p x p
  Index n = 0;
  double psd_shift = 0.0;  // ridge added by the PSD safeguard, 0 if none

  Index q() const { return s_xx.rows(); }
  Index p() const { return s_yy.rows(); }
  Vector xbar() const { return zbar.head(q()); }
  Vector ybar() const { return zbar.tail(p()); }

  /// Copy with the S blocks re-centered at (mu, xi):
  /// S(psi) = S(zbar) + (zbar - psi)(zbar - psi)^T.
  SufficientStats centered_at(const Vector& mu, const Vector& xi) const;
};

}  // namespace jcglasso
