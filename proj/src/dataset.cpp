#include "jcglasso/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace jcglasso {

bool StatusGrid::all_observed() const {
  return std::all_of(cells_.begin(), cells_.end(),
                     [](CellStatus s) { return s == CellStatus::Observed; });
}

Matrix ConditionDataset::joint() const {
  Matrix z(n(), q() + p());
  z << x, y;
  return z;
}

void ConditionDataset::validate() const {
  const Index dim = q() + p();
  if (x.rows() != y.rows()) {
    throw Error(ErrorKind::ShapeError, "X has " + std::to_string(x.rows()) +
                                           " rows but Y has " + std::to_string(y.rows()));
  }
  if (status.rows() != n() || status.cols() != dim) {
    throw Error(ErrorKind::ShapeError, "status grid does not match the data shape");
  }
  if (lower.size() != dim || upper.size() != dim) {
    throw Error(ErrorKind::ShapeError, "censoring bounds must have q + p entries");
  }
  for (Index j = 0; j < dim; ++j) {
    if (std::isfinite(lower[j]) && std::isfinite(upper[j]) && !(lower[j] < upper[j])) {
      throw Error(ErrorKind::InvalidParameters,
                  "lower bound not below upper bound for variable " + std::to_string(j));
    }
  }
  for (Index i = 0; i < n(); ++i) {
    for (Index j = 0; j < dim; ++j) {
      const double v = j < q() ? x(i, j) : y(i, j - q());
      switch (status(i, j)) {
        case CellStatus::Observed:
          if (!std::isfinite(v)) {
            throw Error(ErrorKind::InvalidParameters,
                        "non-finite observed value at row " + std::to_string(i) +
                            ", variable " + std::to_string(j));
          }
          break;
        case CellStatus::MissingAtRandom:
          break;
        case CellStatus::LeftCensored:
          if (!std::isfinite(lower[j]) || v != lower[j]) {
            throw Error(ErrorKind::InvalidParameters,
                        "left-censored cell does not hold the lower limit at row " +
                            std::to_string(i) + ", variable " + std::to_string(j));
          }
          break;
        case CellStatus::RightCensored:
          if (!std::isfinite(upper[j]) || v != upper[j]) {
            throw Error(ErrorKind::InvalidParameters,
                        "right-censored cell does not hold the upper limit at row " +
                            std::to_string(i) + ", variable " + std::to_string(j));
          }
          break;
      }
    }
  }
}

SufficientStats SufficientStats::centered_at(const Vector& mu, const Vector& xi) const {
  SufficientStats out = *this;
  const Vector dx = xbar() - mu;
  const Vector dy = ybar() - xi;
  out.s_xx += dx * dx.transpose();
  out.s_xy += dx * dy.transpose();
  out.s_yy += dy * dy.transpose();
  return out;
}

}  // namespace jcglasso
