#include "jcglasso/linalg.hpp"

#include <cmath>
#include <limits>

namespace jcglasso {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameters: return "invalid-parameters";
    case ErrorKind::ShapeError: return "shape-error";
    case ErrorKind::InvalidRegion: return "invalid-region";
    case ErrorKind::ConditioningFailure: return "conditioning-failure";
    case ErrorKind::InvalidStats: return "invalid-stats";
    case ErrorKind::DegenerateVariable: return "degenerate-variable";
    case ErrorKind::InvalidGrid: return "invalid-grid";
    case ErrorKind::DegeneratePath: return "degenerate-path";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::ParseError: return "parse-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void symmetrize(Matrix& a) {
  const Index n = a.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  }
}

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const Index n = a.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      if (!(std::abs(a(i, j) - a(j, i)) <= tol)) return false;
    }
  }
  return true;
}

double min_eigenvalue(const Matrix& a) {
  if (a.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

std::optional<double> log_det_pd(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const auto& l = llt.matrixLLT();
  double acc = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    const double d = l(i, i);
    if (!(d > 0.0)) return std::nullopt;
    acc += std::log(d);
  }
  return 2.0 * acc;
}

std::optional<Matrix> inverse_pd(const Matrix& a) {
  if (a.rows() == 0) return Matrix(0, 0);
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix inv = llt.solve(Matrix::Identity(a.rows(), a.cols()));
  symmetrize(inv);
  return inv;
}

}  // namespace jcglasso
