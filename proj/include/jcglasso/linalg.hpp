#pragma once

#include "jcglasso/types.hpp"

#include <optional>

namespace jcglasso {

/// A <- (A + A^T) / 2.
void symmetrize(Matrix& a);

bool is_symmetric(const Matrix& a, double tol);

/// Smallest eigenvalue of a symmetric matrix; +inf for an empty matrix.
double min_eigenvalue(const Matrix& a);

/// log det of a symmetric positive-definite matrix, or nullopt when the
/// Cholesky factorization fails.
std::optional<double> log_det_pd(const Matrix& a);

/// Inverse of a symmetric positive-definite matrix, or nullopt when the
/// Cholesky factorization fails.
std::optional<Matrix> inverse_pd(const Matrix& a);

/// Sum of absolute values of all entries.
inline double l1_norm(const Matrix& a) { return a.cwiseAbs().sum(); }

}  // namespace jcglasso
