#pragma once

#include "jcglasso/dataset.hpp"
#include "jcglasso/model.hpp"
#include "jcglasso/types.hpp"

#include <span>
#include <vector>

namespace jcglasso {

struct DegreesOfFreedom {
  Index x = 0;
  Index y_given_x = 0;
};

struct BicValue {
  double x = 0.0;
  double y_given_x = 0.0;
  double total = 0.0;
};

/// Number of distinct nonzero values over all positions of a family of
/// matrices. At each position the K nonzero values are sorted and values
/// within 1e-8 of their predecessor are counted once. `upper_triangle`
/// restricts positions to h <= m.
Index count_distinct_nonzero(std::span<const Matrix> mats, bool upper_triangle);

/// df_x from {Omega}; df_y|x from {B} (all entries) and {Theta} (h <= m).
DegreesOfFreedom degrees_of_freedom(std::span<const ModelParams> params);

/// bic_x = -2 n q_x + df_x sum_k log n_k, likewise for y|x; total is their sum.
BicValue bic(const QValue& q, const DegreesOfFreedom& df, std::span<const Index> sizes);

/// Gradient magnitudes that decide whether the all-zero B solves the B
/// subproblem: g_k = 2 f_k S_xy,k Theta_k.
MatrixList b_zero_gradient(std::span<const Matrix> s_xy, std::span<const Matrix> theta,
                           std::span<const double> f);

/// Off-diagonal gradients at the diagonal solution diag(1 / S_hh): g_k = f_k S_k.
MatrixList offdiag_zero_gradient(std::span<const Matrix> s, std::span<const double> f);

/// Smallest t with prox_{t P}(g) = 0 for the K values of one position:
/// sparse-group penalty for `group`, otherwise fused. +inf if no t works.
double zero_threshold(std::span<const double> g, double alpha, bool group);

/// Smallest lambda for which B = 0 solves the B subproblem, with Theta_k at
/// its null value diag(1 / S_yy,k) unless `theta` is given.
double lambda_max(std::span<const SufficientStats> stats, std::span<const double> f, double alpha1,
                  std::span<const Matrix> theta = {});

/// Smallest rho for which a diagonal Theta solves the Theta subproblem at B = 0.
double rho_max(std::span<const SufficientStats> stats, std::span<const double> f, double alpha2,
               PenaltyKind kind);

/// Smallest nu for which a diagonal Omega solves the Omega subproblem.
double nu_max(std::span<const SufficientStats> stats, std::span<const double> f, double alpha3,
              PenaltyKind kind);

/// Positive-part formula max_{j,h} (sum_k (f_k S_xy,k[j,h])_+^2)^(1/2).
double lambda_max_positive_part(std::span<const SufficientStats> stats, std::span<const double> f);

/// Closed-form bound on the strict upper triangle of f_k S_yy,k: per condition
/// maximum absolute value for fused, maximum root sum of squares across
/// conditions for group.
double rho_max_positive_part(std::span<const SufficientStats> stats, std::span<const double> f,
                             PenaltyKind kind);

/// `count` log-spaced values from hi down to ratio * hi.
std::vector<double> log_grid(double hi, double ratio, int count);

}  // namespace jcglasso
