#pragma once

#include "jcglasso/types.hpp"

#include <span>

namespace jcglasso {

/// sign(a) max(|a| - t, 0); |a| == t maps to 0.
double soft_threshold(double a, double t);

/// Prox of (lam / tau) [alpha1 ||g||_1 + (1 - alpha1) ||g||_2] on one group,
/// in place: soft-threshold at alpha1 lam / tau, then shrink the group norm by
/// (1 - alpha1) lam / tau. A group whose thresholded norm does not exceed the
/// shrinkage becomes exactly zero.
void sparse_group_prox(std::span<double> a, double alpha1, double lam, double tau);
Vector sparse_group_prox(const Vector& a, double alpha1, double lam, double tau);

/// Prox of l1_weight sum_k |g_k| + fusion_weight sum_{k<k'} |g_k - g_k'|, in place.
/// The fusion-only problem is solved exactly (the minimizer preserves the order
/// of `a`, so it is the best of the contiguous block partitions of the sorted
/// values) and then soft-thresholded at l1_weight. Beyond 12 entries the
/// fusion step switches to a dual projected-gradient solver.
void fused_prox(std::span<double> a, double l1_weight, double fusion_weight);
Vector fused_prox(const Vector& a, double l1_weight, double fusion_weight);

/// argmin_X f [-logdet X + tr(S X)] + (tau / 2) ||X - A||_F^2, solved through
/// one eigendecomposition of (tau / f) A - S.
Matrix logdet_prox(const Matrix& s, const Matrix& a, double f, double tau);

}  // namespace jcglasso
