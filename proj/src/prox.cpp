#include "jcglasso/prox.hpp"

#include "jcglasso/linalg.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace jcglasso {

namespace {

constexpr std::size_t kMaxEnumerated = 12;
constexpr double kSymmetryTol = 1e-8;

double fusion_objective(std::span<const double> g, std::span<const double> a, double w) {
  double obj = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    obj += 0.5 * (g[k] - a[k]) * (g[k] - a[k]);
    for (std::size_t k2 = k + 1; k2 < g.size(); ++k2) obj += w * std::abs(g[k] - g[k2]);
  }
  return obj;
}

// Exact fusion prox by enumeration. In a maximal block of equal values the
// stationarity condition summed over the block gives
//   c = mean(a_block) - w (count_before - count_after)
// so every contiguous partition of the sorted entries yields one candidate and
// the optimum is the candidate with the least objective.
void fusion_enumerate(std::span<double> a, double w) {
  const std::size_t kk = a.size();
  std::array<std::size_t, kMaxEnumerated> order{};
  std::iota(order.begin(), order.begin() + kk, std::size_t{0});
  std::stable_sort(order.begin(), order.begin() + kk,
                   [&](std::size_t i, std::size_t j) { return a[i] < a[j]; });
  std::array<double, kMaxEnumerated> sorted{}, prefix{}, cand{}, best{};
  for (std::size_t i = 0; i < kk; ++i) sorted[i] = a[order[i]];
  double run = 0.0;
  for (std::size_t i = 0; i < kk; ++i) {
    run += sorted[i];
    prefix[i] = run;
  }
  const std::span<const double> sorted_view(sorted.data(), kk);
  double best_obj = std::numeric_limits<double>::infinity();
  const std::uint32_t patterns = 1u << (kk - 1);
  for (std::uint32_t cuts = 0; cuts < patterns; ++cuts) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < kk; ++i) {
      const bool end_here = (i + 1 == kk) || ((cuts >> i) & 1u);
      if (!end_here) continue;
      const double sum = prefix[i] - (start > 0 ? prefix[start - 1] : 0.0);
      const double len = static_cast<double>(i + 1 - start);
      const double before = static_cast<double>(start);
      const double after = static_cast<double>(kk - 1 - i);
      const double c = sum / len - w * (before - after);
      for (std::size_t j = start; j <= i; ++j) cand[j] = c;
      start = i + 1;
    }
    const double obj = fusion_objective(std::span<const double>(cand.data(), kk), sorted_view, w);
    if (obj < best_obj) {
      best_obj = obj;
      best = cand;
    }
  }
  for (std::size_t i = 0; i < kk; ++i) a[order[i]] = best[i];
}

// Dual of the fusion prox: g = a - D^T z with edge duals z_e in [-w, w].
// Accelerated projected gradient with step 1/K (the largest Laplacian
// eigenvalue of the complete graph).
void fusion_dual(std::span<double> a, double w) {
  const std::size_t kk = a.size();
  const std::size_t edges = kk * (kk - 1) / 2;
  std::vector<double> z(edges, 0.0), y(edges, 0.0), z_prev(edges, 0.0), g(kk);
  const double step = 1.0 / static_cast<double>(kk);
  double t = 1.0;
  auto primal = [&](const std::vector<double>& dual) {
    std::copy(a.begin(), a.end(), g.begin());
    std::size_t e = 0;
    for (std::size_t i = 0; i < kk; ++i) {
      for (std::size_t j = i + 1; j < kk; ++j, ++e) {
        g[i] -= dual[e];
        g[j] += dual[e];
      }
    }
  };
  for (int it = 0; it < 100000; ++it) {
    primal(y);
    z_prev = z;
    std::size_t e = 0;
    double change = 0.0;
    for (std::size_t i = 0; i < kk; ++i) {
      for (std::size_t j = i + 1; j < kk; ++j, ++e) {
        z[e] = std::clamp(y[e] + step * (g[i] - g[j]), -w, w);
        change = std::max(change, std::abs(z[e] - z_prev[e]));
      }
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t k = 0; k < edges; ++k) {
      y[k] = z[k] + ((t - 1.0) / t_next) * (z[k] - z_prev[k]);
    }
    t = t_next;
    if (change <= 1e-12 * std::max(1.0, w)) break;
  }
  primal(z);
  std::copy(g.begin(), g.end(), a.begin());
}

}  // namespace

double soft_threshold(double a, double t) {
  if (a > t) return a - t;
  if (a < -t) return a + t;
  return 0.0;
}

void sparse_group_prox(std::span<double> a, double alpha1, double lam, double tau) {
  const double t1 = alpha1 * lam / tau;
  const double t2 = (1.0 - alpha1) * lam / tau;
  double ss = 0.0;
  for (double& v : a) {
    v = soft_threshold(v, t1);
    ss += v * v;
  }
  const double norm = std::sqrt(ss);
  if (norm <= t2) {
    std::fill(a.begin(), a.end(), 0.0);
    return;
  }
  const double scale = 1.0 - t2 / norm;
  for (double& v : a) v *= scale;
}

Vector sparse_group_prox(const Vector& a, double alpha1, double lam, double tau) {
  Vector out = a;
  sparse_group_prox(std::span<double>(out.data(), static_cast<std::size_t>(out.size())), alpha1,
                    lam, tau);
  return out;
}

void fused_prox(std::span<double> a, double l1_weight, double fusion_weight) {
  const std::size_t kk = a.size();
  if (kk >= 2 && fusion_weight > 0.0) {
    if (kk == 2) {
      const double diff = a[1] - a[0];
      if (fusion_weight >= 0.5 * std::abs(diff)) {
        // fused: both entries take the bitwise-identical mean
        a[0] = a[1] = 0.5 * (a[0] + a[1]);
      } else {
        const double dir = diff > 0 ? 1.0 : -1.0;
        a[0] += dir * fusion_weight;
        a[1] -= dir * fusion_weight;
      }
    } else if (kk <= kMaxEnumerated) {
      fusion_enumerate(a, fusion_weight);
    } else {
      fusion_dual(a, fusion_weight);
    }
  }
  for (double& v : a) v = soft_threshold(v, l1_weight);
}

Vector fused_prox(const Vector& a, double l1_weight, double fusion_weight) {
  Vector out = a;
  fused_prox(std::span<double>(out.data(), static_cast<std::size_t>(out.size())), l1_weight,
             fusion_weight);
  return out;
}

Matrix logdet_prox(const Matrix& s, const Matrix& a, double f, double tau) {
  if (s.rows() != s.cols() || a.rows() != a.cols() || s.rows() != a.rows()) {
    throw Error(ErrorKind::ShapeError, "logdet prox needs square matrices of equal size");
  }
  if (!is_symmetric(s, kSymmetryTol) || !is_symmetric(a, kSymmetryTol)) {
    throw Error(ErrorKind::ShapeError, "logdet prox needs symmetric inputs");
  }
  if (!(f > 0.0) || !(tau > 0.0)) {
    throw Error(ErrorKind::InvalidParameters, "logdet prox needs f > 0 and tau > 0");
  }
  Matrix m = (tau / f) * a - s;
  symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const double c = 4.0 * tau / f;
  Vector theta(m.rows());
  for (Index j = 0; j < m.rows(); ++j) {
    const double d = es.eigenvalues()[j];
    const double root = std::sqrt(d * d + c);
    // d + root, rewritten to avoid cancellation when d is very negative
    const double num = d >= 0.0 ? d + root : c / (root - d);
    theta[j] = num * f / (2.0 * tau);
  }
  Matrix out = es.eigenvectors() * theta.asDiagonal() * es.eigenvectors().transpose();
  symmetrize(out);
  return out;
}

}  // namespace jcglasso
