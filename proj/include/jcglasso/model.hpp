#pragma once

#include "jcglasso/dataset.hpp"
#include "jcglasso/types.hpp"

#include <span>

namespace jcglasso {

/// Parameters of one condition. Z = (X, Y) with X first.
struct ModelParams {
  Vector mu;  // q
  Vector xi;  // p
  Matrix omega;  // q x q precision of X
  Matrix b;  // q x p regression coefficients
  Matrix theta;  // p x p precision of Y given X

  Index q() const { return mu.size(); }
  Index p() const { return xi.size(); }

  /// beta0 = xi - B^T mu
  Vector intercept() const;

  /// Throws invalid-parameters unless shapes agree, Omega and Theta are
  /// symmetric within 1e-10 and positive definite.
  void validate() const;
};

struct JointPrecision {
  Matrix precision;  // Psi, (q + p) x (q + p)
  Vector mean;  // psi = (mu, xi)
};

enum class PenaltyKind { Fused, Group };

const char* to_string(PenaltyKind kind) noexcept;

struct PenaltyConfig {
  double lambda = 0.0;  // B
  double rho = 0.0;  // Theta
  double nu = 0.0;  // Omega
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  double alpha3 = 0.5;
  PenaltyKind theta_kind = PenaltyKind::Group;
  PenaltyKind omega_kind = PenaltyKind::Group;

  void validate() const;
};

/// Psi = [Omega + B Theta B^T, -B Theta; -Theta B^T, Theta].
JointPrecision assemble_joint_precision(const ModelParams& params);

/// S_yy - S_yx B - B^T S_xy + B^T S_xx B, symmetrized.
Matrix conditional_residual_covariance(const SufficientStats& stats, const Matrix& b);

struct QValue {
  double q_x = 0.0;
  double q_y_given_x = 0.0;
  double total() const { return q_x + q_y_given_x; }
};

/// Expected complete-data log-likelihood, additive constants dropped:
///   q_x = sum_k f_k [logdet Omega_k - tr(Omega_k S_xx,k)]
///   q_y|x = sum_k f_k [logdet Theta_k - tr(Theta_k S_y|x,k(B_k))]
/// The S blocks are re-centered at each condition's (mu, xi), so the mean
/// term of Q is included.
QValue q_function(std::span<const ModelParams> params, std::span<const SufficientStats> stats,
                  std::span<const double> weights);

/// Unweighted penalty values P_alpha1({B}), P_alpha2({Theta}), P_alpha3({Omega});
/// the configured weights are applied by `total`.
struct PenaltyValue {
  double b = 0.0;
  double theta = 0.0;
  double omega = 0.0;

  double total(const PenaltyConfig& config) const {
    return config.lambda * b + config.rho * theta + config.nu * omega;
  }
};

PenaltyValue penalty_value(std::span<const ModelParams> params, const PenaltyConfig& config);

/// alpha sum_k ||B_k||_1 + (1 - alpha) sum_{j,h} (sum_k B_k[j,h]^2)^(1/2).
/// Groups are single coefficient positions across conditions.
double sparse_group_penalty(std::span<const Matrix> b, double alpha);

/// Off-diagonal joint penalty over both (h,m) and (m,h):
///   fused: alpha sum_k sum_{h!=m} |t_k| + (1 - alpha) sum_{k<k'} sum_{h!=m} |t_k - t_k'|
///   group: alpha sum_k sum_{h!=m} |t_k| + (1 - alpha) sum_{h!=m} ||t_.||_2
double joint_penalty(std::span<const Matrix> mats, double alpha, PenaltyKind kind);

/// f_k = n_k / (2 n).
std::vector<double> condition_weights(std::span<const Index> sizes);

}  // namespace jcglasso
