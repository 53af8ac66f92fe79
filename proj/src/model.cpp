#include "jcglasso/model.hpp"

#include "jcglasso/linalg.hpp"

#include <cmath>
#include <string>

namespace jcglasso {

namespace {

constexpr double kSymmetryTol = 1e-10;

void require_pd(const Matrix& m, const char* name) {
  if (!is_symmetric(m, kSymmetryTol)) {
    throw Error(ErrorKind::InvalidParameters, std::string(name) + " is not symmetric");
  }
  if (m.rows() > 0 && !log_det_pd(m)) {
    throw Error(ErrorKind::InvalidParameters, std::string(name) + " is not positive definite");
  }
}

}  // namespace

const char* to_string(PenaltyKind kind) noexcept {
  return kind == PenaltyKind::Fused ? "fused" : "group";
}

Vector ModelParams::intercept() const { return xi - b.transpose() * mu; }

void ModelParams::validate() const {
  const Index nq = q(), np = p();
  if (omega.rows() != nq || omega.cols() != nq || b.rows() != nq || b.cols() != np ||
      theta.rows() != np || theta.cols() != np) {
    throw Error(ErrorKind::InvalidParameters, "parameter shapes are inconsistent");
  }
  require_pd(omega, "Omega");
  require_pd(theta, "Theta");
}

void PenaltyConfig::validate() const {
  auto weight = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidConfig, std::string(name) + " must be a finite value >= 0");
    }
  };
  auto mix = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::InvalidConfig, std::string(name) + " must lie in [0, 1]");
    }
  };
  weight(lambda, "lambda");
  weight(rho, "rho");
  weight(nu, "nu");
  mix(alpha1, "alpha1");
  mix(alpha2, "alpha2");
  mix(alpha3, "alpha3");
}

JointPrecision assemble_joint_precision(const ModelParams& params) {
  params.validate();
  const Index q = params.q(), p = params.p();
  const Matrix bt = params.b * params.theta;  // q x p

  JointPrecision out;
  out.precision.resize(q + p, q + p);
  Matrix top_left = params.omega + bt * params.b.transpose();
  symmetrize(top_left);
  out.precision.topLeftCorner(q, q) = top_left;
  out.precision.topRightCorner(q, p) = -bt;
  out.precision.bottomLeftCorner(p, q) = -bt.transpose();
  out.precision.bottomRightCorner(p, p) = params.theta;
  out.mean.resize(q + p);
  out.mean << params.mu, params.xi;
  return out;
}

Matrix conditional_residual_covariance(const SufficientStats& stats, const Matrix& b) {
  const Index q = stats.q(), p = stats.p();
  if (b.rows() != q || b.cols() != p || stats.s_xy.rows() != q || stats.s_xy.cols() != p) {
    throw Error(ErrorKind::ShapeError, "B is " + std::to_string(b.rows()) + "x" +
                                           std::to_string(b.cols()) + ", stats imply " +
                                           std::to_string(q) + "x" + std::to_string(p));
  }
  const Matrix yx_b = stats.s_xy.transpose() * b;  // p x p
  Matrix out = stats.s_yy - yx_b - yx_b.transpose() + b.transpose() * stats.s_xx * b;
  symmetrize(out);
  return out;
}

QValue q_function(std::span<const ModelParams> params, std::span<const SufficientStats> stats,
                  std::span<const double> weights) {
  if (params.size() != stats.size() || params.size() != weights.size()) {
    throw Error(ErrorKind::ShapeError, "params, stats and weights differ in length");
  }
  QValue out;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const ModelParams& m = params[k];
    const SufficientStats s = stats[k].centered_at(m.mu, m.xi);
    const auto ld_omega = log_det_pd(m.omega);
    const auto ld_theta = log_det_pd(m.theta);
    if (!ld_omega || !ld_theta) {
      throw Error(ErrorKind::InvalidParameters,
                  "non positive-definite precision in condition " + std::to_string(k));
    }
    const double f = weights[k];
    out.q_x += f * (*ld_omega - (m.omega.cwiseProduct(s.s_xx)).sum());
    const Matrix s_cond = conditional_residual_covariance(s, m.b);
    out.q_y_given_x += f * (*ld_theta - (m.theta.cwiseProduct(s_cond)).sum());
  }
  return out;
}

double sparse_group_penalty(std::span<const Matrix> b, double alpha) {
  if (b.empty()) return 0.0;
  double l1 = 0.0, group = 0.0;
  const Index rows = b[0].rows(), cols = b[0].cols();
  for (const Matrix& m : b) {
    if (m.rows() != rows || m.cols() != cols) {
      throw Error(ErrorKind::ShapeError, "coefficient matrices differ in shape");
    }
    l1 += m.cwiseAbs().sum();
  }
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      double ss = 0.0;
      for (const Matrix& m : b) ss += m(i, j) * m(i, j);
      group += std::sqrt(ss);
    }
  }
  return alpha * l1 + (1.0 - alpha) * group;
}

double joint_penalty(std::span<const Matrix> mats, double alpha, PenaltyKind kind) {
  if (mats.empty()) return 0.0;
  const Index n = mats[0].rows();
  for (const Matrix& m : mats) {
    if (m.rows() != n || m.cols() != n) {
      throw Error(ErrorKind::ShapeError, "precision matrices differ in shape");
    }
  }
  const std::size_t kk = mats.size();
  double l1 = 0.0, coupling = 0.0;
  for (Index h = 0; h < n; ++h) {
    for (Index m = 0; m < n; ++m) {
      if (h == m) continue;
      double ss = 0.0;
      for (std::size_t k = 0; k < kk; ++k) {
        const double v = mats[k](h, m);
        l1 += std::abs(v);
        ss += v * v;
        if (kind == PenaltyKind::Fused) {
          for (std::size_t k2 = k + 1; k2 < kk; ++k2) coupling += std::abs(v - mats[k2](h, m));
        }
      }
      if (kind == PenaltyKind::Group) coupling += std::sqrt(ss);
    }
  }
  return alpha * l1 + (1.0 - alpha) * coupling;
}

PenaltyValue penalty_value(std::span<const ModelParams> params, const PenaltyConfig& config) {
  config.validate();
  MatrixList b, theta, omega;
  for (const auto& m : params) {
    b.push_back(m.b);
    theta.push_back(m.theta);
    omega.push_back(m.omega);
  }
  PenaltyValue out;
  out.b = sparse_group_penalty(b, config.alpha1);
  out.theta = joint_penalty(theta, config.alpha2, config.theta_kind);
  out.omega = joint_penalty(omega, config.alpha3, config.omega_kind);
  return out;
}

std::vector<double> condition_weights(std::span<const Index> sizes) {
  double n = 0.0;
  for (Index s : sizes) n += static_cast<double>(s);
  std::vector<double> f;
  f.reserve(sizes.size());
  for (Index s : sizes) f.push_back(static_cast<double>(s) / (2.0 * n));
  return f;
}

}  // namespace jcglasso
