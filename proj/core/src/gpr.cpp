#include "rpmcts/gpr.hpp"

#include <algorithm>
#include <cmath>

namespace rpmcts::gpr {

namespace {

constexpr double kInitialJitter = 1e-10;
constexpr double kMaxJitter = 1e-4;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return d2;
}

}  // namespace

void KernelParams::validate() const {
  if (!std::isfinite(signal_variance) || signal_variance <= 0.0) {
    throw std::invalid_argument("signal variance must be finite and > 0");
  }
  if (!std::isfinite(length_scale) || length_scale <= 0.0) {
    throw std::invalid_argument("length scale must be finite and > 0");
  }
  if (!std::isfinite(noise_variance) || noise_variance < 0.0) {
    throw std::invalid_argument("noise variance must be finite and >= 0");
  }
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, const KernelParams& params,
                  bool same_point_noise) {
  if (a.size() != b.size()) throw std::invalid_argument("rbf_kernel: dimension mismatch");
  const double l2 = params.length_scale * params.length_scale;
  double k = params.signal_variance * std::exp(-squared_distance(a, b) / (2.0 * l2));
  if (same_point_noise) k += params.noise_variance;
  return k;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& inputs, const KernelParams& params) {
  const Eigen::Index n = inputs.rows();
  const double inv_two_l2 = 1.0 / (2.0 * params.length_scale * params.length_scale);
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = params.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d2 = (inputs.row(i) - inputs.row(j)).squaredNorm();
      k(i, j) = k(j, i) = params.signal_variance * std::exp(-d2 * inv_two_l2);
    }
  }
  return k;
}

GpModel GpModel::fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets, const KernelParams& params,
                     TargetMode mode) {
  params.validate();
  const Eigen::Index n = inputs.rows();
  if (n < 1) throw std::invalid_argument("GP fit needs at least one training point");
  if (targets.size() != n) throw std::invalid_argument("GP fit: inputs/targets length mismatch");
  if (!inputs.allFinite() || !targets.allFinite()) {
    throw std::invalid_argument("GP fit: non-finite training data");
  }

  GpModel model;
  model.params_ = params;
  model.prior_mean_ = mode == TargetMode::kCentered ? targets.mean() : 0.0;

  Eigen::MatrixXd gram = kernel_matrix(inputs, params);
  gram.diagonal().array() += params.noise_variance;

  for (double rel = kInitialJitter; rel <= kMaxJitter * (1.0 + 1e-9); rel *= 10.0) {
    Eigen::MatrixXd shifted = gram;
    shifted.diagonal().array() += rel * params.signal_variance;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      model.factor_ = llt.matrixL();
      const Eigen::VectorXd centered = (targets.array() - model.prior_mean_).matrix();
      model.alpha_ = llt.solve(centered);
      model.jitter_ = rel * params.signal_variance;
      model.inputs_ = std::move(inputs);
      model.targets_ = std::move(targets);
      return model;
    }
  }
  throw FitError("kernel matrix not positive definite");
}

Eigen::VectorXd GpModel::cross_covariance(std::span<const double> query) const {
  if (query.size() != dim()) throw std::invalid_argument("GP query: dimension mismatch");
  const Eigen::Map<const Eigen::RowVectorXd> q(query.data(), static_cast<Eigen::Index>(query.size()));
  const double inv_two_l2 = 1.0 / (2.0 * params_.length_scale * params_.length_scale);
  Eigen::VectorXd k(inputs_.rows());
  for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
    k(i) = params_.signal_variance * std::exp(-(inputs_.row(i) - q).squaredNorm() * inv_two_l2);
  }
  return k;
}

double GpModel::posterior_mean(std::span<const double> query) const {
  return prior_mean_ + cross_covariance(query).dot(alpha_);
}

double GpModel::posterior_variance(std::span<const double> query) const {
  const Eigen::VectorXd k = cross_covariance(query);
  const Eigen::VectorXd v = factor_.triangularView<Eigen::Lower>().solve(k);
  return std::max(0.0, params_.signal_variance - v.squaredNorm());
}

Eigen::VectorXd GpModel::posterior_mean_batch(const Eigen::MatrixXd& queries) const {
  if (static_cast<std::size_t>(queries.cols()) != dim()) {
    throw std::invalid_argument("GP query: dimension mismatch");
  }
  // |q - x|^2 = |q|^2 + |x|^2 - 2 q.x, evaluated as one matrix product.
  const double inv_two_l2 = 1.0 / (2.0 * params_.length_scale * params_.length_scale);
  const Eigen::VectorXd qn = queries.rowwise().squaredNorm();
  const Eigen::RowVectorXd xn = inputs_.rowwise().squaredNorm().transpose();
  Eigen::MatrixXd d2 = -2.0 * queries * inputs_.transpose();
  d2.colwise() += qn;
  d2.rowwise() += xn;
  const Eigen::MatrixXd cross =
      params_.signal_variance * (-(d2.array().max(0.0)) * inv_two_l2).exp().matrix();
  return (cross * alpha_).array() + prior_mean_;
}

}  // namespace rpmcts::gpr
