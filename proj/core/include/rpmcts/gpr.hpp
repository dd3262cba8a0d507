#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace rpmcts::gpr {

struct KernelParams {
  double signal_variance = 1.0;  // sigma_f^2
  double length_scale = 1.0;     // l
  double noise_variance = 0.0;   // sigma_n^2

  void validate() const;
};

/// Prior mean handling for fit(). The plain zero-mean GP reads targets as
/// given; centered mode fits y - mean(y) and adds the mean back to predictions.
enum class TargetMode { kZeroMean, kCentered };

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sigma_f^2 exp(-|a-b|^2 / (2 l^2)), plus sigma_n^2 when same_point_noise is
/// set (the diagonal contribution of the noise term).
double rbf_kernel(std::span<const double> a, std::span<const double> b, const KernelParams& params,
                  bool same_point_noise = false);

/// Exact GP posterior built from a Cholesky factor of K + sigma_n^2 I.
/// Immutable after construction; queries are safe from concurrent readers.
class GpModel {
 public:
  /// Rows of `inputs` are training points. Throws FitError("kernel matrix not
  /// positive definite") when jitter escalation is exhausted.
  static GpModel fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets, const KernelParams& params,
                     TargetMode mode = TargetMode::kZeroMean);

  double posterior_mean(std::span<const double> query) const;
  double posterior_variance(std::span<const double> query) const;

  /// Posterior means at every row of `queries`, vectorised.
  Eigen::VectorXd posterior_mean_batch(const Eigen::MatrixXd& queries) const;

  std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(inputs_.cols()); }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& targets() const { return targets_; }
  const KernelParams& params() const { return params_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::MatrixXd& factor() const { return factor_; }  // lower triangular
  double jitter() const { return jitter_; }
  double prior_mean() const { return prior_mean_; }

 private:
  GpModel() = default;
  Eigen::VectorXd cross_covariance(std::span<const double> query) const;

  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  KernelParams params_;
  Eigen::MatrixXd factor_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
  double prior_mean_ = 0.0;
};

/// Dense kernel matrix K over the rows of `inputs` (noise-free).
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& inputs, const KernelParams& params);

}  // namespace rpmcts::gpr
