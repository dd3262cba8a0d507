#include <cmath>
#include <random>

#include "doctest.h"
#include "rpmcts/gpr.hpp"
#include "support.hpp"

using namespace rpmcts::gpr;

namespace {

GpModel fit1(double x, double y, KernelParams p, TargetMode mode = TargetMode::kZeroMean) {
  Eigen::MatrixXd in(1, 1);
  in(0, 0) = x;
  Eigen::VectorXd t(1);
  t(0) = y;
  return GpModel::fit(in, t, p, mode);
}

}  // namespace

TEST_CASE("rbf kernel") {
  const KernelParams unit{1.0, 1.0, 0.0};
  const std::vector<double> z{0.0}, two{2.0}, far{100.0};
  CHECK(rbf_kernel(z, z, unit) == 1.0);
  CHECK(rbf_kernel(z, two, unit) == doctest::Approx(std::exp(-2.0)));
  CHECK(rbf_kernel(z, two, unit) == doctest::Approx(0.13534).epsilon(1e-4));
  CHECK(rbf_kernel(z, far, unit) < 1e-300);
  CHECK(rbf_kernel(z, z, KernelParams{1.0, 1.0, 0.5}, true) == 1.5);
  CHECK(rbf_kernel(z, z, KernelParams{1.0, 1.0, 0.5}, false) == 1.0);
  const std::vector<double> d2{0.0, 0.0};
  CHECK_THROWS(rbf_kernel(z, d2, unit));
  double prev = 2.0;
  for (double d = 0.0; d < 5.0; d += 0.25) {
    const std::vector<double> b{d};
    const double k = rbf_kernel(z, b, unit);
    CHECK(k < prev);
    prev = k;
  }
}

TEST_CASE("kernel params validation") {
  CHECK_THROWS(KernelParams{0.0, 1.0, 0.0}.validate());
  CHECK_THROWS(KernelParams{1.0, 0.0, 0.0}.validate());
  CHECK_THROWS(KernelParams{1.0, 1.0, -1.0}.validate());
  CHECK_THROWS(KernelParams{1.0, NAN, 0.0}.validate());
  CHECK_NOTHROW(KernelParams{1.0, 1.0, 0.0}.validate());
}

TEST_CASE("single-point fit") {
  const auto m = fit1(0.0, 2.0, KernelParams{1.0, 1.0, 1.0});
  CHECK(m.alpha()(0) == doctest::Approx(1.0).epsilon(1e-9));
  const std::vector<double> q{0.0}, far{1e3};
  CHECK(m.posterior_mean(q) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m.posterior_variance(q) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::abs(m.posterior_mean(far)) < 1e-12);
  CHECK(m.posterior_variance(far) == doctest::Approx(1.0));
}

TEST_CASE("centered targets revert to the data mean") {
  const auto m = fit1(0.0, 2.0, KernelParams{1.0, 1.0, 1.0}, TargetMode::kCentered);
  CHECK(m.prior_mean() == 2.0);
  const std::vector<double> q{0.0}, far{1e3};
  CHECK(m.posterior_mean(q) == doctest::Approx(2.0));
  CHECK(m.posterior_mean(far) == doctest::Approx(2.0));
  CHECK(m.posterior_variance(q) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("duplicate rows with noise and all-zero targets") {
  Eigen::MatrixXd x(3, 2);
  x << 0.1, 0.2, 0.1, 0.2, -0.5, 0.3;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
  const auto m = GpModel::fit(x, y, KernelParams{1.0, 0.7, 0.1});
  CHECK(m.alpha().isZero(0.0));
  const std::vector<double> q{0.4, -0.2};
  CHECK(m.posterior_mean(q) == 0.0);
}

TEST_CASE("duplicate rows without noise are rescued by jitter") {
  Eigen::MatrixXd x(2, 1);
  x << 0.3, 0.3;
  Eigen::VectorXd y(2);
  y << 1.0, 1.0;
  const auto m = GpModel::fit(x, y, KernelParams{1.0, 1.0, 0.0});
  CHECK(m.jitter() > 0.0);
  CHECK(m.jitter() <= 1e-4);
  const std::vector<double> q{0.3};
  CHECK(m.posterior_mean(q) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("non-finite inputs are rejected") {
  Eigen::MatrixXd x(1, 1);
  x << NAN;
  Eigen::VectorXd y(1);
  y << 1.0;
  CHECK_THROWS(GpModel::fit(x, y, KernelParams{}));
}

TEST_CASE("noise-free interpolation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd x(6, 2);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    x(i, 0) = u(rng);
    x(i, 1) = u(rng);
    y(i) = u(rng);
  }
  const auto m = GpModel::fit(x, y, KernelParams{1.0, 0.3, 0.0});
  for (int i = 0; i < 6; ++i) {
    const std::vector<double> q{x(i, 0), x(i, 1)};
    CHECK(std::abs(m.posterior_mean(q) - y(i)) < 1e-6);
  }
}

TEST_CASE("factor reconstructs the kernel matrix") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd x(12, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  Eigen::VectorXd y = Eigen::VectorXd::Random(12);
  const KernelParams p{0.7, 0.9, 0.05};
  const auto m = GpModel::fit(x, y, p);
  Eigen::MatrixXd k = kernel_matrix(x, p);
  CHECK((k - k.transpose()).norm() == 0.0);
  k.diagonal().array() += p.noise_variance + m.jitter();
  const Eigen::MatrixXd l = m.factor();
  CHECK((l * l.transpose() - k).norm() / k.norm() < 1e-8);
}

TEST_CASE("posterior agrees with a dense-inverse oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0), lg(-1.0, 1.0);
  std::uniform_int_distribution<int> nd(1, 30), dd(1, 3);
  for (int problem = 0; problem < 25; ++problem) {
    const int n = nd(rng), d = dd(rng);
    const KernelParams p{std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng) - 2.0)};
    Eigen::MatrixXd x(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    for (int i = 0; i < n; ++i) y(i) = u(rng);
    const auto mode = problem % 2 ? TargetMode::kCentered : TargetMode::kZeroMean;
    const auto m = GpModel::fit(x, y, p, mode);
    const oracle::DenseGp ref(x, y, p, m.jitter(), m.prior_mean());
    Eigen::MatrixXd queries(8, d);
    for (Eigen::Index i = 0; i < queries.size(); ++i) queries.data()[i] = u(rng);
    const Eigen::VectorXd batch = m.posterior_mean_batch(queries);
    for (int q = 0; q < 8; ++q) {
      const Eigen::RowVectorXd row = queries.row(q);
      const std::vector<double> qv(row.data(), row.data() + d);
      CHECK(std::abs(m.posterior_mean(qv) - ref.mean(row)) < 1e-8);
      CHECK(std::abs(batch(q) - ref.mean(row)) < 1e-8);
      const double var = m.posterior_variance(qv);
      CHECK(std::abs(var - ref.variance(row)) < 1e-8);
      CHECK(var >= 0.0);
      CHECK(var <= p.signal_variance + 1e-12);
    }
  }
}

TEST_CASE("variance is invariant to training-row order") {
  Eigen::MatrixXd x(4, 1);
  x << -0.5, 0.1, 0.4, 0.9;
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 4;
  Eigen::MatrixXd xr = x.colwise().reverse();
  Eigen::VectorXd yr = y.reverse();
  const KernelParams p{1.0, 0.5, 0.01};
  const auto a = GpModel::fit(x, y, p), b = GpModel::fit(xr, yr, p);
  for (double q = -1.0; q <= 1.0; q += 0.1) {
    const std::vector<double> v{q};
    CHECK(a.posterior_variance(v) == doctest::Approx(b.posterior_variance(v)).epsilon(1e-12));
    CHECK(a.posterior_mean(v) == doctest::Approx(b.posterior_mean(v)).epsilon(1e-12));
  }
}

TEST_CASE("query dimension mismatch") {
  const auto m = fit1(0.0, 1.0, KernelParams{});
  const std::vector<double> q{0.0, 1.0};
  CHECK_THROWS(m.posterior_mean(q));
  CHECK_THROWS(m.posterior_mean_batch(Eigen::MatrixXd::Zero(2, 2)));
}
