#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "askopt/baselines.hpp"

using askopt::BaselineConfig;
using askopt::BaselineState;

namespace {

askopt::DynamicsField scaled_neg(double lambda, int d = 1) {
  return {d, [lambda](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -lambda * x; }};
}

askopt::DynamicsField zero_field(int d) {
  return {d, [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(x.size()); }};
}

BaselineConfig cfg_with(double alpha, double beta = 0.9) {
  BaselineConfig c;
  c.alpha = alpha;
  c.beta = beta;
  return c;
}

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TEST(GdStep, ScalarQuadratic) {
  auto s = BaselineState::start(scalar(1.0));
  askopt::gd_step(s, scaled_neg(1.0), cfg_with(0.1));
  EXPECT_NEAR(s.x(0), 0.9, 1e-15);
}

TEST(GdStep, VectorQuadratic) {
  auto s = BaselineState::start(Eigen::Vector2d(2, -2));
  askopt::gd_step(s, scaled_neg(1.0, 2), cfg_with(0.5));
  EXPECT_EQ(s.x, Eigen::Vector2d(1, -1));
}

TEST(HbStep, TwoStepRecursion) {
  auto s = BaselineState::start(scalar(1.0));
  const auto c = cfg_with(0.1, 0.5);
  askopt::hb_step(s, scaled_neg(1.0), c);
  EXPECT_NEAR(s.x(0), 0.9, 1e-15);
  EXPECT_NEAR(s.p(0), -1.0, 1e-15);
  askopt::hb_step(s, scaled_neg(1.0), c);
  EXPECT_NEAR(s.p(0), -1.4, 1e-15);
  EXPECT_NEAR(s.x(0), 0.76, 1e-15);
}

TEST(HbStep, ZeroMomentumEqualsGd) {
  const auto u = scaled_neg(2.5, 3);
  auto hb = BaselineState::start(Eigen::Vector3d(1, -2, 3));
  auto gd = hb;
  const auto c = cfg_with(0.05, 0.0);
  for (int k = 0; k < 100; ++k) {
    askopt::hb_step(hb, u, c);
    askopt::gd_step(gd, u, c);
    ASSERT_EQ(hb.x, gd.x) << k;
  }
}

TEST(NagStep, FirstMomentumParameter) {
  auto s = BaselineState::start(scalar(1.0));
  askopt::nag_step(s, scaled_neg(1.0), cfg_with(0.1));
  EXPECT_NEAR(s.t, (1 + std::sqrt(5.0)) / 2, 1e-15);
  EXPECT_NEAR(s.t, 1.618034, 1e-6);
}

TEST(NagStep, FirstStepHasNoMomentum) {
  auto s = BaselineState::start(scalar(1.0));
  askopt::nag_step(s, scaled_neg(1.0), cfg_with(0.1));
  EXPECT_NEAR(s.x(0), 0.9, 1e-15);
  EXPECT_EQ(s.x, s.y_prev);
}

TEST(NagStep, SecondStepRecursion) {
  auto s = BaselineState::start(scalar(1.0));
  const auto c = cfg_with(0.1);
  askopt::nag_step(s, scaled_neg(1.0), c);
  askopt::nag_step(s, scaled_neg(1.0), c);
  // Independent evaluation of the recursion with t0 = 1.
  const double t1 = (1 + std::sqrt(5.0)) / 2;
  const double t2 = (1 + std::sqrt(4 * t1 * t1 + 1)) / 2;
  EXPECT_NEAR(t2, 2.193527, 1e-6);
  EXPECT_NEAR(s.t, t2, 1e-15);
  EXPECT_NEAR(s.y_prev(0), 0.81, 1e-15);
  EXPECT_NEAR(s.x(0), 0.81 + ((t1 - 1) / t2) * (0.81 - 0.9), 1e-15);
  EXPECT_NEAR(s.x(0), 0.784642, 1e-6);
}

TEST(NagStep, MomentumSequenceIncreasing) {
  auto s = BaselineState::start(scalar(1.0));
  double prev = s.t;
  for (int k = 0; k < 50; ++k) {
    askopt::nag_step(s, scaled_neg(1.0), cfg_with(0.1));
    EXPECT_GT(s.t, prev);
    EXPECT_GE(s.t, 1.0);
    prev = s.t;
  }
}

TEST(NagStep, InnerUpdateIsGdStep) {
  const auto u = scaled_neg(1.3, 2);
  const auto c = cfg_with(0.07);
  auto s = BaselineState::start(Eigen::Vector2d(0.4, -1.1));
  for (int k = 0; k < 100; ++k) {
    auto gd = BaselineState::start(s.x);
    askopt::gd_step(gd, u, c);
    askopt::nag_step(s, u, c);
    ASSERT_EQ(s.y_prev, gd.x) << k;
  }
}

TEST(Steppers, ZeroFieldIsIdentity) {
  const auto u = zero_field(3);
  const Eigen::Vector3d x0(0.1, 0.2, -0.3);
  const auto c = cfg_with(0.3);
  auto a = BaselineState::start(x0), b = a, n = a, o = a;
  for (int k = 0; k < 10; ++k) {
    askopt::gd_step(a, u, c);
    askopt::hb_step(b, u, c);
    askopt::nag_step(n, u, c);
    askopt::ogda_step(o, u, c);
  }
  EXPECT_EQ(a.x, x0);
  EXPECT_EQ(b.x, x0);
  EXPECT_EQ(n.x, x0);
  EXPECT_EQ(o.x, x0);
}

TEST(Gd, LinearRateOnScalarQuadratic) {
  for (const auto& [alpha, lambda] : std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.5, 3.0}, {0.01, 150.0}}) {
    auto s = BaselineState::start(scalar(1.0));
    const double factor = std::abs(1 - alpha * lambda);
    for (int k = 1; k <= 50; ++k) {
      askopt::gd_step(s, scaled_neg(lambda), cfg_with(alpha));
      EXPECT_NEAR(std::abs(s.x(0)), std::pow(factor, k), 1e-10);
    }
  }
}

TEST(GdaStep, Bilinear) {
  const auto p = askopt::minmax_bilinear();
  auto s = BaselineState::start(Eigen::Vector2d(1, 1));
  askopt::gda_step(s, p, cfg_with(0.1));
  EXPECT_NEAR(s.x(0), 0.9, 1e-15);
  EXPECT_NEAR(s.x(1), 1.1, 1e-15);
}

TEST(GdaStep, StationaryPointFixed) {
  auto s = BaselineState::start(Eigen::Vector2d(0, 0));
  askopt::gda_step(s, askopt::minmax_bilinear(), cfg_with(0.1));
  EXPECT_EQ(s.x, Eigen::Vector2d(0, 0));
}

TEST(GdaStep, RadiusGrowthOnBilinear) {
  const auto p = askopt::minmax_bilinear();
  for (double alpha : {0.01, 0.1, 0.5}) {
    auto s = BaselineState::start(Eigen::Vector2d(0.3, -0.8));
    for (int k = 0; k < 200; ++k) {
      const double r0 = s.x.norm();
      askopt::gda_step(s, p, cfg_with(alpha));
      EXPECT_NEAR(s.x.norm() / r0, std::sqrt(1 + alpha * alpha), 1e-12);
    }
  }
}

TEST(GdaStep, RejectsMinimization) {
  auto s = BaselineState::start(Eigen::Vector2d(1, 1));
  EXPECT_THROW(askopt::gda_step(s, askopt::camel3(), cfg_with(0.1)), std::invalid_argument);
  EXPECT_THROW(askopt::ogda_step(s, askopt::camel3(), cfg_with(0.1)), std::invalid_argument);
}

TEST(OgdaStep, TwoStepRecursion) {
  const auto p = askopt::minmax_bilinear();
  auto s = BaselineState::start(Eigen::Vector2d(1, 1));
  askopt::ogda_step(s, p, cfg_with(0.1));
  EXPECT_NEAR(s.x(0), 0.9, 1e-15);
  EXPECT_NEAR(s.x(1), 1.1, 1e-15);
  askopt::ogda_step(s, p, cfg_with(0.1));
  EXPECT_NEAR(s.x(0), 0.78, 1e-15);
  EXPECT_NEAR(s.x(1), 1.18, 1e-15);
}

TEST(OgdaStep, FirstStepEqualsGda) {
  const auto p = askopt::camel3_minmax();
  auto a = BaselineState::start(Eigen::Vector2d(0.7, -1.2));
  auto b = a;
  askopt::ogda_step(a, p, cfg_with(0.05));
  askopt::gda_step(b, p, cfg_with(0.05));
  EXPECT_EQ(a.x, b.x);
}

TEST(OgdaStep, StationaryWithMatchingHistory) {
  auto s = BaselineState::start(Eigen::Vector2d(0, 0));
  s.u_prev = Eigen::Vector2d(0, 0);
  s.has_prev = true;
  askopt::ogda_step(s, askopt::minmax_bilinear(), cfg_with(0.2));
  EXPECT_EQ(s.x, Eigen::Vector2d(0, 0));
}

TEST(OgdaStep, ConvergesOnBilinear) {
  BaselineConfig c = cfg_with(0.1);
  c.method = askopt::BaselineMethod::OGDA;
  const auto r = askopt::run_baseline(askopt::minmax_bilinear(), Eigen::Vector2d(0.5, 0.5), c);
  EXPECT_EQ(r.status, askopt::BaselineStatus::Converged);
}

TEST(RunBaseline, GdConvergesOnCamel3) {
  BaselineConfig c;
  c.method = askopt::BaselineMethod::GD;
  const auto r = askopt::run_baseline(askopt::camel3(), Eigen::Vector2d(0.3, 0.2), c);
  EXPECT_EQ(r.status, askopt::BaselineStatus::Converged);
  EXPECT_LE(r.grad_norm, c.tol);
}

TEST(RunBaseline, GdaDivergesOnBilinear) {
  BaselineConfig c = cfg_with(1.0);
  c.method = askopt::BaselineMethod::GDA;
  const auto r = askopt::run_baseline(askopt::minmax_bilinear(), Eigen::Vector2d(0.5, 0.5), c);
  EXPECT_EQ(r.status, askopt::BaselineStatus::Diverged);
}

TEST(RunBaseline, GdaRejectsMinimization) {
  BaselineConfig c;
  c.method = askopt::BaselineMethod::GDA;
  EXPECT_THROW(askopt::run_baseline(askopt::camel3(), Eigen::Vector2d(1, 1), c), std::invalid_argument);
}

TEST(BaselineConfig, Validation) {
  BaselineConfig c;
  EXPECT_EQ(c.alpha, 1e-2);
  EXPECT_EQ(c.beta, 0.9);
  EXPECT_EQ(c.max_iters, 50000);
  EXPECT_NO_THROW(c.validate());
  c.beta = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = BaselineConfig{};
  c.alpha = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
