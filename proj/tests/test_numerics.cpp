#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "yamabe/numerics.hpp"

using namespace yamabe;
using namespace yamabe::numerics;

TEST(QuadAdaptive, Examples) {
  EXPECT_NEAR(quad_adaptive([](double x) { return x; }, 0.0, 1.0), 0.5, 1e-14);
  EXPECT_NEAR(quad_adaptive([](double x) { return std::pow(1 + x * x, 2); }, -2.0, 2.0), 412.0 / 15.0, 1e-8);
  EXPECT_EQ(quad_adaptive([](double) { return 0.0; }, -3.0, 7.0), 0.0);
}

TEST(QuadAdaptive, ReversedLimitsNegate) {
  auto g = [](double x) { return std::exp(x); };
  EXPECT_NEAR(quad_adaptive(g, 1.0, 0.0), -(std::exp(1.0) - 1.0), 1e-10);
}

TEST(QuadAdaptive, ReportsNonConvergence) {
  EXPECT_THROW(quad_adaptive([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, 1e-14, 6),
               ConvergenceError);
}

TEST(CumulativeIntegral, MatchesAntiderivative) {
  const CumulativeIntegral I([](double t) { return std::cos(t); }, {0.0, 4.0}, 64, 1e-12);
  for (double x : {0.0, 0.37, 1.0, 2.5, 4.0}) EXPECT_NEAR(I(x), std::sin(x), 1e-10);
}

TEST(RootBracketed, Examples) {
  EXPECT_NEAR(root_bracketed([](double x) { return x * x - 2.0; }, 1.0, 2.0, 1e-12), std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(root_bracketed([](double x) { return 3.0 * x - 1.5; }, 0.0, 2.0, 1e-14), 0.5);
  EXPECT_THROW(root_bracketed([](double x) { return x * x + 1.0; }, -1.0, 1.0), DomainError);
}

TEST(IntegrateIvp, Exponential) {
  const Trajectory t = integrate_ivp([](double, const State& y) { return State{y[0]}; }, {1.0}, {0.0, 1.0});
  ASSERT_EQ(t.reason, Termination::completed);
  EXPECT_EQ(t.end(), 1.0);
  EXPECT_NEAR(t.y.back()[0], std::exp(1.0), 1e-8);
  EXPECT_NEAR(t.interpolate(0.5)[0], std::exp(0.5), 1e-8);
}

TEST(IntegrateIvp, ConstantIsExact) {
  const Trajectory t = integrate_ivp([](double, const State&) { return State{0.0, 0.0}; }, {2.5, -1.0}, {0.0, 3.0});
  for (const State& y : t.y) {
    EXPECT_EQ(y[0], 2.5);
    EXPECT_EQ(y[1], -1.0);
  }
}

TEST(IntegrateIvp, SqrtLaw) {
  // phi' = 1 / (28 phi): the beta = 0 steady law with (n, m, alpha) = (3, 2, 1).
  const Trajectory t = integrate_ivp([](double, const State& y) { return State{1.0 / (28.0 * y[0])}; },
                                     {std::sqrt(1.0 / 14.0)}, {1.0, 10.0});
  ASSERT_TRUE(t.reached(10.0));
  for (std::size_t i = 0; i < t.xi.size(); ++i) EXPECT_NEAR(t.y[i][0], std::sqrt(t.xi[i] / 14.0), 1e-9);
}

TEST(IntegrateIvp, EventIsLocalized) {
  IntegratorConfig cfg;
  cfg.event = [](double, const State& y) { return y[0]; };
  const Trajectory t = integrate_ivp([](double, const State&) { return State{-1.0}; }, {1.0}, {0.0, 5.0}, cfg);
  EXPECT_EQ(t.reason, Termination::event);
  EXPECT_NEAR(t.end(), 1.0, 1e-9);
  EXPECT_LE(t.end(), 1.0);
  EXPECT_GT(t.y.back()[0], 0.0);
}

TEST(IntegrateIvp, BlowUpIsReported) {
  const Trajectory t = integrate_ivp([](double, const State& y) { return State{y[0] * y[0]}; }, {1.0}, {0.0, 2.0});
  EXPECT_NE(t.reason, Termination::completed);
  EXPECT_LT(t.end(), 1.0 + 1e-6);
}

TEST(IntegrateIvp, NonFiniteStartIsAnError) {
  EXPECT_THROW(integrate_ivp([](double, const State& y) { return State{1.0 / y[0]}; }, {0.0}, {0.0, 1.0}),
               DomainError);
}

TEST(IntegrateIvp, HalvingToleranceNeverIncreasesError) {
  auto rhs = [](double x, const State& y) { return State{y[1], -y[0] + 0.1 * std::cos(x)}; };
  const double exact = [] {
    // y'' + y = 0.1 cos x, y(0) = 1, y'(0) = 0: y = cos x + 0.05 x sin x
    return std::cos(6.0) + 0.05 * 6.0 * std::sin(6.0);
  }();
  double prev = std::numeric_limits<double>::infinity();
  for (double tol = 1e-4; tol >= 1e-11; tol /= 2.0) {
    IntegratorConfig cfg;
    cfg.rel_tol = tol;
    cfg.abs_tol = tol * 1e-2;
    const double err = std::abs(integrate_ivp(rhs, {1.0, 0.0}, {0.0, 6.0}, cfg).y.back()[0] - exact);
    EXPECT_LE(err, prev * 1.0000001 + 1e-15) << tol;
    prev = std::min(prev, err);
  }
  // Quadrature anchors: integrands whose even derivatives keep one sign, so
  // refining the partition cannot trade a cancellation for a larger error.
  struct Anchor {
    std::function<double(double)> g;
    double a, b, exact;
  };
  const std::vector<Anchor> anchors = {
      {[](double x) { return std::exp(x); }, 0.0, 2.0, std::exp(2.0) - 1.0},
      {[](double x) { return 1.0 / (1.0 + x); }, 0.0, 3.0, std::log(4.0)},
      {[](double x) { return std::pow(1 + x * x, 2); }, -2.0, 2.0, 412.0 / 15.0},
  };
  for (const Anchor& an : anchors) {
    double qprev = std::numeric_limits<double>::infinity();
    for (double tol = 1e-4; tol >= 1e-12; tol /= 2.0) {
      const double err = std::abs(quad_adaptive(an.g, an.a, an.b, tol) - an.exact);
      EXPECT_LE(err, qprev + 1e-14) << tol;
      qprev = std::min(qprev, err);
    }
  }
}

TEST(Determinism, BitIdenticalRepeats) {
  auto rhs = [](double x, const State& y) { return State{std::sin(x * y[0]) + y[1], -y[0]}; };
  const Trajectory a = integrate_ivp(rhs, {0.3, 1.0}, {0.0, 7.0});
  const Trajectory b = integrate_ivp(rhs, {0.3, 1.0}, {0.0, 7.0});
  ASSERT_EQ(a.xi.size(), b.xi.size());
  for (std::size_t i = 0; i < a.xi.size(); ++i) {
    EXPECT_EQ(a.xi[i], b.xi[i]);
    EXPECT_EQ(a.y[i], b.y[i]);
  }
  auto g = [](double x) { return std::log(1 + x * x) * std::cos(3 * x); };
  EXPECT_EQ(quad_adaptive(g, -1.0, 4.0), quad_adaptive(g, -1.0, 4.0));
}
