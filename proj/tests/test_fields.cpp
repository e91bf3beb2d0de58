#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace yamabe;
using namespace yamabe::testing;

TEST(ComposeWithDirection, SquareAlongFirstAxis) {
  const Profile p = make_profile(ClosedForm::series({0.0, 0.0, 1.0}), Backend::analytic);
  const ScalarField F = compose_with_direction(p, Eigen::Vector2d(1, 0));
  const Jet2 j = F(Eigen::Vector2d(3, 5));
  EXPECT_DOUBLE_EQ(j.value, 9.0);
  EXPECT_DOUBLE_EQ(j.grad[0], 6.0);
  EXPECT_DOUBLE_EQ(j.grad[1], 0.0);
  EXPECT_DOUBLE_EQ(j.hess(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(j.hess(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(j.hess(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(j.hess(1, 1), 0.0);
}

TEST(ComposeWithDirection, ConstantProfileHasZeroDerivatives) {
  const ScalarField F = compose_with_direction(constant_profile(4.2), Eigen::Vector3d(1, -2, 0.5));
  std::mt19937 rng(11);
  for (int k = 0; k < 10; ++k) {
    const Jet2 j = F(random_point(rng, 3, -5, 5));
    EXPECT_EQ(j.value, 4.2);
    EXPECT_EQ(j.grad.norm(), 0.0);
    EXPECT_EQ(j.hess.norm(), 0.0);
  }
}

TEST(ComposeWithDirection, GaussianExpAtXiOne) {
  const Eigen::Vector2d alpha = Eigen::Vector2d(1, 1) / std::sqrt(2.0);
  const Point x = alpha;  // alpha . x = 1
  for (Backend b : {Backend::analytic, Backend::dual}) {
    const ScalarField F = compose_with_direction(make_profile(ClosedForm::gaussian_exp(1, 0.75), b), alpha);
    const Jet2 j = F(x);
    const double e = std::exp(0.75);
    EXPECT_NEAR(j.value, e, 1e-14);
    // p' = (3/2) e^{3/4}, p'' = (3/2 + 9/4) e^{3/4}
    EXPECT_NEAR(j.grad[0], 1.5 * e * alpha[0], 1e-13);
    EXPECT_NEAR(j.hess(0, 1), 3.75 * e * 0.5, 1e-13);
  }
}

TEST(ComposeWithDirection, OutsideProfileDomain) {
  const Profile p = make_profile(ClosedForm::exponential(1, 1), Backend::dual, {-1.0, 1.0});
  const ScalarField F = compose_with_direction(p, Eigen::Vector2d(1, 1));
  EXPECT_TRUE(F.defined_at(Eigen::Vector2d(0.25, 0.25)));
  EXPECT_FALSE(F.defined_at(Eigen::Vector2d(1.0, 1.0)));
  EXPECT_THROW(F(Eigen::Vector2d(1.0, 1.0)), DomainError);
}

TEST(FiniteDifferenceJet, SquareHasHessianTwo) {
  const ScalarField F = finite_difference_jet(2, [](const Point& x) { return x[0] * x[0]; }, 1e-4);
  const Jet2 j = F(Eigen::Vector2d(0.7, -0.3));
  EXPECT_NEAR(j.hess(0, 0), 2.0, 1e-6);
}

TEST(FiniteDifferenceJet, ConstantHasZeroDerivatives) {
  const ScalarField F = finite_difference_jet(3, [](const Point&) { return 3.5; });
  const Jet2 j = F(Eigen::Vector3d(1, 2, 3));
  EXPECT_NEAR(j.grad.norm(), 0.0, 1e-8);
  EXPECT_NEAR(j.hess.norm(), 0.0, 1e-8);
}

TEST(FiniteDifferenceJet, SineTimesCoordinate) {
  const ScalarField F =
      finite_difference_jet(2, [](const Point& x) { return std::sin(x[0]) * x[1]; }, 1e-4);
  const Jet2 j = F(Eigen::Vector2d(1, 2));
  EXPECT_NEAR(j.grad[0], 2.0 * std::cos(1.0), 1e-7);
  EXPECT_NEAR(j.grad[1], std::sin(1.0), 1e-7);
}

TEST(FiniteDifferenceJet, RejectsNonPositiveStep) {
  EXPECT_THROW(finite_difference_jet(1, [](const Point&) { return 0.0; }, 0.0), ConfigError);
}

TEST(Backends, AgreeAtRandomPoints) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 4;
    const SmoothFn g = random_smooth(rng, n);
    const Point x = random_point(rng, n);
    const Jet2 a = g.analytic()(x);
    const Jet2 d = g.dual()(x);
    const Jet2 f = g.fd()(x);
    EXPECT_EQ(a.value, d.value);
    EXPECT_EQ(a.value, f.value);
    EXPECT_LE((a.grad - d.grad).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((a.hess - d.hess).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((a.grad - f.grad).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((a.hess - f.hess).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Backends, HessianSymmetry) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 5;
    const SmoothFn g = random_smooth(rng, n);
    const Point x = random_point(rng, n);
    const Jet2 d = g.dual()(x);
    const Jet2 f = g.fd()(x);
    EXPECT_EQ((d.hess - d.hess.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((f.hess - f.hess.transpose()).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Profile, PositivityFlag) {
  const Profile p = make_profile(ClosedForm::series({0.0, 1.0}), Backend::analytic).positive();
  EXPECT_TRUE(p.requires_positive());
  EXPECT_NO_THROW(p(0.5));
  EXPECT_THROW(p(0.0), PositivityError);
  EXPECT_THROW(p(-1.0), PositivityError);
}

TEST(Profile, DomainIsEnforced) {
  const Profile p = constant_profile(1.0, {0.0, 1.0});
  EXPECT_THROW(p(1.5), DomainError);
  EXPECT_NO_THROW(p.with_domain({0.0, 2.0})(1.5));
}

TEST(Catalog, BackendsAgreeOnEveryKind) {
  const std::vector<ClosedForm> forms = {
      ClosedForm::constant(2.5),
      ClosedForm::series({1.0, -2.0, 0.5, 0.25}),
      ClosedForm::exponential(1.5, -0.7, 0.2),
      ClosedForm::gaussian_exp(0.8, 0.3),
      ClosedForm::reciprocal_quadratic(2.0, 1.0, 0.5),
      ClosedForm::power(1.2, 0.5, 3.0, 1.5),
  };
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& form : forms) {
    const Profile a = make_profile(form, Backend::analytic);
    const Profile d = make_profile(form, Backend::dual);
    const Profile f = make_profile(form, Backend::finite_difference);
    for (int k = 0; k < 20; ++k) {
      const double xi = u(rng);
      const Jet1 ja = a(xi), jd = d(xi), jf = f(xi);
      EXPECT_NEAR(ja.value, jd.value, 1e-13 * (1 + std::abs(ja.value))) << kind_name(form.kind);
      EXPECT_NEAR(ja.d1, jd.d1, 1e-12 * (1 + std::abs(ja.d1))) << kind_name(form.kind);
      EXPECT_NEAR(ja.d2, jd.d2, 1e-12 * (1 + std::abs(ja.d2))) << kind_name(form.kind);
      EXPECT_NEAR(ja.d1, jf.d1, 1e-6 * (1 + std::abs(ja.d1))) << kind_name(form.kind);
      EXPECT_NEAR(ja.d2, jf.d2, 1e-5 * (1 + std::abs(ja.d2))) << kind_name(form.kind);
    }
  }
}

TEST(Catalog, KindNames) {
  EXPECT_EQ(parse_kind("polynomial"), ClosedForm::Kind::power_series);
  EXPECT_EQ(parse_kind("power-series"), ClosedForm::Kind::power_series);
  EXPECT_EQ(parse_kind("exp"), ClosedForm::Kind::exp);
  EXPECT_EQ(parse_kind("gaussian-exp"), ClosedForm::Kind::gaussian_exp);
  EXPECT_EQ(parse_kind("reciprocal-quadratic"), ClosedForm::Kind::reciprocal_quadratic);
  EXPECT_EQ(parse_kind("constant"), ClosedForm::Kind::constant);
  EXPECT_THROW(parse_kind("bessel"), ConfigError);
}

TEST(Dual2, QuotientDerivatives) {
  // q = x y / (x + y) at (1, 2)
  const Dual2 x = Dual2::variable(1.0, 0, 2);
  const Dual2 y = Dual2::variable(2.0, 1, 2);
  const Dual2 q = x * y / (x + y);
  EXPECT_NEAR(q.value(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(q.grad(0), 4.0 / 9.0, 1e-15);   // y^2/(x+y)^2
  EXPECT_NEAR(q.grad(1), 1.0 / 9.0, 1e-15);   // x^2/(x+y)^2
  EXPECT_NEAR(q.hess(0, 0), -8.0 / 27.0, 1e-15);  // -2y^2/(x+y)^3
  EXPECT_NEAR(q.hess(0, 1), 4.0 / 27.0, 1e-15);   // 2xy/(x+y)^3
  EXPECT_NEAR(q.hess(1, 1), -2.0 / 27.0, 1e-15);
}
