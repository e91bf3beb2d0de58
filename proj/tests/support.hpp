#pragma once

// Random smooth test functions and the paper's fixtures, shared by the unit
// tests and the acceptance runner.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "yamabe/yamabe.hpp"

namespace yamabe::testing {

using std::cos;
using std::exp;
using std::sin;

/// g(x) = a0 e^{a.x} + x^T B x / 2 + sin(c.x), with hand-coded jets for the
/// analytic backend.
struct SmoothFn {
  double a0 = 1.0;
  Eigen::VectorXd a, c;
  Eigen::MatrixXd B;

  template <class T>
  T operator()(std::span<const T> x) const {
    T ax = x[0] * a[0];
    T cx = x[0] * c[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
      ax = ax + x[i] * a[i];
      cx = cx + x[i] * c[i];
    }
    T q = x[0] * x[0] * (0.5 * B(0, 0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (i == 0 && j == 0) continue;
        q = q + x[i] * x[j] * (0.5 * B(i, j));
      }
    }
    return exp(ax) * a0 + q + sin(cx);
  }

  Jet2 jet(const Point& x) const {
    const int n = static_cast<int>(x.size());
    Jet2 j = Jet2::zero(n);
    j.value = (*this)(std::span<const double>(x.data(), n));
    const double e = a0 * std::exp(a.dot(x));
    const double cx = c.dot(x);
    j.grad = a * e + B * x + c * std::cos(cx);
    j.hess = a * a.transpose() * e + B - c * c.transpose() * std::sin(cx);
    return j;
  }

  ScalarField analytic() const {
    const SmoothFn self = *this;
    return ScalarField(static_cast<int>(a.size()), [self](const Point& x) { return self.jet(x); });
  }
  ScalarField dual() const { return dual_field(static_cast<int>(a.size()), *this); }
  ScalarField fd() const { return fd_field(static_cast<int>(a.size()), *this); }
};

inline SmoothFn random_smooth(std::mt19937& rng, int n, double scale = 0.5) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SmoothFn g;
  g.a0 = 1.0 + std::abs(u(rng));
  g.a = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
  g.c = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
  Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return u(rng); });
  g.B = 0.5 * (m + m.transpose());
  return g;
}

/// Strictly positive conformal factor exp(w(x)) with w smooth and bounded-ish.
struct PositiveFn {
  SmoothFn w;
  template <class T>
  T operator()(std::span<const T> x) const {
    return exp(w(x) * 0.3);
  }
};

inline Point random_point(std::mt19937& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
}

inline Signature random_signature(std::mt19937& rng, int n) {
  std::bernoulli_distribution coin(0.5);
  std::vector<int> eps(static_cast<std::size_t>(n));
  for (int& e : eps) e = coin(rng) ? 1 : -1;
  return Signature(eps);
}

/// phi = x_n on Euclidean R^n (hyperbolic half-space).
inline ConformalBase hyperbolic(int n, Backend backend) {
  auto fn = [n](auto x) { return x[n - 1]; };
  auto guard = [n](const Point& x) { return x[n - 1] > 0.0; };
  if (backend == Backend::finite_difference) {
    return {Signature::euclidean(n), fd_field(n, fn, kDefaultFdStep, guard)};
  }
  return {Signature::euclidean(n), dual_field(n, fn, guard)};
}

// ---------------------------------------------------------------------------
// Fixtures

/// Euclidean R^2, m = 3, phi = e^{3 xi^2/4}, f = e^{xi/2}, h constant.
struct GaussianFixture {
  static constexpr int n = 2;
  static constexpr int m = 3;
  static Eigen::VectorXd alpha() { return Eigen::Vector2d(0.6, 0.8); }
  static Interval domain() { return {-1.5, 1.5}; }
  static Box box() { return {Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1)}; }
  static ClosedForm phi() { return ClosedForm::gaussian_exp(1.0, 0.75); }
  static ClosedForm f() { return ClosedForm::exponential(1.0, 0.5); }
  static ClosedForm h() { return ClosedForm::constant(1.0); }

  static InvariantProfile profile(Backend b = Backend::dual, ClosedForm hh = h()) {
    return make_invariant_profile({alpha(), Signature::euclidean(2)}, make_profile(phi(), b, domain()),
                                  make_profile(f(), b, domain()), make_profile(hh, b, domain()), m);
  }
};

/// Lorentz R^3, xi = x1 + x2, phi = 1/(1+xi^2), h = alpha(xi + 2xi^3/3 + xi^5/5).
struct NullFixture {
  static constexpr int n = 3;
  static Eigen::VectorXd alpha() { return Eigen::Vector3d(1, 1, 0); }
  static Interval domain() { return {-2.5, 2.5}; }
  static Box box() { return {Eigen::Vector3d(-1, -1, -1), Eigen::Vector3d(1, 1, 1)}; }
  static ClosedForm phi() { return ClosedForm::reciprocal_quadratic(1.0, 1.0, 1.0); }
  static ClosedForm h(double a = 1.0) {
    return ClosedForm::series({0.0, a, 0.0, 2.0 * a / 3.0, 0.0, a / 5.0});
  }
  static std::vector<ClosedForm> warpings() {
    return {ClosedForm::exponential(1.0, 1.0 / 3.0), ClosedForm::series({1.0, 0.0, 1.0}),
            ClosedForm::reciprocal_quadratic(1.0, 2.0, 0.5)};
  }
  static double h_exact(double xi, double a = 1.0) {
    return a * (xi + 2.0 * xi * xi * xi / 3.0 + std::pow(xi, 5) / 5.0);
  }

  static InvariantProfile profile(const ClosedForm& f, Backend b = Backend::dual,
                                  ClosedForm hh = h(), int m = 1) {
    return make_invariant_profile({alpha(), Signature::lorentz(3)}, make_profile(phi(), b, domain()),
                                  make_profile(f, b, domain()), make_profile(hh, b, domain()), m);
  }
};

/// Profile with h replaced by h + delta * xi.
inline InvariantProfile tilt_potential(InvariantProfile p, double delta) {
  const Profile h = p.h;
  p.h = Profile([h, delta](double xi) {
                  const Jet1 j = h(xi);
                  return Jet1{j.value + delta * xi, j.d1 + delta, j.d2};
                },
                h.domain(), h.backend());
  return p;
}

/// Profile with h replaced by (1 + delta) h.
inline InvariantProfile scale_potential(InvariantProfile p, double delta) {
  const Profile h = p.h;
  const double s = 1.0 + delta;
  p.h = Profile([h, s](double xi) {
                  const Jet1 j = h(xi);
                  return Jet1{s * j.value, s * j.d1, s * j.d2};
                },
                h.domain(), h.backend());
  return p;
}

inline double closed_form_steady_phi(int n, int m, double alpha, double nu, double xi) {
  return std::sqrt(2.0 * alpha * (xi + nu) / ((n + m - 1.0) * (n + m + 2.0)));
}

inline double max_field_residual(const WarpedSolitonData& d, const Box& box, int per_axis) {
  return residual_sweep(d, lattice(box, per_axis), 0.0, 1).max_abs();
}

}  // namespace yamabe::testing
