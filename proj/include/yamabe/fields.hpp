#pragma once

// Twice-differentiable scalar functions on R^n (ScalarField) and on R
// (Profile), each evaluated to a second-order jet.
//
// Three interchangeable backends produce the jets: hand-written analytic
// derivatives, forward-mode second-order duals (exact Hessians), and central
// finite differences.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>

#include "yamabe/dual.hpp"
#include "yamabe/errors.hpp"

namespace yamabe {

using Point = Eigen::VectorXd;

enum class Backend { analytic, dual, finite_difference };

inline const char* to_string(Backend b) {
  switch (b) {
    case Backend::analytic: return "analytic";
    case Backend::dual: return "dual";
    case Backend::finite_difference: return "fd";
  }
  return "?";
}

/// Value, gradient and Hessian of a field at a point.
struct Jet2 {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;

  static Jet2 zero(int n) {
    return {0.0, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  }
};

/// Value, first and second derivative of a profile at xi.
struct Jet1 {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x >= lo && x <= hi; }
  double width() const { return hi - lo; }
  static Interval all() { return {}; }
};

class ScalarField {
 public:
  using Eval = std::function<Jet2(const Point&)>;
  using Guard = std::function<bool(const Point&)>;

  ScalarField() = default;
  ScalarField(int dim, Eval eval, Guard guard = {}, Backend backend = Backend::analytic)
      : dim_(dim), eval_(std::move(eval)), guard_(std::move(guard)), backend_(backend) {}

  int dim() const { return dim_; }
  Backend backend() const { return backend_; }

  /// False outside the field's domain; never throws.
  bool defined_at(const Point& x) const {
    if (x.size() != dim_) return false;
    return !guard_ || guard_(x);
  }

  Jet2 operator()(const Point& x) const {
    if (x.size() != dim_) {
      throw DomainError("point dimension " + std::to_string(x.size()) +
                        " does not match field dimension " + std::to_string(dim_));
    }
    if (guard_ && !guard_(x)) throw DomainError("point outside field domain");
    return eval_(x);
  }

  double value(const Point& x) const { return (*this)(x).value; }

 private:
  int dim_ = 0;
  Eval eval_;
  Guard guard_;
  Backend backend_ = Backend::analytic;
};

class Profile {
 public:
  using Eval = std::function<Jet1(double)>;

  Profile() = default;
  Profile(Eval eval, Interval domain = Interval::all(), Backend backend = Backend::analytic)
      : eval_(std::move(eval)), domain_(domain), backend_(backend) {}

  const Interval& domain() const { return domain_; }
  Backend backend() const { return backend_; }
  bool requires_positive() const { return positive_; }

  /// Copy whose evaluation rejects non-positive values.
  Profile positive() const {
    Profile p = *this;
    p.positive_ = true;
    return p;
  }

  Profile with_domain(Interval d) const {
    Profile p = *this;
    p.domain_ = d;
    return p;
  }

  Jet1 operator()(double xi) const {
    if (!domain_.contains(xi)) {
      std::ostringstream os;
      os << "xi = " << xi << " outside profile domain [" << domain_.lo << ", " << domain_.hi << "]";
      throw DomainError(os.str());
    }
    Jet1 j = eval_(xi);
    if (positive_ && !(j.value > 0.0)) {
      std::ostringstream os;
      os << "profile value " << j.value << " at xi = " << xi << " is not positive";
      throw PositivityError(os.str());
    }
    return j;
  }

  double value(double xi) const { return (*this)(xi).value; }

 private:
  Eval eval_;
  Interval domain_;
  Backend backend_ = Backend::analytic;
  bool positive_ = false;
};

// ---------------------------------------------------------------------------
// Backends

/// Field whose jets come from evaluating a generic callable on Dual2 seeds.
/// `fn` must accept std::span<const T> for T in {double, Dual2}.
template <class Fn>
ScalarField dual_field(int dim, Fn fn, ScalarField::Guard guard = {}) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("dual field dimension out of range");
  auto eval = [dim, fn](const Point& x) {
    std::array<Dual2, kMaxDim> seeds;
    for (int i = 0; i < dim; ++i) seeds[i] = Dual2::variable(x[i], i, dim);
    const Dual2 r = fn(std::span<const Dual2>(seeds.data(), dim));
    Jet2 j = Jet2::zero(dim);
    j.value = r.value();
    for (int i = 0; i < dim; ++i) {
      j.grad[i] = r.grad(i);
      for (int k = 0; k < dim; ++k) j.hess(i, k) = r.hess(i, k);
    }
    return j;
  };
  return ScalarField(dim, std::move(eval), std::move(guard), Backend::dual);
}

/// Default finite-difference step; scaled by |x_i| + 1 per coordinate.
inline constexpr double kDefaultFdStep = 1e-4;

/// Central-difference jet of a value-only function. Step per coordinate is
/// step * (|x_i| + 1); the Hessian is assembled symmetric.
inline ScalarField finite_difference_jet(int dim, std::function<double(const Point&)> fn,
                                         double step = kDefaultFdStep,
                                         ScalarField::Guard guard = {}) {
  if (!(step > 0.0)) throw ConfigError("finite-difference step must be positive");
  auto eval = [dim, fn = std::move(fn), step](const Point& x) {
    Jet2 j = Jet2::zero(dim);
    const double f0 = fn(x);
    j.value = f0;
    Eigen::VectorXd h(dim);
    for (int i = 0; i < dim; ++i) h[i] = step * (std::abs(x[i]) + 1.0);
    Point y = x;
    for (int i = 0; i < dim; ++i) {
      y[i] = x[i] + h[i];
      const double fp = fn(y);
      y[i] = x[i] - h[i];
      const double fm = fn(y);
      y[i] = x[i];
      j.grad[i] = (fp - fm) / (2.0 * h[i]);
      j.hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    }
    for (int i = 0; i < dim; ++i) {
      for (int k = i + 1; k < dim; ++k) {
        y[i] = x[i] + h[i]; y[k] = x[k] + h[k];
        const double fpp = fn(y);
        y[k] = x[k] - h[k];
        const double fpm = fn(y);
        y[i] = x[i] - h[i];
        const double fmm = fn(y);
        y[k] = x[k] + h[k];
        const double fmp = fn(y);
        y[i] = x[i]; y[k] = x[k];
        const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[k]);
        j.hess(i, k) = v;
        j.hess(k, i) = v;
      }
    }
    return j;
  };
  return ScalarField(dim, std::move(eval), std::move(guard), Backend::finite_difference);
}

/// Same generic callable as dual_field, differentiated by central differences.
template <class Fn>
ScalarField fd_field(int dim, Fn fn, double step = kDefaultFdStep,
                     ScalarField::Guard guard = {}) {
  auto value = [dim, fn](const Point& x) {
    return fn(std::span<const double>(x.data(), dim));
  };
  return finite_difference_jet(dim, value, step, std::move(guard));
}

/// Profile from a generic callable of one variable (T in {double, Dual2}).
template <class Fn>
Profile dual_profile(Fn fn, Interval domain = Interval::all()) {
  auto eval = [fn](double xi) {
    const Dual2 r = fn(Dual2::variable(xi, 0, 1));
    return Jet1{r.value(), r.grad(0), r.hess(0, 0)};
  };
  return Profile(std::move(eval), domain, Backend::dual);
}

template <class Fn>
Profile fd_profile(Fn fn, Interval domain = Interval::all(), double step = kDefaultFdStep) {
  auto eval = [fn, step](double xi) {
    const double h = step * (std::abs(xi) + 1.0);
    const double f0 = fn(xi);
    const double fp = fn(xi + h);
    const double fm = fn(xi - h);
    return Jet1{f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)};
  };
  return Profile(std::move(eval), domain, Backend::finite_difference);
}

inline Profile constant_profile(double c, Interval domain = Interval::all()) {
  return Profile([c](double) { return Jet1{c, 0.0, 0.0}; }, domain);
}

/// The field x -> p(alpha . x). Points whose xi leaves the profile domain are
/// outside the field's domain.
inline ScalarField compose_with_direction(const Profile& p, const Eigen::VectorXd& alpha) {
  const int n = static_cast<int>(alpha.size());
  auto guard = [p, alpha](const Point& x) { return p.domain().contains(alpha.dot(x)); };
  auto eval = [p, alpha](const Point& x) {
    const Jet1 q = p(alpha.dot(x));
    Jet2 j;
    j.value = q.value;
    j.grad = q.d1 * alpha;
    j.hess = q.d2 * alpha * alpha.transpose();
    return j;
  };
  return ScalarField(n, std::move(eval), std::move(guard), p.backend());
}

}  // namespace yamabe
