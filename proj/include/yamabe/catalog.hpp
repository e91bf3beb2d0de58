#pragma once

// Fixed catalog of closed-form profiles xi -> p(xi). Each entry evaluates
// generically (double or Dual2) and also has hand-written derivatives, so a
// catalog profile can be realized on every backend.

#include <cmath>
#include <string>
#include <vector>

#include "yamabe/dual.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/fields.hpp"

namespace yamabe {

struct ClosedForm {
  enum class Kind {
    constant,              // a
    power_series,          // sum_k coeffs[k] xi^k
    exp,                   // a exp(b xi + c)
    gaussian_exp,          // a exp(b xi^2)
    reciprocal_quadratic,  // a / (b + c xi^2)
    power,                 // a (b xi + c)^p
  };

  Kind kind = Kind::constant;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double p = 1.0;
  std::vector<double> coeffs;

  static ClosedForm constant(double a) { return {Kind::constant, a, 0.0, 0.0, 1.0, {}}; }
  static ClosedForm series(std::vector<double> cs) {
    ClosedForm f;
    f.kind = Kind::power_series;
    f.coeffs = std::move(cs);
    return f;
  }
  static ClosedForm exponential(double a, double b, double c = 0.0) { return {Kind::exp, a, b, c, 1.0, {}}; }
  static ClosedForm gaussian_exp(double a, double b) { return {Kind::gaussian_exp, a, b, 0.0, 1.0, {}}; }
  static ClosedForm reciprocal_quadratic(double a, double b, double c) {
    return {Kind::reciprocal_quadratic, a, b, c, 1.0, {}};
  }
  static ClosedForm power(double a, double b, double c, double p) {
    return {Kind::power, a, b, c, p, {}};
  }

  template <class T>
  T operator()(const T& xi) const {
    using std::exp;
    using std::pow;
    switch (kind) {
      case Kind::constant: return T(a) + 0.0 * xi;
      case Kind::power_series: {
        T acc = T(0.0) + 0.0 * xi;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * xi + T(*it);
        return acc;
      }
      case Kind::exp: return T(a) * exp(T(b) * xi + T(c));
      case Kind::gaussian_exp: return T(a) * exp(T(b) * xi * xi);
      case Kind::reciprocal_quadratic: return T(a) / (T(b) + T(c) * xi * xi);
      case Kind::power: return T(a) * pow(T(b) * xi + T(c), p);
    }
    return T(0.0);
  }

  /// Hand-differentiated jet.
  Jet1 jet(double xi) const {
    switch (kind) {
      case Kind::constant: return {a, 0.0, 0.0};
      case Kind::power_series: {
        double v = 0.0, d1 = 0.0, d2 = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
          d2 = d2 * xi + 2.0 * d1;
          d1 = d1 * xi + v;
          v = v * xi + *it;
        }
        return {v, d1, d2};
      }
      case Kind::exp: {
        const double e = a * std::exp(b * xi + c);
        return {e, b * e, b * b * e};
      }
      case Kind::gaussian_exp: {
        const double e = a * std::exp(b * xi * xi);
        const double s = 2.0 * b * xi;
        return {e, s * e, (2.0 * b + s * s) * e};
      }
      case Kind::reciprocal_quadratic: {
        const double q = b + c * xi * xi;
        const double v = a / q;
        const double d1 = -2.0 * a * c * xi / (q * q);
        const double d2 = -2.0 * a * c / (q * q) + 8.0 * a * c * c * xi * xi / (q * q * q);
        return {v, d1, d2};
      }
      case Kind::power: {
        const double u = b * xi + c;
        const double up2 = std::pow(u, p - 2.0);
        return {a * up2 * u * u, a * p * b * up2 * u, a * p * (p - 1.0) * b * b * up2};
      }
    }
    return {};
  }

  /// Open interval on which the expression is smooth and finite.
  bool defined_at(double xi) const {
    switch (kind) {
      case Kind::reciprocal_quadratic: return b + c * xi * xi != 0.0;
      case Kind::power: return b * xi + c > 0.0;
      default: return std::isfinite(xi);
    }
  }
};

inline ClosedForm::Kind parse_kind(const std::string& name) {
  using K = ClosedForm::Kind;
  if (name == "constant") return K::constant;
  if (name == "polynomial" || name == "power-series") return K::power_series;
  if (name == "exp") return K::exp;
  if (name == "gaussian-exp") return K::gaussian_exp;
  if (name == "reciprocal-quadratic") return K::reciprocal_quadratic;
  if (name == "power") return K::power;
  throw ConfigError("unknown catalog entry '" + name + "'");
}

inline const char* kind_name(ClosedForm::Kind k) {
  using K = ClosedForm::Kind;
  switch (k) {
    case K::constant: return "constant";
    case K::power_series: return "power-series";
    case K::exp: return "exp";
    case K::gaussian_exp: return "gaussian-exp";
    case K::reciprocal_quadratic: return "reciprocal-quadratic";
    case K::power: return "power";
  }
  return "?";
}

inline Profile make_profile(const ClosedForm& form, Backend backend,
                            Interval domain = Interval::all()) {
  switch (backend) {
    case Backend::analytic:
      return Profile([form](double xi) { return form.jet(xi); }, domain, Backend::analytic);
    case Backend::dual:
      return dual_profile([form](const Dual2& xi) { return form(xi); }, domain);
    case Backend::finite_difference:
      return fd_profile([form](double xi) { return form(xi); }, domain);
  }
  throw ConfigError("unknown backend");
}

}  // namespace yamabe
