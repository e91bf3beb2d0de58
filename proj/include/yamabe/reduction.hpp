#pragma once

// Translation-invariant ansatz: every unknown depends on xi = alpha . x only.
// The soliton system then collapses to three ODE residuals in xi whose form
// depends on the causal character of alpha.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/fields.hpp"
#include "yamabe/geometry.hpp"
#include "yamabe/warped.hpp"

namespace yamabe {

inline constexpr double kCausalTol = 1e-12;

enum class CausalClass { spacelike, timelike, lightlike, non_normalized };

inline const char* to_string(CausalClass c) {
  switch (c) {
    case CausalClass::spacelike: return "spacelike";
    case CausalClass::timelike: return "timelike";
    case CausalClass::lightlike: return "lightlike";
    case CausalClass::non_normalized: return "non-normalized";
  }
  return "?";
}

struct CausalType {
  CausalClass cls = CausalClass::lightlike;
  double s = 0.0;  // sum_k eps_k alpha_k^2

  /// +1, -1 or 0 by the sign of s.
  int sign() const { return s > kCausalTol ? 1 : (s < -kCausalTol ? -1 : 0); }
};

inline CausalType causal_type(const Eigen::VectorXd& alpha, const Signature& sig) {
  if (alpha.size() != sig.dim()) throw ConfigError("direction length must equal n");
  const double s = sig.dot(alpha, alpha);
  if (std::abs(s) <= kCausalTol) return {CausalClass::lightlike, s};
  if (std::abs(s - 1.0) <= kCausalTol) return {CausalClass::spacelike, s};
  if (std::abs(s + 1.0) <= kCausalTol) return {CausalClass::timelike, s};
  return {CausalClass::non_normalized, s};
}

struct Direction {
  Eigen::VectorXd alpha;
  Signature sig;

  int dim() const { return sig.dim(); }

  /// Unit diagonal direction in Euclidean signature.
  static Direction diagonal(int n) {
    return {Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n))),
            Signature::euclidean(n)};
  }
  /// xi = x_1 + x_2 in Lorentz signature (-, +, ..., +).
  static Direction null_lorentz(int n) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a[0] = 1.0;
    a[1] = 1.0;
    return {a, Signature::lorentz(n)};
  }
};

/// Profiles phi(xi), f(xi), h(xi) along a fixed direction, plus the fiber
/// data. Build with make_invariant_profile so eps_k0 is consistent.
struct InvariantProfile {
  Eigen::VectorXd alpha;
  Signature sig;
  int eps_k0 = 1;
  Profile phi, f, h;
  int m = 1;
  double lambda_F = 0.0;
  double rho = 0.0;
  /// alpha was divided by this to normalize sum eps_k alpha_k^2 (1: untouched).
  double rescale = 1.0;

  int n() const { return sig.dim(); }
  bool null_direction() const { return eps_k0 == 0; }

  Interval domain() const {
    return {std::max({phi.domain().lo, f.domain().lo, h.domain().lo}),
            std::min({phi.domain().hi, f.domain().hi, h.domain().hi})};
  }

  void validate() const {
    if (m < 1) throw ConfigError("fiber dimension m must be >= 1");
    if (alpha.size() != sig.dim()) throw ConfigError("direction length must equal n");
    if (eps_k0 < -1 || eps_k0 > 1) throw ConfigError("eps_k0 must be -1, 0 or +1");
    if (std::abs(sig.dot(alpha, alpha) - eps_k0) > kCausalTol) {
      throw ConfigError("eps_k0 inconsistent with direction and signature");
    }
  }
};

namespace detail {

// p(r * eta), so that p~(alpha/r . x) = p(alpha . x).
inline Profile reparametrize(const Profile& p, double r) {
  const Interval d = p.domain();
  Profile q([p, r](double eta) {
              const Jet1 j = p(r * eta);
              return Jet1{j.value, r * j.d1, r * r * j.d2};
            },
            {d.lo / r, d.hi / r}, p.backend());
  return p.requires_positive() ? q.positive() : q;
}

}  // namespace detail

/// Validates the direction and, for a non-normalized one, rescales alpha by
/// 1/sqrt|s| and reparametrizes the profiles so the lifted fields are
/// unchanged. The factor is kept in `rescale`.
inline InvariantProfile make_invariant_profile(const Direction& dir, Profile phi, Profile f,
                                               Profile h, int m, double lambda_F = 0.0,
                                               double rho = 0.0) {
  if (dir.alpha.size() != dir.sig.dim()) throw ConfigError("direction length must equal n");
  if (dir.alpha.cwiseAbs().maxCoeff() == 0.0) throw ConfigError("direction must be nonzero");
  InvariantProfile p;
  p.sig = dir.sig;
  p.alpha = dir.alpha;
  p.m = m;
  p.lambda_F = lambda_F;
  p.rho = rho;
  p.phi = phi.positive();
  p.f = f.positive();
  p.h = std::move(h);
  const CausalType ct = causal_type(dir.alpha, dir.sig);
  if (ct.cls == CausalClass::non_normalized) {
    const double r = std::sqrt(std::abs(ct.s));
    p.alpha = dir.alpha / r;
    p.phi = detail::reparametrize(p.phi, r);
    p.f = detail::reparametrize(p.f, r);
    p.h = detail::reparametrize(p.h, r);
    p.rescale = r;
  }
  p.eps_k0 = ct.sign();
  if (ct.cls == CausalClass::lightlike) p.eps_k0 = 0;
  p.validate();
  return p;
}

struct OdeResiduals {
  double r_h = 0.0;
  double r_diag = 0.0;
  double r_fiber = 0.0;

  double max_abs() const { return std::max({std::abs(r_h), std::abs(r_diag), std::abs(r_fiber)}); }
};

/// ODE residuals from pre-evaluated profile jets.
inline OdeResiduals ode_residuals(const InvariantProfile& p, const Jet1& phi, const Jet1& f,
                                  const Jet1& h) {
  require_positive(phi.value, "phi");
  require_positive(f.value, "f");
  OdeResiduals r;
  r.r_h = h.d2 + 2.0 * phi.d1 * h.d1 / phi.value;
  const double constant_part = p.rho - p.lambda_F / (f.value * f.value);
  if (p.null_direction()) {
    r.r_diag = constant_part;
    r.r_fiber = constant_part;
    return r;
  }
  const double n = p.n();
  const double m = p.m;
  const double ph = phi.value;
  const double fv = f.value;
  const double bracket = (n - 1.0) * (2.0 * ph * phi.d2 - n * phi.d1 * phi.d1) -
                         (2.0 * m / fv) * (ph * ph * f.d2 - (n - 2.0) * ph * phi.d1 * f.d1) -
                         m * (m - 1.0) * ph * ph * f.d1 * f.d1 / (fv * fv);
  r.r_diag = p.eps_k0 * (bracket + ph * phi.d1 * h.d1) - constant_part;
  r.r_fiber = p.eps_k0 * (bracket - ph * ph * f.d1 * h.d1 / fv) - constant_part;
  return r;
}

inline OdeResiduals ode_residuals(const InvariantProfile& p, double xi) {
  return ode_residuals(p, p.phi(xi), p.f(xi), p.h(xi));
}

/// h'(xi) = alpha / phi(xi)^2, the first integral of r_h = 0.
inline double potential_slope(const Profile& phi, double alpha_const, double xi) {
  const double v = phi(xi).value;
  require_positive(v, "phi");
  return alpha_const / (v * v);
}

struct SignAdmissibility {
  bool admissible = false;
  /// Forced warping value sqrt(lambda_F / rho); empty when f is free or the
  /// pair is inadmissible.
  std::optional<double> f;
};

/// Lightlike constraint rho = lambda_F / f^2 with f > 0.
inline SignAdmissibility sign_obstruction(double lambda_F, double rho) {
  if (lambda_F == 0.0 && rho == 0.0) return {true, std::nullopt};
  if ((lambda_F > 0.0 && rho > 0.0) || (lambda_F < 0.0 && rho < 0.0)) {
    return {true, std::sqrt(lambda_F / rho)};
  }
  return {false, std::nullopt};
}

/// Range of alpha . x over a box.
inline Interval xi_range(const Eigen::VectorXd& alpha, const Box& box) {
  Interval r{0.0, 0.0};
  for (int k = 0; k < alpha.size(); ++k) {
    const double a = alpha[k] * box.lo[k];
    const double b = alpha[k] * box.hi[k];
    r.lo += std::min(a, b);
    r.hi += std::max(a, b);
  }
  return r;
}

/// Fields phi(alpha . x), f(alpha . x), h(alpha . x) on R^n. Jets follow
/// from the chain rule, or from central differences of the composed values
/// when `backend` is finite_difference.
inline WarpedSolitonData lift_to_field(const InvariantProfile& p, const Box& box,
                                       Backend backend = Backend::dual) {
  p.validate();
  if (box.dim() != p.n()) throw ConfigError("box dimension must equal n");
  const Interval img = xi_range(p.alpha, box);
  const Interval dom = p.domain();
  if (img.lo < dom.lo || img.hi > dom.hi) {
    throw DomainError("box maps to xi in [" + std::to_string(img.lo) + ", " +
                      std::to_string(img.hi) + "], outside the profile domain [" +
                      std::to_string(dom.lo) + ", " + std::to_string(dom.hi) + "]");
  }
  auto lift = [&](const Profile& q) {
    if (backend != Backend::finite_difference) return compose_with_direction(q, p.alpha);
    const Eigen::VectorXd alpha = p.alpha;
    auto guard = [q, alpha](const Point& x) { return q.domain().contains(alpha.dot(x)); };
    return finite_difference_jet(p.n(), [q, alpha](const Point& x) { return q(alpha.dot(x)).value; },
                                 kDefaultFdStep, guard);
  };
  WarpedSolitonData d{{p.sig, lift(p.phi)}, lift(p.f), lift(p.h), p.m, p.lambda_F, p.rho};
  d.validate();
  return d;
}

inline WarpedSolitonData lift_to_field(const InvariantProfile& p) {
  // Unit box around the origin, as large as the profile domain allows.
  const Interval dom = p.domain();
  const double l1 = p.alpha.cwiseAbs().sum();
  double half = 1.0;
  if (std::isfinite(dom.lo)) half = std::min(half, -dom.lo / l1);
  if (std::isfinite(dom.hi)) half = std::min(half, dom.hi / l1);
  if (!(half > 0.0)) throw DomainError("profile domain does not contain xi = 0");
  const int n = p.n();
  return lift_to_field(p, Box{Eigen::VectorXd::Constant(n, -half), Eigen::VectorXd::Constant(n, half)});
}

/// One row of a profile sweep.
struct ProfileSample {
  double xi = 0.0;
  double phi = 0.0, f = 0.0, h = 0.0;
  OdeResiduals r;
};

inline std::vector<ProfileSample> profile_sweep(const InvariantProfile& p, Interval span,
                                                int samples) {
  if (samples < 2) throw ConfigError("profile sweep needs at least two samples");
  std::vector<ProfileSample> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double xi = (k + 1 == samples) ? span.hi : span.lo + span.width() * k / (samples - 1);
    const Jet1 phi = p.phi(xi), f = p.f(xi), h = p.h(xi);
    out.push_back({xi, phi.value, f.value, h.value, ode_residuals(p, phi, f, h)});
  }
  return out;
}

inline OdeResiduals max_residuals(const std::vector<ProfileSample>& rows) {
  OdeResiduals m;
  for (const auto& s : rows) {
    m.r_h = std::max(m.r_h, std::abs(s.r.r_h));
    m.r_diag = std::max(m.r_diag, std::abs(s.r.r_diag));
    m.r_fiber = std::max(m.r_fiber, std::abs(s.r.r_fiber));
  }
  return m;
}

}  // namespace yamabe
