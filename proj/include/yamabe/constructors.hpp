#pragma once

// Explicit solution families of the reduced (translation-invariant) system:
//   - steady family with h' != 0 (phi from a first-order ODE, f = e^c / phi),
//   - Riccati family with h constant,
//   - lightlike family (phi, f free, h = alpha \int phi^-2),
// plus the almost-soliton function rho(xi) = lambda_F / f^2.
//
// Every construction carries its own ODE-residual sweep.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/fields.hpp"
#include "yamabe/numerics.hpp"
#include "yamabe/reduction.hpp"

namespace yamabe {

inline constexpr int kDefaultSampleCount = 512;
inline constexpr double kQuadratureTol = 1e-10;

struct Construction {
  std::string family;
  std::vector<std::pair<std::string, double>> params;
  InvariantProfile profile;
  Interval requested;
  Interval domain;  // covered part of `requested`
  bool truncated = false;
  std::string termination = "completed";
  OdeResiduals self_check;  // max |residual| over the self-check samples

  double self_check_max() const { return self_check.max_abs(); }
};

namespace detail {

inline void self_validate(Construction& c, int samples = 257) {
  c.self_check = max_residuals(profile_sweep(c.profile, c.domain, samples));
}

/// Quintic Hermite interpolation through nodes carrying (y, y', y'').
class QuinticHermite {
 public:
  QuinticHermite(std::vector<double> x, std::vector<double> y, std::vector<double> d1,
                 std::vector<double> d2)
      : x_(std::move(x)), y_(std::move(y)), d1_(std::move(d1)), d2_(std::move(d2)) {}

  double operator()(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[k + 1] - x_[k];
    const double s = (t - x_[k]) / h;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    const double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    const double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    const double h2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    const double h3 = 10 * s3 - 15 * s4 + 6 * s5;
    const double h4 = -4 * s3 + 7 * s4 - 3 * s5;
    const double h5 = 0.5 * (s3 - 2 * s4 + s5);
    return h0 * y_[k] + h1 * h * d1_[k] + h2 * h * h * d2_[k] + h3 * y_[k + 1] +
           h4 * h * d1_[k + 1] + h5 * h * h * d2_[k + 1];
  }

 private:
  std::vector<double> x_, y_, d1_, d2_;
};

/// h(xi) = alpha \int_{lo}^{xi} phi^-2, h' = alpha / phi^2, h'' = -2 alpha phi' / phi^3.
inline Profile potential_by_quadrature(const Profile& phi, double alpha_const, Interval span) {
  auto integral = std::make_shared<numerics::CumulativeIntegral>(
      [phi](double t) {
        const double v = phi(t).value;
        return 1.0 / (v * v);
      },
      span, 256, kQuadratureTol);
  return Profile(
      [phi, alpha_const, integral](double xi) {
        const Jet1 p = phi(xi);
        const double inv2 = 1.0 / (p.value * p.value);
        return Jet1{alpha_const * (*integral)(xi), alpha_const * inv2,
                    -2.0 * alpha_const * p.d1 * inv2 / p.value};
      },
      span, phi.backend());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Steady family, h' != 0

struct SteadyFamilyParams {
  int n = 3;
  int m = 2;
  double alpha_const = 1.0;  // h' phi^2
  double beta = 0.0;         // first-integral constant
  double c = 0.0;            // f = e^c / phi
  double nu = 0.0;           // xi shift; enters only the beta = 0 reference solution
  double phi0 = 1.0;         // phi at domain.lo
  Interval domain{1.0, 10.0};
  Direction direction = Direction::diagonal(3);

  void validate() const {
    if (alpha_const == 0.0) throw ConfigError("steady family needs alpha != 0");
    if (n < 2 || m < 1 || n + m < 3) throw ConfigError("steady family needs n >= 2, m >= 1, n + m >= 3");
    if (!(phi0 > 0.0)) throw ConfigError("steady family needs phi0 > 0");
    if (!(domain.hi > domain.lo) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi)) {
      throw ConfigError("steady family needs a finite nonempty domain");
    }
    if (direction.dim() != n) throw ConfigError("direction dimension must equal n");
    const CausalType ct = causal_type(direction.alpha, direction.sig);
    if (ct.cls == CausalClass::lightlike) throw ConfigError("steady family needs a non-null direction");
  }
};

/// phi' = (alpha - K phi^{(N+2)/2}) / ((N-1)(N+2) phi), N = n + m,
/// K = 2 beta (N-1)(N+2) / (N-2).
struct SteadyPhiSlope {
  double alpha, K, D, p;

  explicit SteadyPhiSlope(const SteadyFamilyParams& s) {
    const double N = s.n + s.m;
    alpha = s.alpha_const;
    D = (N - 1.0) * (N + 2.0);
    K = 2.0 * s.beta * D / (N - 2.0);
    p = N / 2.0 + 1.0;
  }
  double operator()(double phi) const { return (alpha - K * std::pow(phi, p)) / (D * phi); }
  /// d/dphi of the slope
  double derivative(double phi) const {
    return -alpha / (D * phi * phi) - (K / D) * (p - 1.0) * std::pow(phi, p - 2.0);
  }
};

inline constexpr double kSteadyPhiFloor = 1e-6;
inline constexpr double kSteadyPhiCeiling = 1e8;

inline Construction steady_family(const SteadyFamilyParams& sp) {
  sp.validate();
  const SteadyPhiSlope slope(sp);
  if (!std::isfinite(slope(sp.phi0))) throw DomainError("steady family: singular at xi0");

  numerics::IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  cfg.max_step = sp.domain.width() / 64.0;
  cfg.event = [](double, const numerics::State& y) {
    return std::min(y[0] - kSteadyPhiFloor, kSteadyPhiCeiling - y[0]);
  };
  const numerics::Trajectory tr = numerics::integrate_ivp(
      [&slope](double, const numerics::State& y) { return numerics::State{slope(y[0])}; },
      {sp.phi0}, sp.domain, cfg);
  if (tr.xi.size() < 2) throw DomainError("steady family: singular immediately at xi0");

  std::vector<double> ys, d1s, d2s;
  for (const auto& y : tr.y) {
    ys.push_back(y[0]);
    d1s.push_back(slope(y[0]));
    d2s.push_back(slope.derivative(y[0]) * slope(y[0]));
  }
  const Interval covered{sp.domain.lo, tr.end()};
  auto interp = std::make_shared<detail::QuinticHermite>(tr.xi, ys, d1s, d2s);

  // Derivatives come from the slope law at the interpolated value: the jet of
  // the exact solution through that point.
  Profile phi(
      [interp, slope](double xi) {
        const double v = (*interp)(xi);
        const double d1 = slope(v);
        return Jet1{v, d1, slope.derivative(v) * d1};
      },
      covered, Backend::analytic);
  const double ec = std::exp(sp.c);
  Profile f(
      [phi, ec](double xi) {
        const Jet1 p = phi(xi);
        const double v = p.value;
        return Jet1{ec / v, -ec * p.d1 / (v * v),
                    ec * (2.0 * p.d1 * p.d1 / (v * v * v) - p.d2 / (v * v))};
      },
      covered, Backend::analytic);
  Profile h = detail::potential_by_quadrature(phi, sp.alpha_const, covered);

  Construction c;
  c.family = "steady";
  c.params = {{"n", sp.n},          {"m", sp.m},   {"alpha", sp.alpha_const},
              {"beta", sp.beta},    {"c", sp.c},   {"nu", sp.nu},
              {"phi0", sp.phi0}};
  c.profile = make_invariant_profile(sp.direction, phi, f, h, sp.m, 0.0, 0.0);
  c.requested = sp.domain;
  c.domain = covered;
  c.truncated = !tr.reached(sp.domain.hi);
  c.termination = numerics::to_string(tr.reason);
  detail::self_validate(c);
  return c;
}

/// beta = 0 reference: phi^2 = 2 alpha (xi + nu) / ((N-1)(N+2)).
inline double steady_beta0_phi(const SteadyFamilyParams& sp, double xi) {
  const double N = sp.n + sp.m;
  return std::sqrt(2.0 * sp.alpha_const * (xi + sp.nu) / ((N - 1.0) * (N + 2.0)));
}

/// Left side of the implicit relation
///   (N-1)(N+2) \int_{phi0}^{phi} s ds / (alpha - K s^{N/2+1}) = xi - xi0.
inline double steady_implicit_lhs(const SteadyFamilyParams& sp, double phi_end) {
  const SteadyPhiSlope slope(sp);
  return slope.D * numerics::quad_adaptive(
                       [&slope](double s) { return s / (slope.alpha - slope.K * std::pow(s, slope.p)); },
                       sp.phi0, phi_end, 1e-12);
}

// ---------------------------------------------------------------------------
// Riccati family, h constant

/// z^2 + 2/(m+1) z' + (n+m-1)/(m(m+1)^2) (n (phi'/phi)^2 - 2 phi''/phi)
inline double riccati_residual(const Jet1& z, const Jet1& phi, int n, int m) {
  require_positive(phi.value, "phi");
  const double q = phi.d1 / phi.value;
  return z.value * z.value + 2.0 / (m + 1.0) * z.d1 +
         (n + m - 1.0) / (m * (m + 1.0) * (m + 1.0)) * (n * q * q - 2.0 * phi.d2 / phi.value);
}

inline double riccati_residual(const Profile& z, const Profile& phi, int n, int m, double xi) {
  return riccati_residual(z(xi), phi(xi), n, m);
}

/// z = f'/f - (n-2)/(m+1) phi'/phi recovered from the jets of f and phi.
inline Profile recovered_z(const Profile& f, const Profile& phi, int n, int m) {
  const double q = (n - 2.0) / (m + 1.0);
  const Interval d{std::max(f.domain().lo, phi.domain().lo), std::min(f.domain().hi, phi.domain().hi)};
  return Profile(
      [f, phi, q](double xi) {
        const Jet1 a = f(xi), p = phi(xi);
        const double lf = a.d1 / a.value;
        const double lp = p.d1 / p.value;
        return Jet1{lf - q * lp, a.d2 / a.value - lf * lf - q * (p.d2 / p.value - lp * lp), 0.0};
      },
      d, Backend::analytic);
}

inline constexpr double kRiccatiParticularTol = 1e-8;

struct RiccatiParams {
  int n = 3;
  int m = 2;
  Profile phi;
  Profile z_p;
  /// Integration constant; +/-infinity selects the particular branch f = phi^q e^{\int z_p}.
  double C = 1.0;
  Interval domain{0.0, 1.0};
  Direction direction = Direction::diagonal(3);

  void validate() const {
    if (n < 2 || m < 1) throw ConfigError("Riccati family needs n >= 2, m >= 1");
    if (!(domain.hi > domain.lo) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi)) {
      throw ConfigError("Riccati family needs a finite nonempty domain");
    }
    if (direction.dim() != n) throw ConfigError("direction dimension must equal n");
    if (causal_type(direction.alpha, direction.sig).cls == CausalClass::lightlike) {
      throw ConfigError("Riccati family needs a non-null direction");
    }
    constexpr int kChecks = 65;
    for (int k = 0; k < kChecks; ++k) {
      const double xi = domain.lo + domain.width() * k / (kChecks - 1);
      const double r = riccati_residual(z_p, phi, n, m, xi);
      if (!(std::abs(r) <= kRiccatiParticularTol)) {
        throw ConfigError("z_p is not a particular Riccati solution (residual " +
                          std::to_string(r) + " at xi = " + std::to_string(xi) + ")");
      }
    }
  }
};

/// f = phi^{(n-2)/(m+1)} e^{Z} (I + 2C/(m+1))^{2/(m+1)}, Z = \int z_p,
/// I = \int e^{-(m+1) Z}, both accumulated from the left endpoint.
inline Construction riccati_family(const RiccatiParams& rp) {
  rp.validate();
  const double m1 = rp.m + 1.0;
  const double q = (rp.n - 2.0) / m1;
  const Profile zp = rp.z_p;
  const Profile phi = rp.phi.positive();

  auto Z = std::make_shared<numerics::CumulativeIntegral>(
      [zp](double t) { return zp(t).value; }, rp.domain, 256, kQuadratureTol);
  const bool particular = std::isinf(rp.C);
  std::shared_ptr<numerics::CumulativeIntegral> I;
  if (!particular) {
    I = std::make_shared<numerics::CumulativeIntegral>(
        [Z, m1](double t) { return std::exp(-m1 * (*Z)(t)); }, rp.domain, 256, kQuadratureTol);
  }
  const double shift = particular ? 0.0 : 2.0 * rp.C / m1;

  Interval covered = rp.domain;
  bool truncated = false;
  if (!particular && !(shift > 0.0)) {
    // I grows from 0, so I + shift vanishes once, if at all.
    auto A = [I, shift](double t) { return (*I)(t) + shift; };
    if (!(A(rp.domain.hi) > 0.0)) {
      throw DomainError("Riccati family: accumulated integral never becomes positive on the domain");
    }
    const double root = numerics::root_bracketed(A, rp.domain.lo, rp.domain.hi, 1e-12);
    covered.lo = root + 1e-6 * rp.domain.width();
    truncated = true;
  }

  Profile f(
      [phi, zp, Z, I, q, m1, shift, particular](double xi) {
        const Jet1 p = phi(xi);
        const Jet1 z = zp(xi);
        const double lp = p.d1 / p.value;
        double log_f = q * std::log(p.value) + (*Z)(xi);
        double L = q * lp + z.value;
        double dL = q * (p.d2 / p.value - lp * lp) + z.d1;
        if (!particular) {
          const double A = (*I)(xi) + shift;
          if (!(A > 0.0)) throw PositivityError("Riccati family: accumulated integral vanished");
          const double E = std::exp(-m1 * (*Z)(xi));
          log_f += (2.0 / m1) * std::log(A);
          L += (2.0 / m1) * E / A;
          dL += (2.0 / m1) * (-m1 * z.value * E / A - E * E / (A * A));
        }
        const double v = std::exp(log_f);
        return Jet1{v, v * L, v * (L * L + dL)};
      },
      covered, Backend::analytic);

  Construction c;
  c.family = "riccati";
  c.params = {{"n", rp.n}, {"m", rp.m}, {"C", rp.C}};
  c.profile = make_invariant_profile(rp.direction, phi.with_domain(covered), f,
                                     constant_profile(0.0, covered), rp.m, 0.0, 0.0);
  c.requested = rp.domain;
  c.domain = covered;
  c.truncated = truncated;
  c.termination = truncated ? "accumulated_integral_zero" : "completed";
  detail::self_validate(c);
  return c;
}

// ---------------------------------------------------------------------------
// Lightlike family

inline Construction lightlike_family(const Profile& phi, const Profile& f, double alpha_const,
                                     Interval domain, const Direction& dir = Direction::null_lorentz(3),
                                     int m = 1) {
  if (!(domain.hi > domain.lo) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi)) {
    throw ConfigError("lightlike family needs a finite nonempty domain");
  }
  if (causal_type(dir.alpha, dir.sig).cls != CausalClass::lightlike) {
    throw ConfigError("lightlike family needs a null direction");
  }
  const Profile phi_d = phi.positive().with_domain(domain);
  Construction c;
  c.family = "lightlike";
  c.params = {{"n", dir.dim()}, {"m", m}, {"alpha", alpha_const}};
  c.profile = make_invariant_profile(dir, phi_d, f.with_domain(domain),
                                     detail::potential_by_quadrature(phi_d, alpha_const, domain),
                                     m, 0.0, 0.0);
  c.requested = domain;
  c.domain = domain;
  detail::self_validate(c);
  return c;
}

/// rho(xi) = lambda_F / f(xi)^2
inline double almost_soliton_rho(const Profile& f, double lambda_F, double xi) {
  const double v = f(xi).value;
  require_positive(v, "f");
  return lambda_F / (v * v);
}

}  // namespace yamabe
