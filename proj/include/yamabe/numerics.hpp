#pragma once

// Shared numerical kernels: adaptive Simpson quadrature, bracketed root
// finding, and an embedded Dormand-Prince 5(4) integrator with event
// localization.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/fields.hpp"

namespace yamabe::numerics {

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {

struct SimpsonPanel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

inline double simpson_recurse(const std::function<double(double)>& fn, const SimpsonPanel& p,
                              double tol, int depth, int max_depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double delta = left + right - p.whole;
  if (!std::isfinite(delta)) throw ConvergenceError("quad_adaptive: non-finite integrand");
  // Below a few ulps of the panel value the estimate is roundoff, not error.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(left + right);
  if (std::abs(delta) <= 15.0 * std::max(tol, floor)) return left + right + delta / 15.0;
  if (depth >= max_depth) {
    throw ConvergenceError("quad_adaptive: subdivision limit reached near x = " +
                           std::to_string(p.m));
  }
  return simpson_recurse(fn, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * tol, depth + 1,
                         max_depth) +
         simpson_recurse(fn, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth + 1,
                         max_depth);
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction. Integrates right-to-left
/// (negated) when b < a. Throws ConvergenceError past `max_depth` bisections.
inline double quad_adaptive(const std::function<double(double)>& fn, double a, double b,
                            double abs_tol = 1e-10, int max_depth = 48) {
  if (!(abs_tol > 0.0)) throw ConfigError("quad_adaptive: tolerance must be positive");
  if (a == b) return 0.0;
  if (b < a) return -quad_adaptive(fn, b, a, abs_tol, max_depth);
  // Split into four panels up front so that integrands with structure away
  // from the midpoints are not accepted on a lucky first estimate.
  constexpr int kPanels = 4;
  double total = 0.0;
  const double w = (b - a) / kPanels;
  for (int k = 0; k < kPanels; ++k) {
    const double lo = a + k * w;
    const double hi = (k + 1 == kPanels) ? b : a + (k + 1) * w;
    const double mid = 0.5 * (lo + hi);
    const double flo = fn(lo), fmid = fn(mid), fhi = fn(hi);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += detail::simpson_recurse(fn, {lo, mid, hi, flo, fmid, fhi, whole},
                                     abs_tol / kPanels, 0, max_depth);
  }
  return total;
}

/// Running integral x -> \int_{lo}^{x} g, tabulated at uniform nodes so that
/// each evaluation only integrates from the nearest node to its left.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(std::function<double(double)> g, Interval span, int nodes = 256,
                     double abs_tol = 1e-10)
      : g_(std::move(g)), span_(span), tol_(abs_tol) {
    if (!(span.hi > span.lo) || !std::isfinite(span.lo) || !std::isfinite(span.hi)) {
      throw ConfigError("CumulativeIntegral: span must be a finite nonempty interval");
    }
    nodes = std::max(nodes, 1);
    step_ = span.width() / nodes;
    cum_.assign(nodes + 1, 0.0);
    for (int k = 0; k < nodes; ++k) {
      cum_[k + 1] = cum_[k] + quad_adaptive(g_, node(k), node(k + 1), tol_ / nodes);
    }
  }

  double operator()(double x) const {
    if (!span_.contains(x)) throw DomainError("CumulativeIntegral: x outside span");
    int k = static_cast<int>(std::floor((x - span_.lo) / step_));
    k = std::clamp(k, 0, static_cast<int>(cum_.size()) - 1);
    if (x < node(k)) --k;
    const double x0 = node(k);
    if (x == x0) return cum_[k];
    return cum_[k] + quad_adaptive(g_, x0, x, tol_ / static_cast<double>(cum_.size()));
  }

  const Interval& span() const { return span_; }

 private:
  double node(int k) const {
    return k + 1 == static_cast<int>(cum_.size()) ? span_.hi : span_.lo + k * step_;
  }

  std::function<double(double)> g_;
  Interval span_;
  double tol_ = 1e-10;
  double step_ = 1.0;
  std::vector<double> cum_;
};

// ---------------------------------------------------------------------------
// Root finding

/// Brent's method on a sign-changing bracket. Returns a point whose bracket
/// width is at most `tol`.
inline double root_bracketed(const std::function<double(double)>& fn, double a, double b,
                             double tol = 1e-12, int max_iter = 200) {
  double fa = fn(a);
  double fb = fn(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw DomainError("root_bracketed: no sign change on [" + std::to_string(a) + ", " +
                      std::to_string(b) + "]");
  }
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa;
      d = b - a; e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = fn(b);
  }
  throw ConvergenceError("root_bracketed: iteration limit reached");
}

// ---------------------------------------------------------------------------
// Initial value problems

using State = std::vector<double>;
using Rhs = std::function<State(double, const State&)>;

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0: chosen from the rhs scale
  /// Integration halts where this changes sign (or becomes exactly zero).
  std::function<double(double, const State&)> event;
  double event_tol = 1e-10;
  long max_steps = 1'000'000;
};

enum class Termination { completed, event, step_underflow, non_finite, max_steps };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::event: return "event";
    case Termination::step_underflow: return "step_underflow";
    case Termination::non_finite: return "non_finite";
    case Termination::max_steps: return "max_steps";
  }
  return "?";
}

/// Accepted nodes of an integration, with derivatives at each node.
struct Trajectory {
  std::vector<double> xi;
  std::vector<State> y;
  std::vector<State> dy;
  Termination reason = Termination::completed;

  double end() const { return xi.back(); }
  bool reached(double target) const { return reason == Termination::completed && end() == target; }

  /// Cubic Hermite interpolation between accepted nodes.
  State interpolate(double x) const {
    if (xi.empty() || x < xi.front() || x > xi.back()) {
      throw DomainError("Trajectory::interpolate: x outside integrated range");
    }
    auto it = std::upper_bound(xi.begin(), xi.end(), x);
    std::size_t k = (it == xi.begin()) ? 0 : static_cast<std::size_t>(it - xi.begin()) - 1;
    if (k + 1 >= xi.size()) return y.back();
    const double h = xi[k + 1] - xi[k];
    const double t = (x - xi[k]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    State out(y[k].size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = h00 * y[k][i] + h10 * h * dy[k][i] + h01 * y[k + 1][i] + h11 * h * dy[k + 1][i];
    }
    return out;
  }
};

namespace detail {

struct DpStep {
  State y5;
  State err;
  State k7;  // rhs at the new point (FSAL)
  bool finite = true;
};

// One Dormand-Prince 5(4) step from (x, y) with derivative k1.
inline DpStep dopri_step(const Rhs& rhs, double x, const State& y, const State& k1, double h) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const std::size_t n = y.size();
  State tmp(n);
  auto stage = [&](auto&& combine) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * combine(i);
    return tmp;
  };
  const State k2 = rhs(x + c2 * h, stage([&](std::size_t i) { return a21 * k1[i]; }));
  const State k3 =
      rhs(x + c3 * h, stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }));
  const State k4 = rhs(x + c4 * h, stage([&](std::size_t i) {
                         return a41 * k1[i] + a42 * k2[i] + a43 * k3[i];
                       }));
  const State k5 = rhs(x + c5 * h, stage([&](std::size_t i) {
                         return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i];
                       }));
  const State k6 = rhs(x + h, stage([&](std::size_t i) {
                         return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                a65 * k5[i];
                       }));
  DpStep out;
  out.y5.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    out.finite = out.finite && std::isfinite(out.y5[i]);
  }
  if (!out.finite) return out;
  out.k7 = rhs(x + h, out.y5);
  out.err.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                      e7 * out.k7[i]);
    out.finite = out.finite && std::isfinite(out.k7[i]) && std::isfinite(out.err[i]);
  }
  return out;
}

inline bool all_finite(const State& s) {
  return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

/// Integrates y' = rhs(x, y) forward from span.lo to span.hi.
///
/// When `cfg.event` changes sign inside a step, the crossing is localized by
/// root finding on fresh single steps from the last accepted node, and the
/// trajectory ends at the last point before the crossing (within event_tol).
inline Trajectory integrate_ivp(const Rhs& rhs, State y0, Interval span,
                                const IntegratorConfig& cfg = {}) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) {
    throw ConfigError("integrate_ivp: tolerances must be positive");
  }
  if (!(span.hi >= span.lo) || !std::isfinite(span.lo) || !std::isfinite(span.hi)) {
    throw ConfigError("integrate_ivp: span must be finite with lo <= hi");
  }
  Trajectory tr;
  double x = span.lo;
  State y = std::move(y0);
  State k1 = rhs(x, y);
  if (!detail::all_finite(y) || !detail::all_finite(k1)) {
    throw DomainError("integrate_ivp: rhs not finite at the initial point");
  }
  tr.xi.push_back(x);
  tr.y.push_back(y);
  tr.dy.push_back(k1);
  if (span.hi == span.lo) return tr;

  const std::size_t n = y.size();
  auto error_norm = [&](const State& ynew, const State& err) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      acc += (err[i] / sc) * (err[i] / sc);
    }
    return std::sqrt(acc / static_cast<double>(std::max<std::size_t>(n, 1)));
  };

  double h = cfg.initial_step;
  if (!(h > 0.0)) {
    double ymax = 0.0, dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ymax = std::max(ymax, std::abs(y[i]));
      dmax = std::max(dmax, std::abs(k1[i]));
    }
    h = (dmax > 0.0) ? 0.01 * (ymax + cfg.abs_tol) / dmax : 0.01 * span.width();
    h = std::clamp(h, 1e-6 * span.width(), 0.1 * span.width());
  }
  h = std::min(h, cfg.max_step);
  const double event0 = cfg.event ? cfg.event(x, y) : 1.0;
  if (cfg.event && event0 == 0.0) {
    tr.reason = Termination::event;
    return tr;
  }

  long steps = 0;
  while (x < span.hi) {
    if (++steps > cfg.max_steps) {
      tr.reason = Termination::max_steps;
      return tr;
    }
    const bool last = x + h >= span.hi;
    const double hstep = last ? span.hi - x : h;
    if (hstep <= 1e-14 * (std::abs(x) + 1.0)) {
      tr.reason = Termination::step_underflow;
      return tr;
    }
    detail::DpStep st = detail::dopri_step(rhs, x, y, k1, hstep);
    if (!st.finite) {
      h = 0.25 * hstep;
      if (h <= 1e-14 * (std::abs(x) + 1.0)) {
        tr.reason = Termination::non_finite;
        return tr;
      }
      continue;
    }
    const double err = error_norm(st.y5, st.err);
    if (err > 1.0) {
      h = hstep * std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    if (cfg.event) {
      auto crossed = [&](double g) { return g != 0.0 && (g > 0.0) != (event0 > 0.0); };
      const double g_new = cfg.event(x + hstep, st.y5);
      if (g_new == 0.0 || crossed(g_new)) {
        const double x0 = x;
        auto g_of = [&](double s) {
          if (s <= 0.0) return event0;
          return cfg.event(x0 + s, detail::dopri_step(rhs, x0, y, k1, s).y5);
        };
        // Keep the endpoint on the pre-crossing side of the event.
        double s_end = hstep;
        if (g_new != 0.0) {
          s_end = std::max(0.0, root_bracketed(g_of, 0.0, hstep, cfg.event_tol) - cfg.event_tol);
        }
        while (s_end > 0.0 && crossed(g_of(s_end))) s_end *= 0.5;
        if (s_end > 0.0) {
          detail::DpStep fin = detail::dopri_step(rhs, x0, y, k1, s_end);
          tr.xi.push_back(x0 + s_end);
          tr.y.push_back(fin.y5);
          tr.dy.push_back(fin.k7);
        }
        tr.reason = Termination::event;
        return tr;
      }
    }

    x = last ? span.hi : x + hstep;
    y = std::move(st.y5);
    k1 = std::move(st.k7);
    tr.xi.push_back(x);
    tr.y.push_back(y);
    tr.dy.push_back(k1);
    const double fac = (err == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::min(hstep * fac, cfg.max_step);
  }
  return tr;
}

}  // namespace yamabe::numerics
