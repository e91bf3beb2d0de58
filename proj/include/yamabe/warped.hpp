#pragma once

// Warped products (R^n, gbar) x_f F^m with a scalar-constant fiber: scalar
// curvature, the gradient Yamabe soliton residual system, grid sweeps, and
// the structure diagnostics for separable potentials.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/fields.hpp"
#include "yamabe/geometry.hpp"

namespace yamabe {

struct WarpedSolitonData {
  ConformalBase base;
  ScalarField f;  // warping function
  ScalarField h;  // potential
  int m = 1;      // fiber dimension
  double lambda_F = 0.0;
  double rho = 0.0;

  int dim() const { return base.dim(); }

  void validate() const {
    if (m < 1) throw ConfigError("fiber dimension m must be >= 1");
    const int n = dim();
    if (base.phi.dim() != n || f.dim() != n || h.dim() != n) {
      throw ConfigError("phi, f and h must all be fields on R^n with n = signature length");
    }
  }
};

// ---------------------------------------------------------------------------
// Pointwise curvature and residuals

/// Jets of phi, f and h at one point.
struct WarpedJets {
  Jet2 phi, f, h;
};

inline WarpedJets evaluate_jets(const WarpedSolitonData& d, const Point& x) {
  return {d.base.phi(x), d.f(x), d.h(x)};
}

/// Scalar curvature of the warped metric from pre-evaluated jets.
inline double warped_scalar_curvature(const WarpedSolitonData& d, const WarpedJets& j) {
  require_positive(j.f.value, "f");
  const Signature& sig = d.base.sig;
  const double fv = j.f.value;
  const double m = d.m;
  return conformal_scalar_curvature(sig, j.phi) + d.lambda_F / (fv * fv) -
         (2.0 * m / fv) * conformal_laplacian(sig, j.phi, j.f) -
         m * (m - 1.0) * conformal_grad_sq(sig, j.phi, j.f) / (fv * fv);
}

inline double warped_scalar_curvature(const WarpedSolitonData& d, const Point& x) {
  return warped_scalar_curvature(d, evaluate_jets(d, x));
}

/// Residuals of the soliton system at one point, as LHS - RHS of each
/// equation: base off-diagonal (i != j), base diagonal (i = j), fiber.
struct SolitonResiduals {
  Eigen::MatrixXd offdiag;  // zero diagonal, symmetric
  Eigen::VectorXd diag;
  double fiber = 0.0;

  double offdiag_max() const { return offdiag.size() ? offdiag.cwiseAbs().maxCoeff() : 0.0; }
  double diag_max() const { return diag.size() ? diag.cwiseAbs().maxCoeff() : 0.0; }
  double fiber_abs() const { return std::abs(fiber); }
  double max_abs() const { return std::max({offdiag_max(), diag_max(), fiber_abs()}); }
};

inline SolitonResiduals soliton_residuals(const WarpedSolitonData& d, const WarpedJets& j) {
  const Signature& sig = d.base.sig;
  const int n = sig.dim();
  const double scal = warped_scalar_curvature(d, j);
  const Eigen::MatrixXd hess = conformal_hessian(sig, j.phi, j.h);
  const double phi2 = j.phi.value * j.phi.value;

  SolitonResiduals r;
  r.offdiag = hess;
  r.offdiag.diagonal().setZero();
  r.diag.resize(n);
  for (int i = 0; i < n; ++i) r.diag[i] = (scal - d.rho) * sig[i] / phi2 - hess(i, i);
  r.fiber = (scal - d.rho) - phi2 / j.f.value * sig.dot(j.f.grad, j.h.grad);
  return r;
}

inline SolitonResiduals soliton_residuals(const WarpedSolitonData& d, const Point& x) {
  return soliton_residuals(d, evaluate_jets(d, x));
}

// ---------------------------------------------------------------------------
// Grids

struct Box {
  Eigen::VectorXd lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
};

inline constexpr int kDefaultPointsPerAxis = 11;
inline constexpr std::size_t kMaxGridPoints = 100'000;

/// Uniform lattice with `per_axis` points per coordinate (endpoints included).
/// The per-axis count is reduced until the total is at most `cap`.
inline std::vector<Point> lattice(const Box& box, int per_axis = kDefaultPointsPerAxis,
                                  std::size_t cap = kMaxGridPoints) {
  const int n = box.dim();
  if (n < 1 || box.hi.size() != n) throw ConfigError("lattice: box corners differ in dimension");
  if (per_axis < 1) throw ConfigError("lattice: need at least one point per axis");
  auto total = [n](int k) {
    double t = 1.0;
    for (int i = 0; i < n; ++i) t *= k;
    return t;
  };
  while (per_axis > 1 && total(per_axis) > static_cast<double>(cap)) --per_axis;
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(total(per_axis)));
  std::vector<int> idx(n, 0);
  while (true) {
    Point x(n);
    for (int i = 0; i < n; ++i) {
      x[i] = per_axis == 1 ? 0.5 * (box.lo[i] + box.hi[i])
                           : box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / (per_axis - 1);
    }
    out.push_back(std::move(x));
    int k = n - 1;
    while (k >= 0 && ++idx[k] == per_axis) idx[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct EquationStats {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  double l2 = 0.0;  // Euclidean norm over evaluated points
};

struct PointResidual {
  Point x;
  double eq19 = 0.0;  // max |offdiag|
  double eq20 = 0.0;  // max |diag_i|
  double eq21 = 0.0;  // |fiber|
};

struct ResidualReport {
  std::size_t grid_size = 0;
  std::size_t excluded = 0;
  EquationStats eq19, eq20, eq21;
  double tol = 0.0;
  bool pass = false;
  std::vector<PointResidual> points;  // evaluated points, grid order

  struct Metadata {
    std::string backend;
    int n = 0;
    int m = 0;
    double lambda_F = 0.0;
    double rho = 0.0;
    std::vector<std::string> warnings;
  } meta;

  std::size_t evaluated() const { return points.size(); }
  double max_abs() const { return std::max({eq19.max_abs, eq20.max_abs, eq21.max_abs}); }
};

/// Worker count: YAMABE_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("YAMABE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

struct PointOutcome {
  bool excluded = true;
  PointResidual r;
};

inline PointOutcome evaluate_point(const WarpedSolitonData& d, const Point& x) {
  PointOutcome out;
  if (!d.base.phi.defined_at(x) || !d.f.defined_at(x) || !d.h.defined_at(x)) return out;
  try {
    const WarpedJets j = evaluate_jets(d, x);
    if (!(j.phi.value >= kPositivityFloor) || !(j.f.value >= kPositivityFloor)) return out;
    const SolitonResiduals res = soliton_residuals(d, j);
    out.r = {x, res.offdiag_max(), res.diag_max(), res.fiber_abs()};
    out.excluded = false;
  } catch (const DomainError&) {
    out.excluded = true;
  }
  return out;
}

inline void accumulate(EquationStats& s, double v) {
  s.max_abs = std::max(s.max_abs, v);
  s.mean_abs += v;
  s.l2 += v * v;
}

inline void finish(EquationStats& s, std::size_t count) {
  s.mean_abs = count ? s.mean_abs / static_cast<double>(count) : 0.0;
  s.l2 = std::sqrt(s.l2);
}

}  // namespace detail

/// Evaluates soliton_residuals over `grid`. Points where a field is undefined
/// or phi, f fall below the positivity floor are excluded and counted. The
/// report passes iff at least one point was evaluated and every per-equation
/// maximum is within `tol`.
inline ResidualReport residual_sweep(const WarpedSolitonData& d, const std::vector<Point>& grid,
                                     double tol, unsigned threads = 0) {
  if (grid.empty()) throw ConfigError("residual_sweep: empty grid");
  d.validate();
  if (threads == 0) threads = worker_count();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(grid.size())));

  std::vector<detail::PointOutcome> outcomes(grid.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) outcomes[i] = detail::evaluate_point(d, grid[i]);
  };
  if (threads == 1) {
    work(0, grid.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (grid.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(grid.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  ResidualReport rep;
  rep.grid_size = grid.size();
  rep.tol = tol;
  for (auto& o : outcomes) {
    if (o.excluded) {
      ++rep.excluded;
      continue;
    }
    detail::accumulate(rep.eq19, o.r.eq19);
    detail::accumulate(rep.eq20, o.r.eq20);
    detail::accumulate(rep.eq21, o.r.eq21);
    rep.points.push_back(std::move(o.r));
  }
  for (EquationStats* s : {&rep.eq19, &rep.eq20, &rep.eq21}) detail::finish(*s, rep.evaluated());
  rep.pass = rep.evaluated() > 0 && rep.eq19.max_abs <= tol && rep.eq20.max_abs <= tol &&
             rep.eq21.max_abs <= tol;

  rep.meta.backend = to_string(d.h.backend());
  rep.meta.n = d.dim();
  rep.meta.m = d.m;
  rep.meta.lambda_F = d.lambda_F;
  rep.meta.rho = d.rho;
  if (d.base.low_dimension()) {
    rep.meta.warnings.push_back("n = 2 is below the n >= 3 range of the warped soliton system");
  }
  if (rep.evaluated() == 0) rep.meta.warnings.push_back("no grid point inside the domain");
  return rep;
}

// ---------------------------------------------------------------------------
// Structure diagnostics

/// Cases for a warped product soliton with potential h1(x) + h2(y).
enum class StructureCase {
  trivial_times_soliton,      // (a) f constant, h2 constant
  soliton_times_soliton,      // (b) f constant, h2 arbitrary
  almost_soliton_warped,      // (c) f non-constant, h2 constant
  violation,                  // f non-constant and h2 non-constant
};

inline const char* to_string(StructureCase c) {
  switch (c) {
    case StructureCase::trivial_times_soliton: return "a";
    case StructureCase::soliton_times_soliton: return "b";
    case StructureCase::almost_soliton_warped: return "c";
    case StructureCase::violation: return "violation";
  }
  return "?";
}

inline StructureCase classify_structure(bool f_is_constant, bool h_fiber_part_constant) {
  if (f_is_constant) {
    return h_fiber_part_constant ? StructureCase::trivial_times_soliton
                                 : StructureCase::soliton_times_soliton;
  }
  return h_fiber_part_constant ? StructureCase::almost_soliton_warped : StructureCase::violation;
}

struct MixedHessianWitness {
  Point x;
  int i = 0;  // zero-based coordinate indices, i < j
  int j = 1;
  double value = 0.0;
};

inline constexpr double kMixedHessianThreshold = 1e-8;

/// First grid point with a non-vanishing off-diagonal conformal Hessian of f,
/// i.e. a witness that the potential must depend only on the base.
inline std::optional<MixedHessianWitness> mixed_hessian_hypothesis(
    const ScalarField& f, const ConformalBase& base, const std::vector<Point>& grid) {
  const int n = base.dim();
  for (const Point& x : grid) {
    if (!f.defined_at(x) || !base.phi.defined_at(x)) continue;
    const Eigen::MatrixXd hess = conformal_hessian(base, f, x);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (std::abs(hess(i, j)) > kMixedHessianThreshold) {
          return MixedHessianWitness{x, i, j, hess(i, j)};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace yamabe
