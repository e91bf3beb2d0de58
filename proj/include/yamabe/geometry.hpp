#pragma once

// Geometry of the conformal metric gbar = g / phi^2 on pseudo-Euclidean
// (R^n, g = diag(eps)).
//
// Every contraction carries the signature explicitly. Kernels come in two
// flavours: ones taking already-evaluated jets (used inside residual loops so
// each field is evaluated once per point) and convenience overloads taking a
// ConformalBase and a point.

#include <Eigen/Dense>

#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/fields.hpp"

namespace yamabe {

/// Conformal factors below this are rejected.
inline constexpr double kPositivityFloor = 1e-12;

class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<int> eps) : eps_(std::move(eps)) { validate(); }
  Signature(std::initializer_list<int> eps) : eps_(eps) { validate(); }

  static Signature euclidean(int n) { return Signature(std::vector<int>(n, 1)); }
  /// eps_1 = -1, all others +1.
  static Signature lorentz(int n) {
    std::vector<int> e(n, 1);
    e[0] = -1;
    return Signature(std::move(e));
  }

  int dim() const { return static_cast<int>(eps_.size()); }
  int operator[](int i) const { return eps_[i]; }
  const std::vector<int>& entries() const { return eps_; }

  /// sum_k eps_k a_k b_k
  double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    double s = 0.0;
    for (int k = 0; k < dim(); ++k) s += eps_[k] * a[k] * b[k];
    return s;
  }

  /// sum_k eps_k M_kk
  double trace(const Eigen::MatrixXd& m) const {
    double s = 0.0;
    for (int k = 0; k < dim(); ++k) s += eps_[k] * m(k, k);
    return s;
  }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  void validate() const {
    if (eps_.size() < 2) throw ConfigError("signature needs n >= 2 entries");
    if (eps_.size() > static_cast<std::size_t>(kMaxDim)) {
      throw ConfigError("signature longer than the supported maximum dimension");
    }
    for (int e : eps_) {
      if (e != 1 && e != -1) throw ConfigError("signature entries must be exactly +1 or -1");
    }
  }

  std::vector<int> eps_;
};

struct ConformalBase {
  Signature sig;
  ScalarField phi;

  int dim() const { return sig.dim(); }
  /// True below the dimension range n >= 3 of the general theory.
  bool low_dimension() const { return dim() < 3; }
};

inline void require_positive(double value, const char* what) {
  if (!(value >= kPositivityFloor)) {
    std::ostringstream os;
    os << what << " = " << value << " violates positivity";
    throw PositivityError(os.str());
  }
}

/// Gamma^k_{ij}, stored densely; (*this)(k, i, j).
class Christoffel {
 public:
  explicit Christoffel(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}
  double& operator()(int k, int i, int j) { return data_[(k * n_ + i) * n_ + j]; }
  double operator()(int k, int i, int j) const { return data_[(k * n_ + i) * n_ + j]; }
  int dim() const { return n_; }

 private:
  int n_;
  std::vector<double> data_;
};

inline Christoffel christoffel(const Signature& sig, const Jet2& phi) {
  require_positive(phi.value, "phi");
  const int n = sig.dim();
  Christoffel g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = -phi.grad[j] / phi.value;  // Gamma^i_{ij} = Gamma^i_{ji}
      g(i, i, j) = v;
      g(i, j, i) = v;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      g(k, i, i) = (k == i) ? -phi.grad[i] / phi.value
                            : sig[i] * sig[k] * phi.grad[k] / phi.value;
    }
  }
  return g;
}

inline Christoffel christoffel(const ConformalBase& base, const Point& x) {
  return christoffel(base.sig, base.phi(x));
}

/// Hess_gbar(h) in closed form.
inline Eigen::MatrixXd conformal_hessian(const Signature& sig, const Jet2& phi, const Jet2& h) {
  require_positive(phi.value, "phi");
  const int n = sig.dim();
  const double inv = 1.0 / phi.value;
  const double cross = sig.dot(phi.grad, h.grad) * inv;
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = h.hess(i, j) + (phi.grad[i] * h.grad[j] + phi.grad[j] * h.grad[i]) * inv;
      out(i, j) = v;
      out(j, i) = v;
    }
    out(i, i) = h.hess(i, i) + 2.0 * phi.grad[i] * h.grad[i] * inv - sig[i] * cross;
  }
  return out;
}

inline Eigen::MatrixXd conformal_hessian(const ConformalBase& base, const ScalarField& h,
                                         const Point& x) {
  return conformal_hessian(base.sig, base.phi(x), h(x));
}

/// Hess_ij = d_i d_j h - Gamma^k_ij d_k h, from the assembled Christoffel
/// symbols. Independent of conformal_hessian.
inline Eigen::MatrixXd covariant_hessian_generic(const Signature& sig, const Jet2& phi,
                                                 const Jet2& h) {
  const Christoffel gam = christoffel(sig, phi);
  const int n = sig.dim();
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = h.hess(i, j);
      for (int k = 0; k < n; ++k) s -= gam(k, i, j) * h.grad[k];
      out(i, j) = s;
    }
  }
  return out;
}

inline Eigen::MatrixXd covariant_hessian_generic(const ConformalBase& base, const ScalarField& h,
                                                 const Point& x) {
  return covariant_hessian_generic(base.sig, base.phi(x), h(x));
}

/// S_gbar = (n-1)(2 phi Lap_g phi - n |grad_g phi|^2).
inline double conformal_scalar_curvature(const Signature& sig, const Jet2& phi) {
  require_positive(phi.value, "phi");
  const int n = sig.dim();
  const double lap = sig.trace(phi.hess);
  const double grad_sq = sig.dot(phi.grad, phi.grad);
  return (n - 1) * (2.0 * phi.value * lap - n * grad_sq);
}

inline double conformal_scalar_curvature(const ConformalBase& base, const Point& x) {
  return conformal_scalar_curvature(base.sig, base.phi(x));
}

/// Lap_gbar u = phi^2 sum eps_k u_kk - (n-2) phi sum eps_k phi_k u_k.
inline double conformal_laplacian(const Signature& sig, const Jet2& phi, const Jet2& u) {
  require_positive(phi.value, "phi");
  const int n = sig.dim();
  return phi.value * phi.value * sig.trace(u.hess) -
         (n - 2) * phi.value * sig.dot(phi.grad, u.grad);
}

inline double conformal_laplacian(const ConformalBase& base, const ScalarField& u,
                                  const Point& x) {
  return conformal_laplacian(base.sig, base.phi(x), u(x));
}

/// |grad_gbar u|^2 = phi^2 sum eps_k u_k^2.
inline double conformal_grad_sq(const Signature& sig, const Jet2& phi, const Jet2& u) {
  require_positive(phi.value, "phi");
  return phi.value * phi.value * sig.dot(u.grad, u.grad);
}

inline double conformal_grad_sq(const ConformalBase& base, const ScalarField& u,
                                const Point& x) {
  return conformal_grad_sq(base.sig, base.phi(x), u(x));
}

}  // namespace yamabe
