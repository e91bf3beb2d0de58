#pragma once

// Second-order forward-mode dual numbers.
//
// A Dual2 carries the value, gradient and (packed, upper-triangular) Hessian
// of an expression with respect to up to kMaxDim seed variables. Every
// operation propagates the full second-order jet, so Hessians come out exact
// to rounding.

#include <array>
#include <cassert>
#include <cmath>
#include <span>

namespace yamabe {

inline constexpr int kMaxDim = 8;

class Dual2 {
 public:
  static constexpr int kPacked = kMaxDim * (kMaxDim + 1) / 2;

  constexpr Dual2() = default;
  constexpr Dual2(double value) : value_(value) {}  // NOLINT: implicit constant

  /// Seed variable `index` of an `dim`-dimensional jet.
  static Dual2 variable(double value, int index, int dim) {
    assert(dim >= 1 && dim <= kMaxDim && index >= 0 && index < dim);
    Dual2 d(value);
    d.dim_ = dim;
    d.grad_[index] = 1.0;
    return d;
  }

  static Dual2 constant(double value, int dim) {
    Dual2 d(value);
    d.dim_ = dim;
    return d;
  }

  double value() const { return value_; }
  int dim() const { return dim_; }
  double grad(int i) const { return grad_[i]; }
  double hess(int i, int j) const { return hess_[packed(i, j)]; }

  // Chain rule for a scalar map g with g(a), g'(a), g''(a) given.
  Dual2 chain(double g0, double g1, double g2) const {
    Dual2 r(g0);
    r.dim_ = dim_;
    for (int i = 0; i < dim_; ++i) r.grad_[i] = g1 * grad_[i];
    for (int i = 0; i < dim_; ++i) {
      for (int j = i; j < dim_; ++j) {
        const int p = packed(i, j);
        r.hess_[p] = g1 * hess_[p] + g2 * grad_[i] * grad_[j];
      }
    }
    return r;
  }

  Dual2 operator-() const { return chain(-value_, -1.0, 0.0); }

  Dual2& operator+=(const Dual2& b) {
    const int n = merge_dim(b);
    value_ += b.value_;
    for (int i = 0; i < n; ++i) grad_[i] += b.grad_[i];
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) hess_[packed(i, j)] += b.hess_[packed(i, j)];
    return *this;
  }

  Dual2& operator-=(const Dual2& b) {
    const int n = merge_dim(b);
    value_ -= b.value_;
    for (int i = 0; i < n; ++i) grad_[i] -= b.grad_[i];
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) hess_[packed(i, j)] -= b.hess_[packed(i, j)];
    return *this;
  }

  Dual2& operator*=(const Dual2& b) {
    const int n = merge_dim(b);
    const double a0 = value_;
    const double b0 = b.value_;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const int p = packed(i, j);
        hess_[p] = a0 * b.hess_[p] + b0 * hess_[p] + grad_[i] * b.grad_[j] +
                   grad_[j] * b.grad_[i];
      }
    }
    for (int i = 0; i < n; ++i) grad_[i] = a0 * b.grad_[i] + b0 * grad_[i];
    value_ = a0 * b0;
    return *this;
  }

  Dual2& operator/=(const Dual2& b) {
    *this *= b.reciprocal();
    return *this;
  }

  Dual2 reciprocal() const {
    const double inv = 1.0 / value_;
    return chain(inv, -inv * inv, 2.0 * inv * inv * inv);
  }

  friend Dual2 operator+(Dual2 a, const Dual2& b) { return a += b; }
  friend Dual2 operator-(Dual2 a, const Dual2& b) { return a -= b; }
  friend Dual2 operator*(Dual2 a, const Dual2& b) { return a *= b; }
  friend Dual2 operator/(Dual2 a, const Dual2& b) { return a /= b; }

  friend bool operator<(const Dual2& a, const Dual2& b) { return a.value_ < b.value_; }
  friend bool operator>(const Dual2& a, const Dual2& b) { return a.value_ > b.value_; }

 private:
  static constexpr int packed(int i, int j) {
    if (i > j) {
      const int t = i;
      i = j;
      j = t;
    }
    return i * kMaxDim - i * (i - 1) / 2 + (j - i);
  }

  // Constants built from plain doubles carry dim 0 and adopt the partner's.
  int merge_dim(const Dual2& b) {
    if (b.dim_ > dim_) dim_ = b.dim_;
    return dim_;
  }

  double value_ = 0.0;
  int dim_ = 0;
  std::array<double, kMaxDim> grad_{};
  std::array<double, kPacked> hess_{};
};

inline Dual2 exp(const Dual2& a) {
  const double e = std::exp(a.value());
  return a.chain(e, e, e);
}

inline Dual2 log(const Dual2& a) {
  const double inv = 1.0 / a.value();
  return a.chain(std::log(a.value()), inv, -inv * inv);
}

inline Dual2 sqrt(const Dual2& a) {
  const double s = std::sqrt(a.value());
  return a.chain(s, 0.5 / s, -0.25 / (s * a.value()));
}

inline Dual2 pow(const Dual2& a, double p) {
  const double v = a.value();
  if (p == 0.0) return a.chain(1.0, 0.0, 0.0);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  const double vp2 = std::pow(v, p - 2.0);
  return a.chain(vp2 * v * v, p * vp2 * v, p * (p - 1.0) * vp2);
}

inline Dual2 sin(const Dual2& a) {
  const double s = std::sin(a.value());
  return a.chain(s, std::cos(a.value()), -s);
}

inline Dual2 cos(const Dual2& a) {
  const double c = std::cos(a.value());
  return a.chain(c, -std::sin(a.value()), -c);
}

inline Dual2 sinh(const Dual2& a) {
  const double s = std::sinh(a.value());
  const double c = std::cosh(a.value());
  return a.chain(s, c, s);
}

inline Dual2 cosh(const Dual2& a) {
  const double s = std::sinh(a.value());
  const double c = std::cosh(a.value());
  return a.chain(c, s, c);
}

inline Dual2 tanh(const Dual2& a) {
  const double t = std::tanh(a.value());
  const double sech2 = 1.0 - t * t;
  return a.chain(t, sech2, -2.0 * t * sech2);
}

inline Dual2 atan(const Dual2& a) {
  const double v = a.value();
  const double d = 1.0 / (1.0 + v * v);
  return a.chain(std::atan(v), d, -2.0 * v * d * d);
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual2& x) { return x.value(); }

}  // namespace yamabe
