#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

namespace npgeo {

/// Second-order jet in three variables: a value with its exact gradient and
/// Hessian. Only the upper triangle of the Hessian is stored, so it is
/// symmetric by construction.
class Jet2 {
public:
  static constexpr std::size_t kDim = 3;

  constexpr Jet2() = default;
  constexpr Jet2(double value) : value_(value) {}  // NOLINT: implicit constants

  static Jet2 seed(const std::array<double, 3>& point, std::size_t axis) {
    Jet2 j(point[axis]);
    j.grad_[axis] = 1.0;
    return j;
  }

  double value() const { return value_; }
  double grad(std::size_t i) const { return grad_[i]; }
  const std::array<double, 3>& grad() const { return grad_; }
  double hess(std::size_t i, std::size_t j) const { return hess_[index(i, j)]; }

  void set_grad(std::size_t i, double v) { grad_[i] = v; }
  void set_hess(std::size_t i, std::size_t j, double v) { hess_[index(i, j)] = v; }

  /// f(this) given f, f', f'' at value().
  Jet2 chain(double f0, double f1, double f2) const {
    Jet2 r(f0);
    for (std::size_t i = 0; i < kDim; ++i) r.grad_[i] = f1 * grad_[i];
    for (std::size_t i = 0; i < kDim; ++i)
      for (std::size_t j = i; j < kDim; ++j)
        r.hess_[index(i, j)] = f1 * hess_[index(i, j)] + f2 * grad_[i] * grad_[j];
    return r;
  }

  Jet2 operator-() const {
    Jet2 r(-value_);
    for (std::size_t i = 0; i < kDim; ++i) r.grad_[i] = -grad_[i];
    for (std::size_t k = 0; k < hess_.size(); ++k) r.hess_[k] = -hess_[k];
    return r;
  }

  Jet2& operator+=(const Jet2& o) {
    value_ += o.value_;
    for (std::size_t i = 0; i < kDim; ++i) grad_[i] += o.grad_[i];
    for (std::size_t k = 0; k < hess_.size(); ++k) hess_[k] += o.hess_[k];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) { return *this += -o; }

  Jet2& operator*=(const Jet2& o) {
    Jet2 r(value_ * o.value_);
    for (std::size_t i = 0; i < kDim; ++i) r.grad_[i] = grad_[i] * o.value_ + value_ * o.grad_[i];
    for (std::size_t i = 0; i < kDim; ++i)
      for (std::size_t j = i; j < kDim; ++j) {
        const std::size_t k = index(i, j);
        r.hess_[k] = hess_[k] * o.value_ + value_ * o.hess_[k] + grad_[i] * o.grad_[j] +
                     grad_[j] * o.grad_[i];
      }
    return *this = r;
  }

  /// Caller guarantees o.value() != 0.
  Jet2& operator/=(const Jet2& o) {
    const double v = o.value_;
    return *this *= o.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
  }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(Jet2 a, const Jet2& b) { return a *= b; }
  friend Jet2 operator/(Jet2 a, const Jet2& b) { return a /= b; }

private:
  static constexpr std::size_t index(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    // row-major upper triangle of a 3x3
    return i * kDim - i * (i + 1) / 2 + j;
  }

  double value_ = 0.0;
  std::array<double, 3> grad_{};
  std::array<double, 6> hess_{};
};

inline double value_of(double x) { return x; }
inline double value_of(const Jet2& x) { return x.value(); }

// Elementary functions. Domain checks live in the expression evaluator.
inline Jet2 sin(const Jet2& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  return x.chain(s, c, -s);
}
inline Jet2 cos(const Jet2& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  return x.chain(c, -s, -c);
}
inline Jet2 tan(const Jet2& x) {
  const double t = std::tan(x.value()), sec2 = 1.0 + t * t;
  return x.chain(t, sec2, 2.0 * t * sec2);
}
inline Jet2 sinh(const Jet2& x) {
  const double s = std::sinh(x.value()), c = std::cosh(x.value());
  return x.chain(s, c, s);
}
inline Jet2 cosh(const Jet2& x) {
  const double s = std::sinh(x.value()), c = std::cosh(x.value());
  return x.chain(c, s, c);
}
inline Jet2 tanh(const Jet2& x) {
  const double t = std::tanh(x.value()), sech2 = 1.0 - t * t;
  return x.chain(t, sech2, -2.0 * t * sech2);
}
inline Jet2 exp(const Jet2& x) {
  const double e = std::exp(x.value());
  return x.chain(e, e, e);
}
inline Jet2 log(const Jet2& x) {
  const double v = x.value();
  return x.chain(std::log(v), 1.0 / v, -1.0 / (v * v));
}
inline Jet2 sqrt(const Jet2& x) {
  const double r = std::sqrt(x.value());
  return x.chain(r, 0.5 / r, -0.25 / (r * x.value()));
}
/// x^p for a constant exponent.
inline Jet2 pow(const Jet2& x, double p) {
  const double v = x.value();
  if (p == 0.0) return Jet2(1.0);
  return x.chain(std::pow(v, p), p * std::pow(v, p - 1.0), p * (p - 1.0) * std::pow(v, p - 2.0));
}
/// x^n by repeated multiplication; exact for negative x.
inline Jet2 ipow(const Jet2& x, long n) {
  if (n < 0) return Jet2(1.0) / ipow(x, -n);
  Jet2 result(1.0), base = x;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}
inline double ipow(double x, long n) {
  if (n < 0) return 1.0 / ipow(x, -n);
  double result = 1.0, base = x;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

}  // namespace npgeo
