#pragma once

#include <cmath>

#include <Eigen/Core>

namespace tmc {

/// Second-order forward-mode dual number over N independent variables:
/// carries value, gradient and full (symmetric) Hessian. Arithmetic follows
/// the chain rule exactly, so Hessians stay symmetric to the last bit.
template <int N>
struct Dual2 {
  double val = 0.0;
  Eigen::Matrix<double, N, 1> grad = Eigen::Matrix<double, N, 1>::Zero();
  Eigen::Matrix<double, N, N> hess = Eigen::Matrix<double, N, N>::Zero();

  Dual2() = default;
  Dual2(double v) : val(v) {}  // NOLINT: implicit constant lift

  static Dual2 variable(double v, int index) {
    Dual2 d(v);
    d.grad(index) = 1.0;
    return d;
  }
};

template <int N>
Dual2<N> operator+(const Dual2<N>& a, const Dual2<N>& b) {
  Dual2<N> r(a.val + b.val);
  r.grad = a.grad + b.grad;
  r.hess = a.hess + b.hess;
  return r;
}

template <int N>
Dual2<N> operator-(const Dual2<N>& a, const Dual2<N>& b) {
  Dual2<N> r(a.val - b.val);
  r.grad = a.grad - b.grad;
  r.hess = a.hess - b.hess;
  return r;
}

template <int N>
Dual2<N> operator-(const Dual2<N>& a) {
  Dual2<N> r(-a.val);
  r.grad = -a.grad;
  r.hess = -a.hess;
  return r;
}

template <int N>
Dual2<N> operator*(const Dual2<N>& a, const Dual2<N>& b) {
  Dual2<N> r(a.val * b.val);
  r.grad = a.grad * b.val + b.grad * a.val;
  // The outer product is materialized so o + o^T is added entrywise as the
  // same two values on both triangles; FP-contraction then cannot break the
  // bitwise symmetry of the Hessian.
  const Eigen::Matrix<double, N, N> outer = a.grad * b.grad.transpose();
  r.hess = a.hess * b.val + b.hess * a.val;
  r.hess += outer + outer.transpose();
  return r;
}

/// f(a) with f, f', f'' evaluated at a.val. The outer product is
/// materialized first; folding the scalar into one factor would break the
/// bitwise symmetry of the Hessian.
template <int N>
Dual2<N> apply_unary(const Dual2<N>& a, double f, double df, double ddf) {
  Dual2<N> r(f);
  r.grad = df * a.grad;
  const Eigen::Matrix<double, N, N> outer = a.grad * a.grad.transpose();
  r.hess = df * a.hess + ddf * outer;
  return r;
}

template <int N>
Dual2<N> inverse(const Dual2<N>& a) {
  const double inv = 1.0 / a.val;
  return apply_unary(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

template <int N>
Dual2<N> operator/(const Dual2<N>& a, const Dual2<N>& b) {
  return a * inverse(b);
}

template <int N>
Dual2<N> operator+(const Dual2<N>& a, double b) { return a + Dual2<N>(b); }
template <int N>
Dual2<N> operator+(double a, const Dual2<N>& b) { return Dual2<N>(a) + b; }
template <int N>
Dual2<N> operator-(const Dual2<N>& a, double b) { return a - Dual2<N>(b); }
template <int N>
Dual2<N> operator-(double a, const Dual2<N>& b) { return Dual2<N>(a) - b; }

template <int N>
Dual2<N> operator*(const Dual2<N>& a, double b) {
  Dual2<N> r(a.val * b);
  r.grad = a.grad * b;
  r.hess = a.hess * b;
  return r;
}
template <int N>
Dual2<N> operator*(double a, const Dual2<N>& b) { return b * a; }
template <int N>
Dual2<N> operator/(const Dual2<N>& a, double b) { return a * (1.0 / b); }
template <int N>
Dual2<N> operator/(double a, const Dual2<N>& b) { return inverse(b) * a; }

template <int N>
Dual2<N> log(const Dual2<N>& a) {
  return apply_unary(a, std::log(a.val), 1.0 / a.val, -1.0 / (a.val * a.val));
}

template <int N>
Dual2<N> exp(const Dual2<N>& a) {
  const double e = std::exp(a.val);
  return apply_unary(a, e, e, e);
}

template <int N>
Dual2<N> sqrt(const Dual2<N>& a) {
  const double s = std::sqrt(a.val);
  return apply_unary(a, s, 0.5 / s, -0.25 / (s * a.val));
}

template <int N>
Dual2<N> atan(const Dual2<N>& a) {
  const double d = 1.0 + a.val * a.val;
  return apply_unary(a, std::atan(a.val), 1.0 / d, -2.0 * a.val / (d * d));
}

/// a^e for real exponent, a > 0.
template <int N>
Dual2<N> pow(const Dual2<N>& a, double e) {
  const double p = std::pow(a.val, e);
  return apply_unary(a, p, e * p / a.val, e * (e - 1.0) * p / (a.val * a.val));
}

}  // namespace tmc
