#pragma once

#include <cmath>

namespace tmc {

/// Truncated Taylor scalar carrying two first-order perturbation directions
/// and their mixed second-order term: v + d1*e1 + d2*e2 + d12*e1*e2 with
/// e1^2 = e2^2 = 0. Propagating an energy through this type yields one
/// gradient pair and one Hessian entry per evaluation.
struct Dual2 {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d12 = 0.0;

  Dual2() = default;
  Dual2(double value) : v(value) {}  // NOLINT: implicit from constants
  Dual2(double value, double g1, double g2, double g12) : v(value), d1(g1), d2(g2), d12(g12) {}
};

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
}
inline Dual2 operator-(const Dual2& a, const Dual2& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
}
inline Dual2 operator-(const Dual2& a) { return {-a.v, -a.d1, -a.d2, -a.d12}; }

inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  return {a.v * b.v,
          a.v * b.d1 + a.d1 * b.v,
          a.v * b.d2 + a.d2 * b.v,
          a.v * b.d12 + a.d12 * b.v + a.d1 * b.d2 + a.d2 * b.d1};
}

inline Dual2 operator/(const Dual2& a, const Dual2& b) {
  const double inv = 1.0 / b.v;
  const double inv2 = inv * inv;
  // a * b^-1 with b^-1 expanded to second order.
  const Dual2 binv{inv, -b.d1 * inv2, -b.d2 * inv2,
                   -b.d12 * inv2 + 2.0 * b.d1 * b.d2 * inv2 * inv};
  return a * binv;
}

inline Dual2& operator+=(Dual2& a, const Dual2& b) { return a = a + b; }
inline Dual2& operator-=(Dual2& a, const Dual2& b) { return a = a - b; }
inline Dual2& operator*=(Dual2& a, const Dual2& b) { return a = a * b; }

inline Dual2 log(const Dual2& x) {
  const double inv = 1.0 / x.v;
  return {std::log(x.v), x.d1 * inv, x.d2 * inv, x.d12 * inv - x.d1 * x.d2 * inv * inv};
}

inline Dual2 pow(const Dual2& x, double p) {
  const double f = std::pow(x.v, p);
  const double fp = p * std::pow(x.v, p - 1.0);
  const double fpp = p * (p - 1.0) * std::pow(x.v, p - 2.0);
  return {f, fp * x.d1, fp * x.d2, fp * x.d12 + fpp * x.d1 * x.d2};
}

}  // namespace tmc
