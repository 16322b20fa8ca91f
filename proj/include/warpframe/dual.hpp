#pragma once

// Forward-mode dual numbers with a single derivative direction.
// Nesting (Dual<Dual<double>>) gives higher derivatives.

#include <cmath>
#include <type_traits>

namespace warpframe {

template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(double x) : v(x), d(0.0) {}  // NOLINT: implicit on purpose
  constexpr Dual(const T& value, const T& deriv) requires(!std::is_same_v<T, double>)
      : v(value), d(deriv) {}
  constexpr Dual(double value, double deriv) requires std::is_same_v<T, double>
      : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T inv = T(1.0) / b.v;
    return {a.v * inv, (a.d - a.v * inv * b.d) * inv};
  }
  friend Dual operator+(const Dual& a, double b) { return {a.v + b, a.d}; }
  friend Dual operator+(double a, const Dual& b) { return {a + b.v, b.d}; }
  friend Dual operator-(const Dual& a, double b) { return {a.v - b, a.d}; }
  friend Dual operator-(double a, const Dual& b) { return {a - b.v, -b.d}; }
  friend Dual operator*(const Dual& a, double b) { return {a.v * b, a.d * b}; }
  friend Dual operator*(double a, const Dual& b) { return {a * b.v, a * b.d}; }
  friend Dual operator/(const Dual& a, double b) { return {a.v / b, a.d / b}; }
  friend Dual operator/(double a, const Dual& b) { return Dual(a) / b; }

  friend Dual sqrt(const Dual& a) {
    using std::sqrt;
    T r = sqrt(a.v);
    return {r, a.d / (2.0 * r)};
  }
  friend Dual exp(const Dual& a) {
    using std::exp;
    T e = exp(a.v);
    return {e, e * a.d};
  }
  friend Dual cos(const Dual& a) {
    using std::cos;
    using std::sin;
    return {cos(a.v), -sin(a.v) * a.d};
  }
  friend Dual sin(const Dual& a) {
    using std::cos;
    using std::sin;
    return {sin(a.v), cos(a.v) * a.d};
  }
  friend Dual cosh(const Dual& a) {
    using std::cosh;
    using std::sinh;
    return {cosh(a.v), sinh(a.v) * a.d};
  }
  friend Dual sinh(const Dual& a) {
    using std::cosh;
    using std::sinh;
    return {sinh(a.v), cosh(a.v) * a.d};
  }
};

inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) { return primal(x.v); }

}  // namespace warpframe
