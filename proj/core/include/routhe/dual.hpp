#pragma once

// Forward-mode dual numbers, nestable: Dual<Dual<double>> carries mixed
// second derivatives, Dual<Dual<Dual<double>>> third derivatives.
//
//   (a + b ε)(c + d ε) = ac + (ad + bc) ε,   ε² = 0
//
// Every discrete Lagrangian and force in the library is written once as a
// generic callable and instantiated on double, D1, D2 and D3.

#include <cmath>
#include <cstddef>
#include <ostream>
#include <type_traits>

namespace routhe {

template <class T>
struct Dual {
  T v{};  // value
  T d{};  // tangent

  constexpr Dual() = default;
  constexpr Dual(double x) : v(x), d(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(T value, T tangent) : v(value), d(tangent) {}
  constexpr explicit Dual(const T& value)
    requires(!std::is_same_v<T, double>)
      : v(value), d(0.0) {}

  constexpr Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  constexpr Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  constexpr Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  constexpr Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }
};

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

template <class T> struct dual_depth : std::integral_constant<int, 0> {};
template <class T> struct dual_depth<Dual<T>> : std::integral_constant<int, 1 + dual_depth<T>::value> {};
template <class T> inline constexpr int dual_depth_v = dual_depth<T>::value;

template <class T> struct is_dual : std::false_type {};
template <class T> struct is_dual<Dual<T>> : std::true_type {};

/// Innermost real value.
constexpr double value_of(double x) { return x; }
template <class T> constexpr double value_of(const Dual<T>& x) { return value_of(x.v); }

// -- arithmetic -------------------------------------------------------------

template <class T> constexpr Dual<T> operator+(const Dual<T>& a) { return a; }
template <class T> constexpr Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }

template <class T> constexpr Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> constexpr Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> constexpr Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <class T> constexpr Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T inv = T(1.0) / b.v;
  return {a.v * inv, (a.d - a.v * inv * b.d) * inv};
}

template <class T> constexpr Dual<T> operator+(const Dual<T>& a, double b) { return {a.v + b, a.d}; }
template <class T> constexpr Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.v, b.d}; }
template <class T> constexpr Dual<T> operator-(const Dual<T>& a, double b) { return {a.v - b, a.d}; }
template <class T> constexpr Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T> constexpr Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * b, a.d * b}; }
template <class T> constexpr Dual<T> operator*(double a, const Dual<T>& b) { return {a * b.v, a * b.d}; }
template <class T> constexpr Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / b, a.d / b}; }
template <class T> constexpr Dual<T> operator/(double a, const Dual<T>& b) { return Dual<T>(a) / b; }

// Comparisons look at the real value only; branches are taken on values.
template <class T> constexpr bool operator<(const Dual<T>& a, const Dual<T>& b) { return value_of(a) < value_of(b); }
template <class T> constexpr bool operator>(const Dual<T>& a, const Dual<T>& b) { return value_of(a) > value_of(b); }
template <class T> constexpr bool operator<(const Dual<T>& a, double b) { return value_of(a) < b; }
template <class T> constexpr bool operator>(const Dual<T>& a, double b) { return value_of(a) > b; }
template <class T> constexpr bool operator<=(const Dual<T>& a, double b) { return value_of(a) <= b; }
template <class T> constexpr bool operator>=(const Dual<T>& a, double b) { return value_of(a) >= b; }

template <class T>
std::ostream& operator<<(std::ostream& os, const Dual<T>& x) {
  return os << '(' << x.v << " + " << x.d << "ε)";
}

// -- elementary functions -----------------------------------------------------

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

template <class T> Dual<T> sin(const Dual<T>& a) { return {sin(a.v), a.d * cos(a.v)}; }
template <class T> Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -(a.d * sin(a.v))}; }
template <class T> Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, a.d * e};
}
template <class T> Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }
template <class T> Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}

/// Integer power by repeated squaring; works for any scalar in the tower.
template <class T>
constexpr T ipow(T x, int n) {
  if (n < 0) return T(1.0) / ipow(x, -n);
  T result(1.0);
  while (n > 0) {
    if (n & 1) result = result * x;
    x = x * x;
    n >>= 1;
  }
  return result;
}

/// Promote a real seed into the first tangent slot of Dual<T>.
template <class T>
constexpr Dual<T> seed(const T& value, double tangent) {
  return Dual<T>(value, T(tangent));
}

}  // namespace routhe
