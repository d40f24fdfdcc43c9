#pragma once

// Type-erased fields on Q x Q (and on Q) that can be evaluated on the whole
// scalar tower double, D1, D2, D3. A field is built once from a generic
// callable:
//
//   ScalarField2 L([](const auto& q0, const auto& q1) { ... });
//
// where q0, q1 are std::vector<T> and the result is T (or std::vector<T>).

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "routhe/dual.hpp"

namespace routhe {

template <class T> using Point = std::vector<T>;

/// True when Dual<T> is still evaluable by the type-erased fields.
template <class T> inline constexpr bool has_headroom_v = dual_depth_v<T> < 3;

/// Derived fields that differentiate their ingredients cannot be evaluated
/// at the top of the tower.
[[noreturn]] void throw_tower_exhausted(const char* who);

class ScalarField2 {
 public:
  ScalarField2() = default;

  template <class F>
    requires(!std::is_same_v<std::decay_t<F>, ScalarField2>)
  ScalarField2(F f)  // NOLINT(google-explicit-constructor)
      : f0_([f](const Point<double>& a, const Point<double>& b) -> double { return f(a, b); }),
        f1_([f](const Point<D1>& a, const Point<D1>& b) -> D1 { return f(a, b); }),
        f2_([f](const Point<D2>& a, const Point<D2>& b) -> D2 { return f(a, b); }),
        f3_([f](const Point<D3>& a, const Point<D3>& b) -> D3 { return f(a, b); }) {}

  explicit operator bool() const { return static_cast<bool>(f0_); }

  template <class T>
  T operator()(const Point<T>& q0, const Point<T>& q1) const {
    if constexpr (std::is_same_v<T, double>) return f0_(q0, q1);
    else if constexpr (std::is_same_v<T, D1>) return f1_(q0, q1);
    else if constexpr (std::is_same_v<T, D2>) return f2_(q0, q1);
    else {
      static_assert(std::is_same_v<T, D3>, "scalar tower stops at D3");
      return f3_(q0, q1);
    }
  }

 private:
  std::function<double(const Point<double>&, const Point<double>&)> f0_;
  std::function<D1(const Point<D1>&, const Point<D1>&)> f1_;
  std::function<D2(const Point<D2>&, const Point<D2>&)> f2_;
  std::function<D3(const Point<D3>&, const Point<D3>&)> f3_;
};

/// Covector-valued field on Q x Q. Which factor the covector lives on is a
/// property of how the field is used (f⁻ at q0, f⁺ at q1).
class CovectorField2 {
 public:
  CovectorField2() = default;

  template <class F>
    requires(!std::is_same_v<std::decay_t<F>, CovectorField2>)
  CovectorField2(F f)  // NOLINT(google-explicit-constructor)
      : f0_([f](const Point<double>& a, const Point<double>& b) -> Point<double> { return f(a, b); }),
        f1_([f](const Point<D1>& a, const Point<D1>& b) -> Point<D1> { return f(a, b); }),
        f2_([f](const Point<D2>& a, const Point<D2>& b) -> Point<D2> { return f(a, b); }),
        f3_([f](const Point<D3>& a, const Point<D3>& b) -> Point<D3> { return f(a, b); }) {}

  /// Identically zero field of dimension n.
  static CovectorField2 zero(std::size_t n);

  explicit operator bool() const { return static_cast<bool>(f0_); }

  template <class T>
  Point<T> operator()(const Point<T>& q0, const Point<T>& q1) const {
    if constexpr (std::is_same_v<T, double>) return f0_(q0, q1);
    else if constexpr (std::is_same_v<T, D1>) return f1_(q0, q1);
    else if constexpr (std::is_same_v<T, D2>) return f2_(q0, q1);
    else {
      static_assert(std::is_same_v<T, D3>, "scalar tower stops at D3");
      return f3_(q0, q1);
    }
  }

 private:
  std::function<Point<double>(const Point<double>&, const Point<double>&)> f0_;
  std::function<Point<D1>(const Point<D1>&, const Point<D1>&)> f1_;
  std::function<Point<D2>(const Point<D2>&, const Point<D2>&)> f2_;
  std::function<Point<D3>(const Point<D3>&, const Point<D3>&)> f3_;
};

/// Covector field on Q (a 1-form): connection forms, Routh potentials.
class CovectorField1 {
 public:
  CovectorField1() = default;

  template <class F>
    requires(!std::is_same_v<std::decay_t<F>, CovectorField1>)
  CovectorField1(F f)  // NOLINT(google-explicit-constructor)
      : f0_([f](const Point<double>& a) -> Point<double> { return f(a); }),
        f1_([f](const Point<D1>& a) -> Point<D1> { return f(a); }),
        f2_([f](const Point<D2>& a) -> Point<D2> { return f(a); }),
        f3_([f](const Point<D3>& a) -> Point<D3> { return f(a); }) {}

  explicit operator bool() const { return static_cast<bool>(f0_); }

  template <class T>
  Point<T> operator()(const Point<T>& q) const {
    if constexpr (std::is_same_v<T, double>) return f0_(q);
    else if constexpr (std::is_same_v<T, D1>) return f1_(q);
    else if constexpr (std::is_same_v<T, D2>) return f2_(q);
    else {
      static_assert(std::is_same_v<T, D3>, "scalar tower stops at D3");
      return f3_(q);
    }
  }

 private:
  std::function<Point<double>(const Point<double>&)> f0_;
  std::function<Point<D1>(const Point<D1>&)> f1_;
  std::function<Point<D2>(const Point<D2>&)> f2_;
  std::function<Point<D3>(const Point<D3>&)> f3_;
};

inline CovectorField2 CovectorField2::zero(std::size_t n) {
  return CovectorField2([n](const auto& q0, const auto&) {
    using T = typename std::decay_t<decltype(q0)>::value_type;
    return Point<T>(n, T(0.0));
  });
}

/// Convert a real point into any scalar of the tower (zero tangents).
template <class T>
Point<T> promote(const Point<double>& q) {
  Point<T> out;
  out.reserve(q.size());
  for (double x : q) out.emplace_back(x);
  return out;
}

/// Raise every entry of a T-point into Dual<T> with zero tangent.
template <class T>
Point<Dual<T>> raise(const Point<T>& q) {
  Point<Dual<T>> out;
  out.reserve(q.size());
  for (const T& x : q) out.push_back(Dual<T>(x, T(0.0)));
  return out;
}

inline Point<double> values(const Point<double>& q) { return q; }
template <class T>
Point<double> values(const Point<T>& q) {
  Point<double> out;
  out.reserve(q.size());
  for (const auto& x : q) out.push_back(value_of(x));
  return out;
}

}  // namespace routhe
