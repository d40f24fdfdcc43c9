#pragma once

// Shared generators and independent oracles for the unit tests.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "routhe/linalg.hpp"

namespace testing_support {

using routhe::Matrix;
using routhe::Vec;

/// Deterministic generator of points, boxes and group elements.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vec point(std::size_t n, double lo = -1.0, double hi = 1.0) {
    Vec v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  /// A point near `q`, at most `spread` away in every coordinate.
  Vec near(const Vec& q, double spread) {
    Vec v = q;
    for (auto& x : v) x += uniform(-spread, spread);
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

/// Central difference of a scalar function of one vector.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

/// Central-difference Jacobian J(i, j) = ∂F_i/∂x_j.
inline Matrix fd_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& x, double h = 1e-6) {
  const std::size_t m = F(x).size();
  Matrix J(m, x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    Vec a = x, b = x;
    a[j] += h;
    b[j] -= h;
    const Vec fa = F(a), fb = F(b);
    for (std::size_t i = 0; i < m; ++i) J(i, j) = (fa[i] - fb[i]) / (2 * h);
  }
  return J;
}

inline Vec concat(const Vec& a, const Vec& b) {
  Vec out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline Vec head(const Vec& z, std::size_t n) { return Vec(z.begin(), z.begin() + static_cast<long>(n)); }
inline Vec tail(const Vec& z, std::size_t n) { return Vec(z.end() - static_cast<long>(n), z.end()); }

/// ‖M + Mᵀ‖max
inline double antisymmetry(const Matrix& m) { return (m + m.transpose()).max_abs(); }

}  // namespace testing_support
