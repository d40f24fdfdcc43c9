#include "routhe/reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "routhe/errors.hpp"

namespace routhe {

ContinuousReducedSystem ContinuousReducedSystem::sextic(double alpha, double beta, double m, double mu) {
  ContinuousReducedSystem s;
  s.m = m;
  s.mu = mu;
  s.potential = [alpha, beta](double r) {
    const double w = r * r - beta;
    return alpha * r * r * w * w;
  };
  // d/dr α r²(r² − β)² = 2α r (r² − β)(3r² − β)
  s.potential_derivative = [alpha, beta](double r) { return 2.0 * alpha * r * (r * r - beta) * (3.0 * r * r - beta); };
  return s;
}

ContinuousReducedSystem ContinuousReducedSystem::harmonic(double m, double mu) {
  ContinuousReducedSystem s;
  s.m = m;
  s.mu = mu;
  s.potential = [](double r) { return 0.5 * r * r; };
  s.potential_derivative = [](double r) { return r; };
  return s;
}

double ContinuousReducedSystem::routhian(double r, double rdot) const {
  return 0.5 * m * rdot * rdot - potential(r) - mu * mu / (2.0 * m * r * r);
}

double ContinuousReducedSystem::energy(double r, double rdot) const {
  return 0.5 * m * rdot * rdot + potential(r) + mu * mu / (2.0 * m * r * r);
}

double ContinuousReducedSystem::acceleration(double r) const {
  if (!(r > 0.0)) throw DomainError("reduced dynamics: r = " + std::to_string(r) + " is outside r > 0");
  return mu * mu / (m * m * r * r * r) - potential_derivative(r) / m;
}

Vec ContinuousReducedSystem::rhs(const Vec& s) const { return {s[1], acceleration(s[0])}; }

Vec ContinuousReducedSystem::rhs_with_angle(const Vec& s) const {
  return {s[1], acceleration(s[0]), mu / (m * s[0] * s[0])};
}

Vec rk4_step(const OdeRhs& f, double t, const Vec& y, double h) {
  const Vec k1 = f(t, y);
  const Vec k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
  const Vec k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
  const Vec k4 = f(t + h, y + h * k3);
  Vec out = y;
  for (std::size_t i = 0; i < y.size(); ++i) out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

std::vector<Vec> rk4_solve(const OdeRhs& f, double t0, const Vec& y0, double h, std::size_t n_steps) {
  std::vector<Vec> out;
  out.reserve(n_steps + 1);
  out.push_back(y0);
  for (std::size_t k = 0; k < n_steps; ++k)
    out.push_back(rk4_step(f, t0 + static_cast<double>(k) * h, out.back(), h));
  return out;
}

Vec DenseTrajectory::operator()(double t) const {
  if (t_.empty()) throw Error("dense output: empty trajectory");
  if (t <= t_.front()) return y_.front();
  if (t >= t_.back()) return y_.back();
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - t_.begin()) - 1;
  const double h = t_[j + 1] - t_[j];
  const double s = (t - t_[j]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  Vec out(y_[j].size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = h00 * y_[j][i] + h10 * h * dy_[j][i] + h01 * y_[j + 1][i] + h11 * h * dy_[j + 1][i];
  return out;
}

namespace {

// Dormand–Prince 5(4)
constexpr std::array<double, 7> c{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr std::array<double, 7> b{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> e{71.0 / 57600,      0.0,         -71.0 / 16695, 71.0 / 1920,
                                  -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
  Vec out = y;
  for (const auto& [w, k] : terms)
    if (w != 0.0)
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * w * (*k)[i];
  return out;
}

}  // namespace

DenseTrajectory adaptive_solve(const OdeRhs& f, const Vec& y0, double t0, double t1, const AdaptiveOptions& opt) {
  if (t1 < t0) throw ConfigError("adaptive solver: t_end precedes t_start");
  std::vector<double> ts{t0};
  std::vector<Vec> ys{y0};
  Vec k1 = f(t0, y0);
  std::vector<Vec> dys{k1};
  std::size_t rejected = 0;

  const auto scaled_norm = [&](const Vec& v, const Vec& ya, const Vec& yb) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double sc = opt.atol + opt.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      acc = std::max(acc, std::abs(v[i] / sc));
    }
    return acc;
  };

  double h = opt.initial_step;
  if (h <= 0.0) {
    const double d0 = scaled_norm(y0, y0, y0), d1 = scaled_norm(k1, y0, y0);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  }

  double t = t0;
  Vec y = y0;
  std::size_t steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps) throw StepUnderflow("adaptive solver: step budget exhausted at t = " + std::to_string(t));
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < h_min) throw StepUnderflow("adaptive solver: step size underflow at t = " + std::to_string(t));
    const bool last = t + h >= t1;
    if (last) h = t1 - t;

    const Vec k2 = f(t + c[1] * h, axpy(y, h, {{a21, &k1}}));
    const Vec k3 = f(t + c[2] * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const Vec k4 = f(t + c[3] * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec k5 = f(t + c[4] * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec k6 = f(t + c[5] * h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Vec y_new = axpy(y, h, {{b[0], &k1}, {b[2], &k3}, {b[3], &k4}, {b[4], &k5}, {b[5], &k6}});
    const Vec k7 = f(t + h, y_new);
    const Vec err = axpy(Vec(y.size(), 0.0), h,
                         {{e[0], &k1}, {e[2], &k3}, {e[3], &k4}, {e[4], &k5}, {e[5], &k6}, {e[6], &k7}});
    const double en = scaled_norm(err, y, y_new);
    if (!std::isfinite(en)) {
      ++rejected;
      h *= 0.2;
      continue;
    }
    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    if (en <= 1.0) {
      t = last ? t1 : t + h;
      y = y_new;
      k1 = k7;
      ts.push_back(t);
      ys.push_back(y);
      dys.push_back(k7);
      h *= factor;
    } else {
      ++rejected;
      h *= std::min(1.0, factor);
    }
  }
  DenseTrajectory out(std::move(ts), std::move(ys), std::move(dys));
  out.rejected_steps = rejected;
  return out;
}

}  // namespace routhe
