#pragma once

// Continuous references for the reduced central-potential problem: the
// Euler–Lagrange right-hand side, classical RK4, and an adaptive
// Dormand–Prince 5(4) solver with Hermite dense output.

#include <cstddef>
#include <functional>
#include <vector>

#include "routhe/linalg.hpp"

namespace routhe {

struct ContinuousReducedSystem {
  double m = 1.0;
  double mu = 0.0;
  std::function<double(double)> potential;
  std::function<double(double)> potential_derivative;

  /// V(r) = α r² (r² − β)²
  static ContinuousReducedSystem sextic(double alpha, double beta, double m, double mu);
  static ContinuousReducedSystem harmonic(double m, double mu);

  /// m/2 ṙ² − V(r) − μ²/(2 m r²)
  double routhian(double r, double rdot) const;
  /// m/2 ṙ² + V(r) + μ²/(2 m r²)
  double energy(double r, double rdot) const;
  /// μ²/(m² r³) − V'(r)/m
  double acceleration(double r) const;

  /// (r, ṙ) ↦ (ṙ, r̈)
  Vec rhs(const Vec& state) const;
  /// (r, ṙ, η) ↦ (ṙ, r̈, μ/(m r²)): the full planar motion in polar form.
  Vec rhs_with_angle(const Vec& state) const;
};

using OdeRhs = std::function<Vec(double t, const Vec& y)>;

Vec rk4_step(const OdeRhs& f, double t, const Vec& y, double h);
/// N steps of size h from (t0, y0); returns N + 1 states.
std::vector<Vec> rk4_solve(const OdeRhs& f, double t0, const Vec& y0, double h, std::size_t n_steps);

struct AdaptiveOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 picks one from the local scale
  std::size_t max_steps = 10'000'000;
};

/// Accepted steps of an adaptive run, with cubic Hermite interpolation.
class DenseTrajectory {
 public:
  DenseTrajectory() = default;
  DenseTrajectory(std::vector<double> t, std::vector<Vec> y, std::vector<Vec> dy)
      : t_(std::move(t)), y_(std::move(y)), dy_(std::move(dy)) {}

  Vec operator()(double t) const;
  const std::vector<double>& times() const { return t_; }
  const std::vector<Vec>& states() const { return y_; }
  const Vec& back() const { return y_.back(); }
  std::size_t accepted_steps() const { return t_.empty() ? 0 : t_.size() - 1; }
  std::size_t rejected_steps = 0;

 private:
  std::vector<double> t_;
  std::vector<Vec> y_;
  std::vector<Vec> dy_;
};

/// Throws StepUnderflow when the step size collapses below rounding level.
DenseTrajectory adaptive_solve(const OdeRhs& f, const Vec& y0, double t0, double t1,
                               const AdaptiveOptions& opt = {});

}  // namespace routhe
