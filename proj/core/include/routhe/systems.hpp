#pragma once

// Concrete discrete systems used by the tools, tests and benchmarks.

#include <cstddef>

#include "routhe/fdms.hpp"

namespace routhe::systems {

/// m (q1 − q0)² / (2h) in every coordinate.
DiscreteSystem free_particle(double m, double h, std::size_t n = 1);

struct BarParams {
  double m = 1.0;
  double inertia = 1.0;
  double h = 0.2;
};

/// Planar bar on S¹ x ℝ², coordinates (φ, x, y):
/// m/(2h)[(x1−x0)² + (y1−y0)²] + J/(2h)(φ1−φ0)².
DiscreteSystem bar(const BarParams& p = {});

/// Reduced bar on (φ, y) in closed form, with force −μ₂ν dy0 + μ₂ν dy1.
DiscreteSystem bar_reduced_closed_form(const BarParams& p, double mu2, double nu);

struct CentralParams {
  double alpha = 0.1;
  double beta = 2.0;
  double m = 1.0;
  double h = 0.2;
  double mu = -0.114;
};

/// V(r) = α r² (r² − β)².
template <class T>
T sextic_potential(const T& r, double alpha, double beta) {
  const T r2 = r * r;
  const T w = r2 - beta;
  return alpha * r2 * w * w;
}

/// Midpoint discrete Lagrangian of a particle in the plane with potential V,
/// in polar coordinates (r, η).
DiscreteSystem central_midpoint(const CentralParams& p = {});

/// Closed-form reduced midpoint system on r > 0 with its centrifugal force.
DiscreteSystem central_reduced_closed_form(const CentralParams& p = {});

/// γ(r0, r1) = −4hμ² / (m (r0 + r1)²); the reduced force is its differential.
ScalarField2 central_reduced_potential(const CentralParams& p = {});

/// Reduced midpoint Lagrangian with γ added and no force.
DiscreteSystem central_reduced_absorbed(const CentralParams& p = {});

/// Euclidean kinetic Lagrangian ‖q1 − q0‖²/(2h) on ℝ² with the Routh force
/// f⁻ = α(q0), f⁺ = −α(q1), α = c(−y dx + x dy).
DiscreteSystem synthetic_routh_plane(double c = 0.3, double h = 0.1);

/// Same construction on ℝ³ with a nonlinear α, so β = dα is not constant,
/// plus the exact force dγ, γ = 0.1 sin(q0·q1), which couples the two slots.
DiscreteSystem synthetic_routh_space(double c = 0.3, double h = 0.1);

/// ‖q1 − q0‖²/(2h) on ℝ² with the friction-like force f⁺ = −κ(q1 − q0) dq1.
DiscreteSystem dissipative_plane(double kappa = 0.5, double h = 0.1);

/// L = q0·q0 (no coupling between the two factors).
DiscreteSystem degenerate(std::size_t n = 1);

/// L = (q1 − q0)³ / (3h) on ℝ; the coupling vanishes on the diagonal.
DiscreteSystem cubic(double h = 0.2);

/// ‖q1 − q0‖²/(2h) − h W(x, y) on ℝ³ (x, y, z); invariant under z shifts.
DiscreteSystem cyclic_space(double m = 1.0, double h = 0.1);

}  // namespace routhe::systems
