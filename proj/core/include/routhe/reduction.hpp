#pragma once

// Discrete Routh reduction by a one-parameter translation group G_μ.
//
// Quotient coordinates are the coordinates of Q with the shifted axis
// removed; the representative of τ has 0 (or a chosen offset) on that axis.
// The reduced Lagrangian is L_d restricted to the horizontal manifold
// J_μ⁻¹(μ), and the reduced force is ⟨μ, T𝒜_μ⟩ along horizontal lifts.

#include <cstddef>
#include <functional>
#include <utility>

#include "routhe/fdms.hpp"
#include "routhe/forms.hpp"
#include "routhe/symmetry.hpp"
#include "routhe/systems.hpp"

namespace routhe {

struct ReductionOptions {
  /// Group coordinate of the representative lift_base(τ).
  double representative = 0.0;
  /// Tolerance of the vertical-contraction test in beta_mu.
  double basic_tol = 1e-6;
};

struct ReducedSystem {
  DiscreteSystem reduced;
  /// Routh potential of the reduced force, as a field on Q/G_μ.
  TwoFormField beta_mu;
  std::function<Vec(const Vec& tau)> lift_base;
  /// (q0, q1) ∈ J_μ⁻¹(μ) over (τ0, τ1), with q0 = lift_base(τ0).
  std::function<std::pair<Vec, Vec>(const Vec& tau0, const Vec& tau1)> reconstruct;
  std::function<Vec(const Vec& q)> project;
  std::size_t axis = 0;
  double mu_axis = 0.0;
};

/// Throws NoSolution if G_μ is not a supported translation group and
/// RepresentativeOutOfChart if a lifted representative leaves the chart.
ReducedSystem reduce(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& mu,
                     const PrincipalConnection& conn, const ReductionOptions& opt = {});

/// d⟨μ, 𝔄⟩ with the group direction dropped. The exterior derivative is
/// taken by finite differences; NotBasic is thrown when it does not
/// annihilate the group direction.
TwoFormField beta_mu(const PrincipalConnection& conn, double mu_axis, std::function<Vec(const Vec&)> lift_base,
                     double tol = 1e-6);

struct ReductionReport {
  /// max_k ‖π(q_k) − τ_k‖∞
  double max_discrepancy = 0.0;
  Trajectory unreduced;
  Trajectory reduced;
};

/// Runs the full flow from (q0, q1) and the reduced flow from its projection.
ReductionReport verify_reduction(const DiscreteSystem& sys, const ReducedSystem& red, const Vec& q0,
                                 const Vec& q1, std::size_t n_steps, const SolverConfig& cfg = {});

/// max |(L̆ + γ)(r0, r1) − h 𝔕((r0 + r1)/2, (r1 − r0)/h)| over `samples`
/// uniformly drawn points of [lo, hi]², for the reduced midpoint system.
double midpoint_identity_check(const systems::CentralParams& p, std::size_t samples, double lo = 0.1, double hi = 3.0,
                               unsigned seed = 7);

}  // namespace routhe
