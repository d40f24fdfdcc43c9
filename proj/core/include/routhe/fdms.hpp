#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "routhe/chart.hpp"
#include "routhe/diff.hpp"
#include "routhe/field.hpp"
#include "routhe/linalg.hpp"

namespace routhe {

/// A forced discrete mechanical system (Q, L_d, f⁻, f⁺).
/// f⁻(q0,q1) is a covector at q0, f⁺(q0,q1) a covector at q1.
struct DiscreteSystem {
  std::string name;
  Chart chart;
  ScalarField2 lagrangian;
  CovectorField2 force_minus;
  CovectorField2 force_plus;

  std::size_t dim() const { return chart.dim; }
  bool unforced() const { return unforced_; }

  static DiscreteSystem make(std::string name, Chart chart, ScalarField2 lagrangian,
                             CovectorField2 force_minus, CovectorField2 force_plus);
  static DiscreteSystem make_unforced(std::string name, Chart chart, ScalarField2 lagrangian);

 private:
  bool unforced_ = false;
};

struct SolverConfig {
  double tol = 1e-12;
  int max_iter = 50;
  /// Newton update is scaled by this factor (1 = plain Newton).
  double damping = 1.0;
};

struct StepDiagnostics {
  int iterations = 0;
  double residual = 0.0;
};

struct StepResult {
  Vec q2;
  StepDiagnostics diag;
};

struct Trajectory {
  std::vector<Vec> points;
  /// diagnostics[k] belongs to the step producing points[k + 2]
  std::vector<StepDiagnostics> diagnostics;

  std::size_t size() const { return points.size(); }
  const Vec& operator[](std::size_t k) const { return points[k]; }
};

/// D₂L(q0,q1) + D₁L(q1,q2) + f⁺(q0,q1) + f⁻(q1,q2), a covector at q1.
Vec del_residual(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, const Vec& q2);

/// 𝔽⁺(q0,q1) = D₂L + f⁺ at q1.
Vec legendre_plus(const DiscreteSystem& sys, const Vec& q0, const Vec& q1);
/// 𝔽⁻(q0,q1) = −D₁L − f⁻ at q0.
Vec legendre_minus(const DiscreteSystem& sys, const Vec& q0, const Vec& q1);

/// First derivatives of the split force; A_minus_0(i,j) = ∂f⁻_i/∂q0^j and so on.
struct ForceJacobians {
  Matrix minus_0, minus_1, plus_0, plus_1;
};
ForceJacobians force_jacobians(const DiscreteSystem& sys, const Vec& q0, const Vec& q1);

struct RegularityMatrices {
  Matrix b_plus;   // d1d2 L + ∂f⁺/∂q0
  Matrix b_minus;  // −(d1d2 L)ᵀ − ∂f⁻/∂q1, rows index q0
  bool is_regular = false;
};
RegularityMatrices regularity_matrices(const DiscreteSystem& sys, const Vec& q0, const Vec& q1);

/// ∂(del_residual)/∂q2 at (q1, q2): the Newton matrix.
Matrix newton_matrix(const DiscreteSystem& sys, const Vec& q1, const Vec& q2);

/// Solves the forced DEL for q2 by Newton's method from 2q1 − q0.
StepResult step(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, const SolverConfig& cfg = {});

/// N steps from (q0, q1): N + 2 points. Errors carry the failing step index.
Trajectory run(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, std::size_t n_steps,
               const SolverConfig& cfg = {});

}  // namespace routhe
