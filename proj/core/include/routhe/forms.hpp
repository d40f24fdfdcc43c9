#pragma once

// Two-forms on Q x Q as 2n x 2n matrices with ω(u, v) = uᵀ M v, tangent
// vectors ordered (δq0, δq1). For a one-form θ with Jacobian
// Jac(i, a) = ∂θ_i/∂x_a the exterior derivative is [dθ] = Jacᵀ − Jac.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "routhe/fdms.hpp"
#include "routhe/linalg.hpp"

namespace routhe {

struct TwoFormMatrix {
  Vec q0, q1;
  Matrix m;

  std::size_t dim() const { return m.rows() / 2; }
  double operator()(std::span<const double> u, std::span<const double> v) const { return m.bilinear(u, v); }
  Matrix coupling() const { return m.block(0, dim(), dim(), dim()); }
  Matrix first_block() const { return m.block(0, 0, dim(), dim()); }
  Matrix second_block() const { return m.block(dim(), dim(), dim(), dim()); }
  /// ‖M + Mᵀ‖max
  double antisymmetry_defect() const;
};

/// A 2-form field on Q.
using TwoFormField = std::function<Matrix(const Vec& q)>;

TwoFormMatrix omega_Ld(const DiscreteSystem& sys, const Vec& q0, const Vec& q1);
TwoFormMatrix omega_f_plus(const DiscreteSystem& sys, const Vec& q0, const Vec& q1);
TwoFormMatrix omega_f_minus(const DiscreteSystem& sys, const Vec& q0, const Vec& q1);
/// [d f] for the one-form f = f⁻ ⊕ f⁺ on Q x Q.
Matrix df_matrix(const DiscreteSystem& sys, const Vec& q0, const Vec& q1);
/// (𝔽⁺)* of the canonical form on T*Q, assembled from the Jacobian of 𝔽⁺.
TwoFormMatrix omega_plus_pullback(const DiscreteSystem& sys, const Vec& q0, const Vec& q1);

// -- finite-difference exterior derivative (independent of the dual backend) -----

/// [dθ](x) for θ: ℝᵈ → ℝᵈ, central differences at `step`.
Matrix exterior_derivative_fd(const std::function<Vec(const Vec&)>& theta, const Vec& x, double step = 1e-5);
/// dβ(x)(e_a, e_b, e_c) for a 2-form field β: ℝᵈ → antisymmetric d x d.
/// Returns the largest absolute component over a < b < c.
double exterior_derivative_3_fd(const std::function<Matrix(const Vec&)>& beta, const Vec& x,
                                double step = 1e-5);
/// [d f] by finite differences of the force coefficients.
Matrix df_matrix_fd(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, double step = 1e-5);

// -- Routh forces ------------------------------------------------------------------

struct ProbePair {
  Vec q0, q1;
};

/// Deterministic quasi-random pairs (Halton) in the box [lo, hi]^n x [lo, hi]^n.
std::vector<ProbePair> halton_probes(std::size_t n, std::size_t count, const Vec& lo, const Vec& hi);

struct RouthCertificate {
  bool is_routh = false;
  /// β(q) = [∂f⁻/∂q0]ᵀ − ∂f⁻/∂q0, evaluated through f⁻(q, ·).
  TwoFormField beta;
  /// Worst residual among the three conditions, 2-form level.
  double max_violation = 0.0;
  /// Per condition: f⁺ ↔ f⁻ coupling symmetry, single-point dependence of
  /// the antisymmetric parts, and agreement of the two β computations.
  std::array<double, 3> condition_violation{};
  /// The same three conditions read coefficient by coefficient (no
  /// antisymmetrization). Reported only; stricter than the 2-form test.
  std::array<double, 3> literal_violation{};
  double tol = 1e-8;
};

struct RouthOptions {
  double tol = 1e-8;
  /// Size of the default probe set when no probes are supplied.
  std::size_t n_probes = 64;
  Vec lo, hi;  // default probe box; empty selects [-1, 1] (or [0.5, 1.5] for positive coordinates)
};

/// Throws InconsistentBeta when the coupling and locality conditions hold but
/// the two β computations disagree.
RouthCertificate detect_routh(const DiscreteSystem& sys, const std::vector<ProbePair>& probes,
                              const RouthOptions& opt = {});
RouthCertificate detect_routh(const DiscreteSystem& sys, const RouthOptions& opt = {});

/// ω⁺_f − pr₂*β. Throws RequiresRouth unless cert.is_routh.
TwoFormMatrix omega_plus_corrected(const DiscreteSystem& sys, const RouthCertificate& cert, const Vec& q0,
                                   const Vec& q1);

// -- flow and preservation -------------------------------------------------------

/// Tangent map of (q0,q1) ↦ (q1,q2) at a converged triple.
Matrix flow_jacobian(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, const Vec& q2);
Matrix flow_jacobian(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, const SolverConfig& cfg = {});

enum class FormKind { OmegaLd, OmegaPlusF, OmegaMinusF, OmegaPlusCorrected };

struct PreservationReport {
  /// max over steps and tangent pairs of |ω_new(TF u, TF v) − ω_old(u, v)| / ‖ω_old‖max
  double max_defect = 0.0;
  /// Same normalization, |defect − TFᵀ(−[df])TF| for the force-driven
  /// evolution of ω⁺_f. Meaningful for FormKind::OmegaPlusF only.
  double max_force_mismatch = 0.0;
  std::size_t steps = 0;
};

struct PreservationOptions {
  std::size_t random_pairs = 8;
  std::uint64_t seed = 12345;
  SolverConfig solver{};
  const RouthCertificate* certificate = nullptr;  // required for OmegaPlusCorrected
};

PreservationReport check_preservation(const DiscreteSystem& sys, FormKind kind, const Vec& q0, const Vec& q1,
                                      std::size_t n_steps, const PreservationOptions& opt = {});

}  // namespace routhe
