#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "routhe/diff.hpp"
#include "routhe/errors.hpp"
#include "routhe/fdms.hpp"

namespace routhe {

struct GroupElement {
  Vec coords;
};

/// The isotropy group G_μ when it is a one-parameter group of translations
/// of a single chart coordinate.
struct IsotropyTranslation {
  std::size_t chart_axis = 0;   // coordinate of Q that G_μ shifts
  std::size_t group_index = 0;  // group coordinate (and μ component) of G_μ
};

struct SymmetrySetup {
  std::string name;
  std::size_t group_dim = 0;
  std::size_t lie_dim = 0;
  std::function<Vec(const GroupElement&, const Vec&)> act;
  /// ξ_Q(q) for the i-th basis element of the Lie algebra.
  std::function<Vec(std::size_t, const Vec&)> generator;
  std::function<GroupElement(const GroupElement&, const GroupElement&)> compose;
  std::function<GroupElement(const GroupElement&)> inverse;
  GroupElement identity;
  /// Ad*_{g⁻¹}: the action under which the momentum map is equivariant.
  std::function<Vec(const GroupElement&, const Vec&)> coadjoint;
  std::function<std::optional<IsotropyTranslation>(const Vec& mu)> isotropy;
  /// Optional closed form of the discrete connection, indexed by μ.
  std::function<GroupElement(const Vec& mu, const Vec& q0, const Vec& q1)> closed_form_connection;
};

/// ℝ acting on ℝⁿ (or a chart) by shifting coordinate `axis`.
SymmetrySetup translation_symmetry(std::size_t dim, std::size_t axis);

/// SE(2) in coordinates (α, a, b) acting on the bar chart (φ, x, y).
SymmetrySetup se2_symmetry();

/// SE(2) with the bar's closed-form connection for translations along x.
SymmetrySetup bar_symmetry(double m, double h);

/// J_d(q0,q1)_i = D₂L(q0,q1)·ξ_i(q1).
Vec momentum_plus(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& q0, const Vec& q1);
/// −D₁L(q0,q1)·ξ_i(q0).
Vec momentum_minus(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& q0, const Vec& q1);

/// Discrete momentum map. Throws InvarianceViolation if the D₂ and −D₁
/// expressions differ by more than `tol`.
Vec momentum(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& q0, const Vec& q1,
             double tol = 1e-8);

struct EquivarianceSample {
  GroupElement g;
  Vec q0, q1;
};

/// max ‖J_d(g·q0, g·q1) − coadjoint(g, J_d(q0, q1))‖∞
double check_equivariance(const DiscreteSystem& sys, const SymmetrySetup& setup,
                          const std::vector<EquivarianceSample>& samples);

/// Group elements of `grid` that fix μ under the coadjoint action.
std::vector<GroupElement> isotropy_probe(const SymmetrySetup& setup, const Vec& mu,
                                         const std::vector<GroupElement>& grid, double tol = 1e-12);

/// The element g ∈ G_μ with J_μ(q0, g⁻¹·q1) = μ. Uses the setup's closed
/// form when present. Throws NoSolution when the defining equation cannot
/// be solved.
GroupElement connection_A_mu(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& mu,
                             const Vec& q0, const Vec& q1);
/// Always solves the defining equation numerically.
GroupElement connection_A_mu_numeric(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& mu,
                                     const Vec& q0, const Vec& q1);

/// Principal connection for a translation isotropy group, given as the
/// one-form 𝔄 = Σ a_j dq^j with a_axis ≠ 0.
struct PrincipalConnection {
  CovectorField1 form;
  std::size_t axis = 0;
};

/// 𝔄 = dx − ν dy on the bar chart.
PrincipalConnection bar_connection(double nu);
/// 𝔄 = d(coordinate axis) on an n-dimensional chart.
PrincipalConnection flat_connection(std::size_t n, std::size_t axis);

/// The horizontal vector at q projecting to δτ (coordinates of Q without `axis`).
template <class T>
Point<T> horizontal_lift(const PrincipalConnection& conn, const Point<T>& q, const Point<T>& delta_tau) {
  const Point<T> a = conn.form(q);
  Point<T> out(q.size(), T(0.0));
  T acc(0.0);
  for (std::size_t j = 0, t = 0; j < q.size(); ++j) {
    if (j == conn.axis) continue;
    out[j] = delta_tau[t++];
    acc = acc + a[j] * out[j];
  }
  out[conn.axis] = -acc / a[conn.axis];
  return out;
}

Vec horizontal_lift(const PrincipalConnection& conn, const Vec& q, const Vec& delta_tau);

namespace detail {

/// J_μ(q0, q1) = ∂L/∂q1^axis at scalar type T.
template <class T>
T axis_momentum(const ScalarField2& L, std::size_t axis, const Point<T>& q0, const Point<T>& q1) {
  auto a = raise(q0);
  auto b = raise(q1);
  b[axis].d = T(1.0);
  return L(a, b).d;
}

/// Solves J_μ(q0, q1 − a e_axis) = mu_axis in double precision.
double solve_connection(const ScalarField2& L, std::size_t axis, double mu_axis, const Vec& q0, const Vec& q1);

/// The same root at scalar type T: exact derivatives are propagated by chord
/// iterations anchored at the double-precision root.
template <class T>
T connection_coordinate(const ScalarField2& L, std::size_t axis, double mu_axis, const Point<T>& q0,
                        const Point<T>& q1) {
  const Vec v0 = values(q0), v1 = values(q1);
  const double a_star = solve_connection(L, axis, mu_axis, v0, v1);
  if constexpr (std::is_same_v<T, double>) {
    return a_star;
  } else {
    Vec w1 = v1;
    w1[axis] -= a_star;
    // ∂J_μ/∂a = −∂²L/∂(q1^axis)²
    Point<D1> b0 = promote<D1>(v0), b1 = promote<D1>(w1);
    b1[axis].d = 1.0;
    const double slope = -axis_momentum<D1>(L, axis, b0, b1).d;
    T a(a_star);
    for (int it = 0; it < dual_depth_v<T> + 2; ++it) {
      Point<T> shifted = q1;
      shifted[axis] = shifted[axis] - a;
      const T r = axis_momentum<T>(L, axis, q0, shifted) - mu_axis;
      a = a - r / slope;
    }
    return a;
  }
}

}  // namespace detail

}  // namespace routhe
