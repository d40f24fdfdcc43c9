#include "routhe/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "routhe/errors.hpp"
#include "routhe/forms.hpp"
#include "routhe/reference.hpp"

namespace routhe {
namespace {

Chart quotient_chart(const Chart& c, std::size_t axis, const std::string& group) {
  Chart q;
  q.id = c.id + "/" + group;
  q.dim = c.dim - 1;
  auto shift = [axis](std::size_t k) { return k > axis ? k - 1 : k; };
  for (std::size_t k : c.positive)
    if (k != axis) q.positive.push_back(shift(k));
  for (std::size_t k : c.angular)
    if (k != axis) q.angular.push_back(shift(k));
  return q;
}

struct Lifter {
  std::size_t axis;
  double representative;
  Chart chart;

  template <class T>
  Point<T> operator()(const Point<T>& tau) const {
    Point<T> q;
    q.reserve(tau.size() + 1);
    for (std::size_t j = 0; j < tau.size(); ++j) {
      if (j == axis) q.push_back(T(representative));
      q.push_back(tau[j]);
    }
    if (axis == tau.size()) q.push_back(T(representative));
    if (!chart.contains(values(q)))
      throw RepresentativeOutOfChart("reduce: representative of a quotient point leaves chart '" + chart.id + "'");
    return q;
  }
};

}  // namespace

ReducedSystem reduce(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& mu,
                     const PrincipalConnection& conn, const ReductionOptions& opt) {
  const auto iso = setup.isotropy ? setup.isotropy(mu) : std::nullopt;
  if (!iso) throw NoSolution("reduce: the isotropy group of mu is not a supported translation group");
  const std::size_t k = iso->chart_axis;
  if (conn.axis != k) throw Error("reduce: the principal connection is not adapted to the isotropy group");
  const double mu_k = mu[iso->group_index];
  const ScalarField2 L = sys.lagrangian;
  const Lifter lift{k, opt.representative, sys.chart};

  ScalarField2 lagrangian([L, lift, k, mu_k](const auto& t0, const auto& t1) ->
                          typename std::decay_t<decltype(t0)>::value_type {
    using T = typename std::decay_t<decltype(t0)>::value_type;
    if constexpr (!has_headroom_v<T>) {
      throw_tower_exhausted("reduced Lagrangian");
    } else {
      const Point<T> q0 = lift(t0);
      Point<T> q1 = lift(t1);
      const T a = detail::connection_coordinate<T>(L, k, mu_k, q0, q1);
      q1[k] = q1[k] - a;
      return L(q0, q1);
    }
  });

  // ⟨μ, T𝒜_μ⟩ on horizontal lifts, one slot at a time
  auto make_force = [L, lift, k, mu_k, conn](Slot slot) {
    return CovectorField2([L, lift, k, mu_k, conn, slot](const auto& t0, const auto& t1) ->
                          std::decay_t<decltype(t0)> {
      using T = typename std::decay_t<decltype(t0)>::value_type;
      if constexpr (dual_depth_v<T> >= 2) {
        throw_tower_exhausted("reduced force");
      } else {
        const Point<T> q0 = lift(t0);
        Point<T> q1 = lift(t1);
        const T a = detail::connection_coordinate<T>(L, k, mu_k, q0, q1);
        q1[k] = q1[k] - a;
        const Point<T>& base = slot == Slot::First ? q0 : q1;

        Point<T> out(t0.size(), T(0.0));
        Point<T> e(t0.size(), T(0.0));
        for (std::size_t i = 0; i < t0.size(); ++i) {
          e[i] = T(1.0);
          const Point<T> u = horizontal_lift<T>(conn, base, e);
          e[i] = T(0.0);
          auto a0 = raise(q0);
          auto a1 = raise(q1);
          auto& moved = slot == Slot::First ? a0 : a1;
          for (std::size_t j = 0; j < u.size(); ++j) moved[j].d = u[j];
          out[i] = mu_k * detail::connection_coordinate<Dual<T>>(L, k, mu_k, a0, a1).d;
        }
        return out;
      }
    });
  };

  ReducedSystem red;
  red.axis = k;
  red.mu_axis = mu_k;
  red.reduced = DiscreteSystem::make(sys.name + "/" + setup.name, quotient_chart(sys.chart, k, setup.name),
                                     std::move(lagrangian), make_force(Slot::First), make_force(Slot::Second));
  red.lift_base = [lift](const Vec& tau) { return lift(tau); };
  red.project = [k](const Vec& q) {
    Vec tau;
    for (std::size_t j = 0; j < q.size(); ++j)
      if (j != k) tau.push_back(q[j]);
    return tau;
  };
  red.reconstruct = [L, lift, k, mu_k](const Vec& tau0, const Vec& tau1) {
    const Vec q0 = lift(tau0);
    Vec q1 = lift(tau1);
    q1[k] -= detail::solve_connection(L, k, mu_k, q0, q1);
    return std::make_pair(q0, q1);
  };
  red.beta_mu = beta_mu(conn, mu_k, red.lift_base, opt.basic_tol);
  return red;
}

TwoFormField beta_mu(const PrincipalConnection& conn, double mu_axis, std::function<Vec(const Vec&)> lift_base,
                     double tol) {
  return [conn, mu_axis, lift_base = std::move(lift_base), tol](const Vec& tau) {
    const Vec q = lift_base(tau);
    const auto theta = [&conn, mu_axis](const Vec& x) {
      Vec a = conn.form(x);
      for (auto& v : a) v *= mu_axis;
      return a;
    };
    const Matrix d = exterior_derivative_fd(theta, q);
    const std::size_t k = conn.axis;
    double vertical = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) vertical = std::max(vertical, std::abs(d(k, j)));
    if (vertical > tol * std::max(1.0, d.max_abs()))
      throw NotBasic("beta_mu: d<mu, A> does not annihilate the group direction (" + std::to_string(vertical) + ")");
    Matrix out(q.size() - 1, q.size() - 1);
    for (std::size_t i = 0, r = 0; i < q.size(); ++i) {
      if (i == k) continue;
      for (std::size_t j = 0, c = 0; j < q.size(); ++j) {
        if (j == k) continue;
        out(r, c++) = d(i, j);
      }
      ++r;
    }
    return out;
  };
}

ReductionReport verify_reduction(const DiscreteSystem& sys, const ReducedSystem& red, const Vec& q0, const Vec& q1,
                                 std::size_t n_steps, const SolverConfig& cfg) {
  ReductionReport rep;
  rep.unreduced = run(sys, q0, q1, n_steps, cfg);
  rep.reduced = run(red.reduced, red.project(q0), red.project(q1), n_steps, cfg);
  for (std::size_t j = 0; j < rep.unreduced.size(); ++j)
    rep.max_discrepancy =
        std::max(rep.max_discrepancy, max_abs_diff(red.project(rep.unreduced[j]), rep.reduced[j]));
  return rep;
}

double midpoint_identity_check(const systems::CentralParams& p, std::size_t samples, double lo, double hi,
                               unsigned seed) {
  const DiscreteSystem red = systems::central_reduced_closed_form(p);
  const ScalarField2 gamma = systems::central_reduced_potential(p);
  const ContinuousReducedSystem cont = ContinuousReducedSystem::sextic(p.alpha, p.beta, p.m, p.mu);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec r0{u(rng)}, r1{u(rng)};
    const double lhs = red.lagrangian(r0, r1) + gamma(r0, r1);
    const double rhs = p.h * cont.routhian(0.5 * (r0[0] + r1[0]), (r1[0] - r0[0]) / p.h);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace routhe
