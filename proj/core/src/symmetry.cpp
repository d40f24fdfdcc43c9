#include "routhe/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace routhe {

SymmetrySetup translation_symmetry(std::size_t dim, std::size_t axis) {
  SymmetrySetup s;
  s.name = "translation-" + std::to_string(axis);
  s.group_dim = 1;
  s.lie_dim = 1;
  s.act = [axis](const GroupElement& g, const Vec& q) {
    Vec out = q;
    out[axis] += g.coords[0];
    return out;
  };
  s.generator = [dim, axis](std::size_t, const Vec&) {
    Vec e(dim, 0.0);
    e[axis] = 1.0;
    return e;
  };
  s.compose = [](const GroupElement& a, const GroupElement& b) { return GroupElement{{a.coords[0] + b.coords[0]}}; };
  s.inverse = [](const GroupElement& a) { return GroupElement{{-a.coords[0]}}; };
  s.identity = GroupElement{{0.0}};
  s.coadjoint = [](const GroupElement&, const Vec& mu) { return mu; };
  s.isotropy = [axis](const Vec&) { return std::optional<IsotropyTranslation>({axis, 0}); };
  return s;
}

SymmetrySetup se2_symmetry() {
  SymmetrySetup s;
  s.name = "SE(2)";
  s.group_dim = 3;
  s.lie_dim = 3;
  s.act = [](const GroupElement& g, const Vec& q) {
    const double c = std::cos(g.coords[0]), sn = std::sin(g.coords[0]);
    return Vec{q[0] + g.coords[0], q[1] * c - q[2] * sn + g.coords[1], q[1] * sn + q[2] * c + g.coords[2]};
  };
  s.generator = [](std::size_t i, const Vec& q) {
    switch (i) {
      case 0: return Vec{1.0, -q[2], q[1]};
      case 1: return Vec{0.0, 1.0, 0.0};
      default: return Vec{0.0, 0.0, 1.0};
    }
  };
  s.compose = [](const GroupElement& g, const GroupElement& k) {
    const double c = std::cos(g.coords[0]), sn = std::sin(g.coords[0]);
    return GroupElement{{g.coords[0] + k.coords[0], k.coords[1] * c - k.coords[2] * sn + g.coords[1],
                         k.coords[1] * sn + k.coords[2] * c + g.coords[2]}};
  };
  s.inverse = [](const GroupElement& g) {
    const double c = std::cos(g.coords[0]), sn = std::sin(g.coords[0]);
    const double a = g.coords[1], b = g.coords[2];
    return GroupElement{{-g.coords[0], -(a * c + b * sn), a * sn - b * c}};
  };
  s.identity = GroupElement{{0.0, 0.0, 0.0}};
  s.coadjoint = [](const GroupElement& g, const Vec& mu) {
    const double c = std::cos(g.coords[0]), sn = std::sin(g.coords[0]);
    const double a = g.coords[1], b = g.coords[2];
    return Vec{mu[0] + mu[1] * (a * sn - b * c) + mu[2] * (a * c + b * sn), mu[1] * c - mu[2] * sn,
               mu[1] * sn + mu[2] * c};
  };
  s.isotropy = [](const Vec& mu) -> std::optional<IsotropyTranslation> {
    const double scale = std::max({std::abs(mu[0]), std::abs(mu[1]), std::abs(mu[2])});
    if (mu[1] != 0.0 && std::abs(mu[2]) <= 1e-14 * scale) return IsotropyTranslation{1, 1};
    return std::nullopt;
  };
  return s;
}

SymmetrySetup bar_symmetry(double m, double h) {
  SymmetrySetup s = se2_symmetry();
  s.closed_form_connection = [m, h](const Vec& mu, const Vec& q0, const Vec& q1) {
    return GroupElement{{0.0, q1[1] - q0[1] - mu[1] * h / m, 0.0}};
  };
  return s;
}

Vec momentum_plus(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& q0, const Vec& q1) {
  const Vec p = d2(sys.lagrangian, q0, q1);
  Vec j(setup.lie_dim);
  for (std::size_t i = 0; i < setup.lie_dim; ++i) {
    const Vec xi = setup.generator(i, q1);
    j[i] = std::inner_product(p.begin(), p.end(), xi.begin(), 0.0);
  }
  return j;
}

Vec momentum_minus(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& q0, const Vec& q1) {
  const Vec p = d1(sys.lagrangian, q0, q1);
  Vec j(setup.lie_dim);
  for (std::size_t i = 0; i < setup.lie_dim; ++i) {
    const Vec xi = setup.generator(i, q0);
    j[i] = -std::inner_product(p.begin(), p.end(), xi.begin(), 0.0);
  }
  return j;
}

Vec momentum(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& q0, const Vec& q1, double tol) {
  Vec jp = momentum_plus(sys, setup, q0, q1);
  const Vec jm = momentum_minus(sys, setup, q0, q1);
  const double gap = max_abs_diff(jp, jm);
  if (!(gap <= tol))
    throw InvarianceViolation("momentum: D2 and -D1 expressions differ by " + std::to_string(gap) +
                              "; the Lagrangian is not invariant under " + setup.name);
  return jp;
}

double check_equivariance(const DiscreteSystem& sys, const SymmetrySetup& setup,
                          const std::vector<EquivarianceSample>& samples) {
  double worst = 0.0;
  for (const auto& s : samples) {
    const Vec moved = momentum_plus(sys, setup, setup.act(s.g, s.q0), setup.act(s.g, s.q1));
    const Vec expected = setup.coadjoint(s.g, momentum_plus(sys, setup, s.q0, s.q1));
    worst = std::max(worst, max_abs_diff(moved, expected));
  }
  return worst;
}

std::vector<GroupElement> isotropy_probe(const SymmetrySetup& setup, const Vec& mu,
                                         const std::vector<GroupElement>& grid, double tol) {
  std::vector<GroupElement> fixed;
  for (const auto& g : grid)
    if (max_abs_diff(setup.coadjoint(g, mu), mu) <= tol) fixed.push_back(g);
  return fixed;
}

namespace detail {

double solve_connection(const ScalarField2& L, std::size_t axis, double mu_axis, const Vec& q0, const Vec& q1) {
  const Point<D1> b0 = promote<D1>(q0);
  double a = 0.0;
  double r = 0.0;
  for (int it = 0; it < 50; ++it) {
    Point<D1> b1 = promote<D1>(q1);
    b1[axis] = D1(q1[axis] - a, 1.0);
    const D1 j = axis_momentum<D1>(L, axis, b0, b1);
    r = j.v - mu_axis;
    const double slope = -j.d;
    const double delta = r / slope;
    if (!std::isfinite(delta))
      throw NoSolution("connection: the momentum equation has a vanishing derivative along the group");
    a -= delta;
    if (std::abs(delta) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a)) ||
        r == 0.0)
      return a;
  }
  throw NoSolution("connection: Newton did not converge (residual " + std::to_string(r) + ")");
}

}  // namespace detail

GroupElement connection_A_mu_numeric(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& mu,
                                     const Vec& q0, const Vec& q1) {
  const auto iso = setup.isotropy ? setup.isotropy(mu) : std::nullopt;
  if (!iso) throw NoSolution("connection: the isotropy group of mu is not a supported translation group");
  const double a = detail::solve_connection(sys.lagrangian, iso->chart_axis, mu[iso->group_index], q0, q1);
  GroupElement g{Vec(setup.group_dim, 0.0)};
  g.coords[iso->group_index] = a;
  return g;
}

GroupElement connection_A_mu(const DiscreteSystem& sys, const SymmetrySetup& setup, const Vec& mu, const Vec& q0,
                             const Vec& q1) {
  if (setup.closed_form_connection) return setup.closed_form_connection(mu, q0, q1);
  return connection_A_mu_numeric(sys, setup, mu, q0, q1);
}

PrincipalConnection bar_connection(double nu) {
  return PrincipalConnection{CovectorField1([nu](const auto& q) {
                               using T = typename std::decay_t<decltype(q)>::value_type;
                               return Point<T>{T(0.0), T(1.0), T(-nu)};
                             }),
                             1};
}

PrincipalConnection flat_connection(std::size_t n, std::size_t axis) {
  return PrincipalConnection{CovectorField1([n, axis](const auto& q) {
                               using T = typename std::decay_t<decltype(q)>::value_type;
                               Point<T> a(n, T(0.0));
                               a[axis] = T(1.0);
                               return a;
                             }),
                             axis};
}

Vec horizontal_lift(const PrincipalConnection& conn, const Vec& q, const Vec& delta_tau) {
  return horizontal_lift<double>(conn, q, delta_tau);
}

}  // namespace routhe
