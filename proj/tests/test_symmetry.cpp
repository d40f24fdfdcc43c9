#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "routhe/errors.hpp"
#include "routhe/reference.hpp"
#include "routhe/symmetry.hpp"
#include "routhe/systems.hpp"
#include "support.hpp"

using namespace routhe;
using testing_support::Gen;

namespace {

GroupElement random_element(Gen& gen) { return GroupElement{gen.point(3, -2.0, 2.0)}; }

/// Bar kinetic energy plus a potential in x: not SE(2)-invariant.
DiscreteSystem broken_bar() {
  return DiscreteSystem::make_unforced("broken-bar", Chart::euclidean(3), [](const auto& q0, const auto& q1) {
    const double h = 0.2;
    const auto dp = q1[0] - q0[0], dx = q1[1] - q0[1], dy = q1[2] - q0[2];
    const auto x = 0.5 * (q0[1] + q1[1]);
    return (dp * dp + dx * dx + dy * dy) / (2.0 * h) - h * x * x;
  });
}

/// Exact continuous flow at t = h from the central-potential initial data, in (r, η).
Vec central_exact_seed(const systems::CentralParams& p, double r0, double rdot0, double eta0, double etadot0) {
  const ContinuousReducedSystem sys = ContinuousReducedSystem::sextic(p.alpha, p.beta, p.m, p.m * r0 * r0 * etadot0);
  const auto traj = adaptive_solve([&](double, const Vec& s) { return sys.rhs_with_angle(s); },
                                   Vec{r0, rdot0, eta0}, 0.0, p.h);
  const Vec end = traj.back();
  return Vec{end[0], end[2]};
}

/// Ad_{g⁻¹} ξ_i expressed in the Lie basis, from the action alone:
/// its generator at q is T(g⁻¹) ξ_i(g q), taken by central differences.
Vec conjugated_generator(const SymmetrySetup& s, const GroupElement& g, std::size_t i, const Vec& q) {
  const double t = 1e-6;
  const Vec gq = s.act(g, q);
  const Vec xi = s.generator(i, gq);
  const GroupElement gi = s.inverse(g);
  Vec v = (1.0 / (2 * t)) * (s.act(gi, gq + t * xi) - s.act(gi, gq - t * xi));
  Matrix basis(q.size(), s.lie_dim);
  for (std::size_t j = 0; j < s.lie_dim; ++j) {
    const Vec e = s.generator(j, q);
    for (std::size_t r = 0; r < q.size(); ++r) basis(r, j) = e[r];
  }
  return LU(basis).solve(v);
}

}  // namespace

TEST_CASE("SE(2) group axioms") {
  Gen gen(1);
  const SymmetrySetup s = se2_symmetry();
  for (int k = 0; k < 50; ++k) {
    const GroupElement a = random_element(gen), b = random_element(gen), c = random_element(gen);
    const Vec q = gen.point(3);
    CHECK(max_abs_diff(s.act(s.identity, q), q) == 0.0);
    CHECK(max_abs_diff(s.act(s.compose(a, b), q), s.act(a, s.act(b, q))) <= 1e-12);
    CHECK(max_abs_diff(s.compose(s.compose(a, b), c).coords, s.compose(a, s.compose(b, c)).coords) <= 1e-12);
    CHECK(max_abs_diff(s.compose(a, s.inverse(a)).coords, s.identity.coords) <= 1e-12);
    CHECK(max_abs_diff(s.act(s.inverse(a), s.act(a, q)), q) <= 1e-12);
    // coadjoint is a left action
    const Vec mu = gen.point(3);
    CHECK(max_abs_diff(s.coadjoint(s.compose(a, b), mu), s.coadjoint(a, s.coadjoint(b, mu))) <= 1e-12);
  }
  const SymmetrySetup t = translation_symmetry(2, 1);
  CHECK(t.act(GroupElement{{0.5}}, Vec{1, 2}) == Vec{1, 2.5});
  CHECK(t.compose(GroupElement{{0.5}}, GroupElement{{0.25}}).coords[0] == 0.75);
}

TEST_CASE("generators are the derivative of the action") {
  Gen gen(2);
  const SymmetrySetup s = se2_symmetry();
  for (int k = 0; k < 20; ++k) {
    const Vec q = gen.point(3);
    for (std::size_t i = 0; i < 3; ++i) {
      GroupElement gp{Vec(3, 0.0)}, gm{Vec(3, 0.0)};
      gp.coords[i] = 1e-6;
      gm.coords[i] = -1e-6;
      const Vec fd = (1.0 / 2e-6) * (s.act(gp, q) - s.act(gm, q));
      CHECK(max_abs_diff(fd, s.generator(i, q)) <= 1e-8);
    }
  }
}

TEST_CASE("discrete momentum map on hand-computed examples") {
  const DiscreteSystem bar = systems::bar();
  const SymmetrySetup s = se2_symmetry();
  const Vec q0{0, 0, 0}, q1{0.1, 0.5, 0.2};
  const Vec j = momentum(bar, s, q0, q1);
  // p = D₂L = (0.5, 2.5, 1); rotation pairs with (1, −y1, x1)
  CHECK(j[1] == doctest::Approx(2.5));
  CHECK(j[2] == doctest::Approx(1.0));
  CHECK(j[0] == doctest::Approx(0.5 - 0.2 * 2.5 + 0.5 * 1.0));
  CHECK(max_abs_diff(momentum_plus(bar, s, q0, q1), momentum_minus(bar, s, q0, q1)) <= 1e-12);

  const DiscreteSystem fp = systems::free_particle(2.0, 0.5, 2);
  CHECK(momentum(fp, translation_symmetry(2, 0), Vec{0, 0}, Vec{1, 3})[0] == doctest::Approx(4.0));
}

TEST_CASE("central potential: discrete momentum from an exact-flow seed matches m r0^2 etadot0") {
  const systems::CentralParams p;
  const DiscreteSystem sys = systems::central_midpoint(p);
  const SymmetrySetup rot = translation_symmetry(2, 1);
  const Vec q0{0.2, 1.5708};
  const Vec q1 = central_exact_seed(p, 0.2, 0.01, 1.5708, -2.85);
  const double expected = p.m * 0.2 * 0.2 * -2.85;
  CHECK(std::abs(momentum(sys, rot, q0, q1)[0] - expected) <= 1e-3);
}

TEST_CASE("central potential: discrete momentum is conserved along the unreduced flow") {
  const systems::CentralParams p;
  const DiscreteSystem sys = systems::central_midpoint(p);
  const SymmetrySetup rot = translation_symmetry(2, 1);
  const Vec q0{0.2, 1.5708};
  const Vec q1 = central_exact_seed(p, 0.2, 0.01, 1.5708, -2.85);
  const Trajectory t = run(sys, q0, q1, 499);
  const double j0 = momentum(sys, rot, t[0], t[1])[0];
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < t.size(); ++k)
    worst = std::max(worst, std::abs(momentum(sys, rot, t[k], t[k + 1])[0] - j0));
  CHECK(worst <= 1e-9);
}

TEST_CASE("non-invariant Lagrangians are reported") {
  CHECK_THROWS_AS(momentum(broken_bar(), se2_symmetry(), Vec{0.1, 0.4, 0.2}, Vec{0.2, 0.5, 0.3}), InvarianceViolation);
}

TEST_CASE("equivariance of the momentum map") {
  Gen gen(3);
  std::vector<EquivarianceSample> samples;
  for (int k = 0; k < 40; ++k) samples.push_back({random_element(gen), gen.point(3), gen.point(3)});
  CHECK(check_equivariance(systems::bar(), se2_symmetry(), samples) <= 1e-10);
  CHECK(check_equivariance(broken_bar(), se2_symmetry(), samples) > 1e-2);
}

TEST_CASE("coadjoint action agrees with differentiated conjugation") {
  Gen gen(4);
  const SymmetrySetup s = se2_symmetry();
  for (int k = 0; k < 30; ++k) {
    const GroupElement g = random_element(gen);
    const Vec mu = gen.point(3), q = gen.point(3);
    const Vec got = s.coadjoint(g, mu);
    for (std::size_t i = 0; i < 3; ++i) {
      const Vec eta = conjugated_generator(s, g, i, q);
      double pairing = 0.0;
      for (std::size_t j = 0; j < 3; ++j) pairing += mu[j] * eta[j];
      CHECK(got[i] == doctest::Approx(pairing).epsilon(1e-7));
    }
  }
}

TEST_CASE("isotropy") {
  const SymmetrySetup s = se2_symmetry();
  std::vector<GroupElement> grid;
  for (double al : {0.0, 0.5})
    for (double a : {-1.0, 0.0, 1.0})
      for (double b : {-1.0, 0.0, 1.0}) grid.push_back({{al, a, b}});
  const auto fixed = isotropy_probe(s, Vec{0.3, 2.5, 0.0}, grid);
  REQUIRE(fixed.size() == 3);
  for (const auto& g : fixed) {
    CHECK(g.coords[0] == 0.0);
    CHECK(g.coords[2] == 0.0);
  }
  const auto iso = s.isotropy(Vec{0.3, 2.5, 0.0});
  REQUIRE(iso.has_value());
  CHECK(iso->chart_axis == 1);
  CHECK_FALSE(s.isotropy(Vec{0.3, 2.5, 0.1}).has_value());
}

TEST_CASE("discrete connection") {
  const double m = 1.0, h = 0.2;
  const DiscreteSystem bar = systems::bar({m, 1.0, h});
  const SymmetrySetup s = bar_symmetry(m, h);
  const Vec mu{0.0, 2.5, 0.0};
  const Vec q0{0, 0, 0}, q1{0.1, 1.0, 0.2};

  SUBCASE("closed form and numeric root agree") {
    const GroupElement g = connection_A_mu(bar, s, mu, q0, q1);
    CHECK(max_abs_diff(g.coords, Vec{0.0, 0.5, 0.0}) <= 1e-12);
    CHECK(max_abs_diff(connection_A_mu_numeric(bar, s, mu, q0, q1).coords, g.coords) <= 1e-12);
    Gen gen(5);
    for (int k = 0; k < 30; ++k) {
      const Vec a = gen.point(3), b = gen.point(3);
      CHECK(max_abs_diff(connection_A_mu(bar, s, mu, a, b).coords, connection_A_mu_numeric(bar, s, mu, a, b).coords) <=
            1e-12);
    }
  }
  SUBCASE("the defining equation holds") {
    Gen gen(6);
    const DiscreteSystem central = systems::central_midpoint();
    const SymmetrySetup rot = translation_symmetry(2, 1);
    for (int k = 0; k < 30; ++k) {
      const Vec a{gen.uniform(0.5, 1.5), gen.uniform(-3, 3)}, b{gen.uniform(0.5, 1.5), gen.uniform(-3, 3)};
      const Vec mu_c{gen.uniform(-0.5, 0.5)};
      const GroupElement g = connection_A_mu(central, rot, mu_c, a, b);
      const Vec moved = rot.act(rot.inverse(g), b);
      CHECK(momentum_plus(central, rot, a, moved)[0] == doctest::Approx(mu_c[0]).epsilon(1e-12));
    }
  }
  SUBCASE("identity on the level set") {
    const Vec on_level{0.1, 0.5, 0.2};  // x gap μ₂h/m
    CHECK(max_abs_diff(connection_A_mu(bar, s, mu, q0, on_level).coords, s.identity.coords) <= 1e-12);
  }
  SUBCASE("equivariance under the isotropy group") {
    Gen gen(7);
    for (int k = 0; k < 20; ++k) {
      const Vec a = gen.point(3), b = gen.point(3);
      const GroupElement kx{{0.0, gen.uniform(-2, 2), 0.0}};
      const double base = connection_A_mu_numeric(bar, s, mu, a, b).coords[1];
      CHECK(connection_A_mu_numeric(bar, s, mu, a, s.act(kx, b)).coords[1] ==
            doctest::Approx(base + kx.coords[1]).epsilon(1e-12));
      CHECK(connection_A_mu_numeric(bar, s, mu, s.act(kx, a), s.act(kx, b)).coords[1] ==
            doctest::Approx(base).epsilon(1e-12));
    }
  }
  SUBCASE("the root is unique: the momentum is strictly monotone along the group") {
    const DiscreteSystem central = systems::central_midpoint();
    const Vec a{0.8, 0.1}, b{1.1, 0.4};
    double prev = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double shift = -10.0 + 0.1 * k;
      const double j = momentum_plus(central, translation_symmetry(2, 1), a, Vec{b[0], b[1] - shift})[0];
      if (k > 0) CHECK(j < prev);
      prev = j;
    }
  }
  SUBCASE("unsupported isotropy") {
    CHECK_THROWS_AS(connection_A_mu_numeric(bar, se2_symmetry(), Vec{0.0, 2.5, 0.3}, q0, q1), NoSolution);
    // no dependence on the group direction
    CHECK_THROWS_AS(connection_A_mu(systems::degenerate(2), translation_symmetry(2, 1), Vec{1.0}, Vec{0, 0},
                                    Vec{1, 1}),
                    NoSolution);
  }
}

TEST_CASE("horizontal lift") {
  const PrincipalConnection conn = bar_connection(0.7);
  const Vec q{0.3, 1.0, -0.5};
  CHECK(max_abs_diff(horizontal_lift(conn, q, Vec{1.0, 2.0}), Vec{1.0, 1.4, 2.0}) <= 1e-15);
  CHECK(horizontal_lift(conn, q, Vec{0.0, 0.0}) == Vec{0.0, 0.0, 0.0});

  // 𝔄(lift) = 0 for a connection with position-dependent coefficients
  const PrincipalConnection curved{CovectorField1([](const auto& p) {
                                     using T = typename std::decay_t<decltype(p)>::value_type;
                                     return Point<T>{p[0] * p[1], T(0.3), T(1.0) + p[0] * p[0]};
                                   }),
                                   2};
  Gen gen(8);
  for (int k = 0; k < 30; ++k) {
    const Vec p = gen.point(3), tau = gen.point(2);
    const Vec v = horizontal_lift(curved, p, tau);
    const Vec a = curved.form(p);
    CHECK(std::abs(a[0] * v[0] + a[1] * v[1] + a[2] * v[2]) <= 1e-14);
    CHECK(v[0] == tau[0]);
    CHECK(v[1] == tau[1]);
  }
}
