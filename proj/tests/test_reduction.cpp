#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <type_traits>

#include "routhe/errors.hpp"
#include "routhe/forms.hpp"
#include "routhe/reduction.hpp"
#include "routhe/systems.hpp"
#include "support.hpp"

using namespace routhe;
using testing_support::Gen;

namespace {

ReducedSystem reduce_bar(const systems::BarParams& bp, double mu2, double nu, const ReductionOptions& opt = {}) {
  return reduce(systems::bar(bp), bar_symmetry(bp.m, bp.h), Vec{0.0, mu2, 0.0}, bar_connection(nu), opt);
}

ReducedSystem reduce_central(const systems::CentralParams& p) {
  return reduce(systems::central_midpoint(p), translation_symmetry(2, 1), Vec{p.mu}, flat_connection(2, 1));
}

/// 𝔄 = dz + x dy on the cyclic ℝ³ system.
PrincipalConnection twisted_connection() {
  return PrincipalConnection{CovectorField1([](const auto& q) {
                               using T = typename std::decay_t<decltype(q)>::value_type;
                               return Point<T>{T(0.0), q[0], T(1.0)};
                             }),
                             2};
}

ReducedSystem reduce_cyclic(double mu) {
  return reduce(systems::cyclic_space(), translation_symmetry(3, 2), Vec{mu}, twisted_connection());
}

}  // namespace

TEST_CASE("reduced Lagrangian is L on the reconstructed pair") {
  Gen gen(1);
  const systems::BarParams bp;
  const ReducedSystem red = reduce_bar(bp, 2.5, 0.7);
  const DiscreteSystem bar = systems::bar(bp);
  CHECK(red.reduced.dim() == 2);
  CHECK(red.reduced.chart.id == bar.chart.id + "/SE(2)");
  for (int k = 0; k < 30; ++k) {
    const Vec t0 = gen.point(2), t1 = gen.point(2);
    const auto [q0, q1] = red.reconstruct(t0, t1);
    CHECK(red.reduced.lagrangian(t0, t1) == doctest::Approx(bar.lagrangian(q0, q1)).epsilon(1e-13));
    CHECK(momentum_plus(bar, se2_symmetry(), q0, q1)[1] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(max_abs_diff(red.project(q0), t0) == 0.0);
    CHECK(max_abs_diff(red.project(q1), t1) == 0.0);
  }
}

TEST_CASE("generic reduction matches the closed forms") {
  Gen gen(2);
  SUBCASE("bar") {
    const systems::BarParams bp;
    const double mu2 = 2.5, nu = 0.7;
    const ReducedSystem red = reduce_bar(bp, mu2, nu);
    const DiscreteSystem closed = systems::bar_reduced_closed_form(bp, mu2, nu);
    for (int k = 0; k < 30; ++k) {
      const Vec t0 = gen.point(2), t1 = gen.point(2);
      CHECK(red.reduced.lagrangian(t0, t1) == doctest::Approx(closed.lagrangian(t0, t1)).epsilon(1e-12));
      CHECK(max_abs_diff(red.reduced.force_minus(t0, t1), closed.force_minus(t0, t1)) <= 1e-12);
      CHECK(max_abs_diff(red.reduced.force_plus(t0, t1), closed.force_plus(t0, t1)) <= 1e-12);
    }
    // f̆ = ∓μ₂ν dy
    CHECK(max_abs_diff(red.reduced.force_minus(Vec{0, 0}, Vec{0.1, 0.2}), Vec{0.0, -1.75}) <= 1e-12);
    CHECK(max_abs_diff(red.reduced.force_plus(Vec{0, 0}, Vec{0.1, 0.2}), Vec{0.0, 1.75}) <= 1e-12);
    // drift term m/(2h)(μ₂h/m)² = 0.625 plus J/(2h)(0.1)² + m/(2h)(0.2)²
    CHECK(red.reduced.lagrangian(Vec{0, 0}, Vec{0.1, 0.2}) == doctest::Approx(0.625 + 0.025 + 0.1));
  }
  SUBCASE("central potential") {
    const systems::CentralParams p;
    const ReducedSystem red = reduce_central(p);
    const DiscreteSystem closed = systems::central_reduced_closed_form(p);
    for (int k = 0; k < 30; ++k) {
      const Vec t0{gen.uniform(0.2, 2.5)}, t1{gen.uniform(0.2, 2.5)};
      CHECK(red.reduced.lagrangian(t0, t1) == doctest::Approx(closed.lagrangian(t0, t1)).epsilon(1e-12));
      CHECK(red.reduced.force_minus(t0, t1)[0] == doctest::Approx(closed.force_minus(t0, t1)[0]).epsilon(1e-10));
      CHECK(red.reduced.force_plus(t0, t1)[0] == doctest::Approx(closed.force_plus(t0, t1)[0]).epsilon(1e-10));
    }
    // 8hμ²/(m (r0 + r1)³) at (1, 1)
    CHECK(red.reduced.force_plus(Vec{1.0}, Vec{1.0})[0] == doctest::Approx(0.0025992).epsilon(1e-10));
  }
}

TEST_CASE("μ = 0 leaves the Lagrangian restricted and no force") {
  Gen gen(3);
  systems::CentralParams p;
  p.mu = 0.0;
  const ReducedSystem red = reduce_central(p);
  const DiscreteSystem full = systems::central_midpoint(p);
  for (int k = 0; k < 20; ++k) {
    const Vec t0{gen.uniform(0.3, 2.0)}, t1{gen.uniform(0.3, 2.0)};
    CHECK(red.reduced.lagrangian(t0, t1) == doctest::Approx(full.lagrangian(Vec{t0[0], 0.0}, Vec{t1[0], 0.0})));
    CHECK(red.reduced.force_plus(t0, t1)[0] == 0.0);
    CHECK(red.reduced.force_minus(t0, t1)[0] == 0.0);
  }
  // purely radial oscillation about the minimum r = √β
  const auto rep = verify_reduction(full, red, Vec{1.3, 0.0}, Vec{1.31, 0.0}, 200);
  CHECK(rep.max_discrepancy <= 1e-10);
}

TEST_CASE("beta_mu") {
  SUBCASE("flat and exact connections give β_μ = 0") {
    CHECK(reduce_bar({}, 2.5, 0.7).beta_mu(Vec{0.3, -0.2}).max_abs() <= 1e-9);
    CHECK(reduce_central({}).beta_mu(Vec{0.8}).max_abs() == 0.0);
  }
  SUBCASE("dz + x dy gives +μ dx ∧ dy") {
    const ReducedSystem red = reduce_cyclic(0.7);
    Gen gen(4);
    for (int k = 0; k < 10; ++k)
      CHECK(max_abs_diff(red.beta_mu(gen.point(2)), Matrix{{0, 0.7}, {-0.7, 0}}) <= 1e-8);
  }
  SUBCASE("a non-basic form is rejected") {
    const PrincipalConnection bad{CovectorField1([](const auto& q) {
                                    using T = typename std::decay_t<decltype(q)>::value_type;
                                    return Point<T>{T(0.0), q[0], T(1.0) + q[0] * q[1]};
                                  }),
                                  2};
    const auto lift = [](const Vec& t) { return Vec{t[0], t[1], 0.0}; };
    CHECK_THROWS_AS((void)beta_mu(bad, 0.7, lift)(Vec{0.5, 0.4}), NotBasic);
  }
}

TEST_CASE("reduced and unreduced flows correspond") {
  SUBCASE("bar") {
    const systems::BarParams bp;
    const ReducedSystem red = reduce_bar(bp, 2.5, 0.7);
    const auto [q0, q1] = red.reconstruct(Vec{0.0, 0.0}, Vec{0.1, 0.2});
    const auto rep = verify_reduction(systems::bar(bp), red, q0, q1, 100);
    CHECK(rep.max_discrepancy <= 1e-9);
    CHECK(rep.reduced.size() == 102);
  }
  SUBCASE("central potential") {
    const systems::CentralParams p;
    const ReducedSystem red = reduce_central(p);
    const auto [q0, q1] = red.reconstruct(Vec{0.2}, Vec{0.201});
    const auto rep = verify_reduction(systems::central_midpoint(p), red, q0, q1, 500);
    CHECK(rep.max_discrepancy <= 1e-8);
  }
  SUBCASE("cyclic ℝ³ with a curved connection") {
    const ReducedSystem red = reduce_cyclic(0.7);
    const auto [q0, q1] = red.reconstruct(Vec{0.3, -0.2}, Vec{0.32, -0.15});
    const auto rep = verify_reduction(systems::cyclic_space(), red, q0, q1, 200);
    CHECK(rep.max_discrepancy <= 1e-8);
  }
}

TEST_CASE("reduced Lagrangian equals the Routhian midpoint rule up to γ") {
  CHECK(midpoint_identity_check(systems::CentralParams{}, 1000) <= 1e-12);
  systems::CentralParams other;
  other.mu = 0.9;
  other.h = 0.05;
  CHECK(midpoint_identity_check(other, 1000, 0.3, 2.0, 11) <= 1e-12);
}

TEST_CASE("reduced systems carry Routh forces") {
  SUBCASE("bar: β from the force equals β_μ = 0") {
    const ReducedSystem red = reduce_bar({}, 2.5, 0.7);
    const RouthCertificate cert = detect_routh(red.reduced);
    CHECK(cert.is_routh);
    CHECK(max_abs_diff(cert.beta(Vec{0.2, 0.1}), red.beta_mu(Vec{0.2, 0.1})) <= 1e-8);
  }
  SUBCASE("central potential: exact force") {
    const ReducedSystem red = reduce_central({});
    const RouthCertificate cert = detect_routh(red.reduced);
    CHECK(cert.is_routh);
    CHECK(cert.beta(Vec{1.0}).max_abs() <= 1e-12);
  }
  SUBCASE("cyclic ℝ³: β from the force equals β_μ") {
    const ReducedSystem red = reduce_cyclic(0.7);
    const RouthCertificate cert = detect_routh(red.reduced);
    REQUIRE(cert.is_routh);
    Gen gen(5);
    for (int k = 0; k < 10; ++k) {
      const Vec t = gen.point(2);
      CHECK(max_abs_diff(cert.beta(t), red.beta_mu(t)) <= 1e-7);
    }
  }
}

TEST_CASE("reduced systems are regular and preserve the corrected form") {
  const ReducedSystem red = reduce_cyclic(0.7);
  const Vec t0{0.3, -0.2}, t1{0.32, -0.15};
  CHECK(regularity_matrices(red.reduced, t0, t1).is_regular);
  CHECK(invertible(omega_f_plus(red.reduced, t0, t1).m));
  const RouthCertificate cert = detect_routh(red.reduced);
  PreservationOptions opt;
  opt.certificate = &cert;
  CHECK(check_preservation(red.reduced, FormKind::OmegaPlusCorrected, t0, t1, 50, opt).max_defect <= 1e-8);

  const ReducedSystem bar = reduce_bar({}, 2.5, 0.7);
  const RouthCertificate bc = detect_routh(bar.reduced);
  opt.certificate = &bc;
  CHECK(check_preservation(bar.reduced, FormKind::OmegaPlusCorrected, Vec{0, 0}, Vec{0.1, 0.2}, 50, opt).max_defect <=
        1e-8);
}

TEST_CASE("the representative does not change the reduced system") {
  Gen gen(6);
  ReductionOptions shifted;
  shifted.representative = 1.3;
  const ReducedSystem a = reduce_cyclic(0.7);
  const ReducedSystem b = reduce(systems::cyclic_space(), translation_symmetry(3, 2), Vec{0.7}, twisted_connection(),
                                 shifted);
  for (int k = 0; k < 20; ++k) {
    const Vec t0 = gen.point(2), t1 = gen.point(2);
    CHECK(a.reduced.lagrangian(t0, t1) == doctest::Approx(b.reduced.lagrangian(t0, t1)).epsilon(1e-12));
    CHECK(max_abs_diff(a.reduced.force_plus(t0, t1), b.reduced.force_plus(t0, t1)) <= 1e-10);
    CHECK(max_abs_diff(a.reduced.force_minus(t0, t1), b.reduced.force_minus(t0, t1)) <= 1e-10);
    CHECK(b.lift_base(t0)[2] == 1.3);
  }
}

TEST_CASE("bar: ν changes the force but not the reduced flow") {
  const systems::BarParams bp;
  const ReducedSystem a = reduce_bar(bp, 2.5, 0.7);
  const ReducedSystem b = reduce_bar(bp, 2.5, 0.2);
  const Vec t0{0.0, 0.0}, t1{0.1, 0.2};
  CHECK(max_abs_diff(a.reduced.force_plus(t0, t1), b.reduced.force_plus(t0, t1)) >= 1e-3);
  const Trajectory ta = run(a.reduced, t0, t1, 100);
  const Trajectory tb = run(b.reduced, t0, t1, 100);
  double worst = 0.0;
  for (std::size_t k = 0; k < ta.size(); ++k) worst = std::max(worst, max_abs_diff(ta[k], tb[k]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("reduction errors") {
  const systems::CentralParams p;
  // shifting r puts the representative at r = 0
  CHECK_THROWS_AS(
      {
        const ReducedSystem red = reduce(systems::central_midpoint(p), translation_symmetry(2, 0), Vec{p.mu},
                                         flat_connection(2, 0));
        (void)red.lift_base(Vec{0.3});
      },
      RepresentativeOutOfChart);

  CHECK_THROWS_AS(reduce(systems::bar(), se2_symmetry(), Vec{0.0, 2.5, 0.3}, bar_connection(0.7)), NoSolution);
  CHECK_THROWS_AS(reduce(systems::bar(), se2_symmetry(), Vec{0.0, 2.5, 0.0}, flat_connection(3, 2)), Error);
}

TEST_CASE("dual depth limits of reduced fields") {
  const ReducedSystem red = reduce_central({});
  const Point<D2> a2{D2(0.8)}, b2{D2(0.9)};
  const Point<D3> a3{D3(0.8)}, b3{D3(0.9)};
  CHECK_NOTHROW((void)red.reduced.lagrangian(a2, b2));
  CHECK_THROWS_AS((void)red.reduced.lagrangian(a3, b3), Error);
  const Point<D1> a1{D1(0.8)}, b1{D1(0.9)};
  CHECK_NOTHROW((void)red.reduced.force_plus(a1, b1));
  CHECK_THROWS_AS((void)red.reduced.force_plus(a2, b2), Error);
}
