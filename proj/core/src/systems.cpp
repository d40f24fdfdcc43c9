#include "routhe/systems.hpp"

namespace routhe::systems {
namespace {

template <class V>
using scalar_t = typename std::decay_t<V>::value_type;

}  // namespace

DiscreteSystem free_particle(double m, double h, std::size_t n) {
  return DiscreteSystem::make_unforced("free-particle", Chart::euclidean(n),
                                       [m, h](const auto& q0, const auto& q1) {
                                         scalar_t<decltype(q0)> s(0.0);
                                         for (std::size_t i = 0; i < q0.size(); ++i) {
                                           const auto d = q1[i] - q0[i];
                                           s = s + d * d;
                                         }
                                         return (m / (2.0 * h)) * s;
                                       });
}

DiscreteSystem bar(const BarParams& p) {
  return DiscreteSystem::make_unforced("bar", charts::bar(), [p](const auto& q0, const auto& q1) {
    const auto dphi = q1[0] - q0[0];
    const auto dx = q1[1] - q0[1];
    const auto dy = q1[2] - q0[2];
    return (p.m / (2.0 * p.h)) * (dx * dx + dy * dy) + (p.inertia / (2.0 * p.h)) * (dphi * dphi);
  });
}

DiscreteSystem bar_reduced_closed_form(const BarParams& p, double mu2, double nu) {
  const double drift = mu2 * p.h / p.m;
  ScalarField2 lag([p, drift](const auto& t0, const auto& t1) {
    const auto dphi = t1[0] - t0[0];
    const auto dy = t1[1] - t0[1];
    return (p.m / (2.0 * p.h)) * (drift * drift + dy * dy) + (p.inertia / (2.0 * p.h)) * (dphi * dphi);
  });
  const double c = mu2 * nu;
  CovectorField2 fm([c](const auto& t0, const auto&) {
    using T = scalar_t<decltype(t0)>;
    return Point<T>{T(0.0), T(-c)};
  });
  CovectorField2 fp([c](const auto& t0, const auto&) {
    using T = scalar_t<decltype(t0)>;
    return Point<T>{T(0.0), T(c)};
  });
  return DiscreteSystem::make("bar-reduced", charts::bar_quotient(), std::move(lag), std::move(fm),
                              std::move(fp));
}

DiscreteSystem central_midpoint(const CentralParams& p) {
  return DiscreteSystem::make_unforced("central-midpoint", charts::central(),
                                       [p](const auto& q0, const auto& q1) {
                                         const auto s = 0.5 * (q0[0] + q1[0]);
                                         const auto vr = (q1[0] - q0[0]) / p.h;
                                         const auto ve = (q1[1] - q0[1]) / p.h;
                                         return p.h * ((0.5 * p.m) * (vr * vr + s * s * ve * ve) -
                                                       sextic_potential(s, p.alpha, p.beta));
                                       });
}

namespace {

ScalarField2 central_reduced_lagrangian(const CentralParams& p) {
  return ScalarField2([p](const auto& t0, const auto& t1) {
    const auto sum = t0[0] + t1[0];
    const auto v = (t1[0] - t0[0]) / p.h;
    const auto w = (p.mu / p.m) * (2.0 / sum);
    return p.h * ((0.5 * p.m) * (v * v + w * w) - sextic_potential(0.5 * sum, p.alpha, p.beta));
  });
}

}  // namespace

DiscreteSystem central_reduced_closed_form(const CentralParams& p) {
  const double k = 8.0 * p.h * p.mu * p.mu / p.m;
  CovectorField2 f([k](const auto& t0, const auto& t1) {
    using T = scalar_t<decltype(t0)>;
    const T sum = t0[0] + t1[0];
    return Point<T>{k / (sum * sum * sum)};
  });
  return DiscreteSystem::make("central-reduced", charts::reduced_radial(), central_reduced_lagrangian(p), f, f);
}

ScalarField2 central_reduced_potential(const CentralParams& p) {
  const double k = -4.0 * p.h * p.mu * p.mu / p.m;
  return ScalarField2([k](const auto& t0, const auto& t1) {
    const auto sum = t0[0] + t1[0];
    return k / (sum * sum);
  });
}

DiscreteSystem central_reduced_absorbed(const CentralParams& p) {
  ScalarField2 lag = central_reduced_lagrangian(p);
  ScalarField2 gamma = central_reduced_potential(p);
  return DiscreteSystem::make_unforced("central-reduced-absorbed", charts::reduced_radial(),
                                       [lag, gamma](const auto& t0, const auto& t1) {
                                         return lag(t0, t1) + gamma(t0, t1);
                                       });
}

namespace {

ScalarField2 euclidean_kinetic(double h) {
  return ScalarField2([h](const auto& q0, const auto& q1) {
    scalar_t<decltype(q0)> s(0.0);
    for (std::size_t i = 0; i < q0.size(); ++i) {
      const auto d = q1[i] - q0[i];
      s = s + d * d;
    }
    return s / (2.0 * h);
  });
}

}  // namespace

DiscreteSystem synthetic_routh_plane(double c, double h) {
  CovectorField2 fm([c](const auto& q0, const auto&) {
    using T = scalar_t<decltype(q0)>;
    return Point<T>{-c * q0[1], c * q0[0]};
  });
  CovectorField2 fp([c](const auto&, const auto& q1) {
    using T = scalar_t<decltype(q1)>;
    return Point<T>{c * q1[1], -c * q1[0]};
  });
  return DiscreteSystem::make("synthetic-routh", Chart::euclidean(2), euclidean_kinetic(h), fm, fp);
}

namespace {

// α = (−c y + z², c x + x z, sin y)
template <class T>
Point<T> space_potential_form(const Point<T>& q, double c) {
  return Point<T>{-c * q[1] + q[2] * q[2], c * q[0] + q[0] * q[2], sin(q[1])};
}

// Exact coupling dγ with γ = ε sin(q0·q1), gradient in the slot of `at`.
template <class T>
void add_coupling(Point<T>& f, const Point<T>& at, const Point<T>& other, double eps) {
  T s(0.0);
  for (std::size_t i = 0; i < at.size(); ++i) s = s + at[i] * other[i];
  const T g = eps * cos(s);
  for (std::size_t i = 0; i < at.size(); ++i) f[i] = f[i] + g * other[i];
}

}  // namespace

DiscreteSystem synthetic_routh_space(double c, double h) {
  const double eps = 0.1;
  CovectorField2 fm([c, eps](const auto& q0, const auto& q1) {
    auto a = space_potential_form(q0, c);
    add_coupling(a, q0, q1, eps);
    return a;
  });
  CovectorField2 fp([c, eps](const auto& q0, const auto& q1) {
    auto a = space_potential_form(q1, c);
    for (auto& x : a) x = -x;
    add_coupling(a, q1, q0, eps);
    return a;
  });
  return DiscreteSystem::make("synthetic-routh-3d", Chart::euclidean(3), euclidean_kinetic(h), fm, fp);
}

DiscreteSystem dissipative_plane(double kappa, double h) {
  CovectorField2 fp([kappa](const auto& q0, const auto& q1) {
    using T = scalar_t<decltype(q0)>;
    Point<T> f(q0.size());
    for (std::size_t i = 0; i < q0.size(); ++i) f[i] = -kappa * (q1[i] - q0[i]);
    return f;
  });
  return DiscreteSystem::make("dissipative", Chart::euclidean(2), euclidean_kinetic(h), CovectorField2::zero(2),
                              fp);
}

DiscreteSystem degenerate(std::size_t n) {
  return DiscreteSystem::make_unforced("degenerate", Chart::euclidean(n), [](const auto& q0, const auto&) {
    scalar_t<decltype(q0)> s(0.0);
    for (const auto& x : q0) s = s + x * x;
    return s;
  });
}

DiscreteSystem cubic(double h) {
  return DiscreteSystem::make_unforced("cubic", Chart::euclidean(1), [h](const auto& q0, const auto& q1) {
    const auto d = q1[0] - q0[0];
    return d * d * d / (3.0 * h);
  });
}

DiscreteSystem cyclic_space(double m, double h) {
  return DiscreteSystem::make_unforced("cyclic-3d", Chart::euclidean(3), [m, h](const auto& q0, const auto& q1) {
    const auto dx = q1[0] - q0[0];
    const auto dy = q1[1] - q0[1];
    const auto dz = q1[2] - q0[2];
    const auto x = 0.5 * (q0[0] + q1[0]);
    const auto y = 0.5 * (q0[1] + q1[1]);
    const auto w = 0.5 * (x * x + 2.0 * y * y) + 0.1 * x * x * y;
    return (m / (2.0 * h)) * (dx * dx + dy * dy + dz * dz) - h * w;
  });
}

}  // namespace routhe::systems
