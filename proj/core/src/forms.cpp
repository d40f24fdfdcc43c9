#include "routhe/forms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "routhe/errors.hpp"

namespace routhe {
namespace {

Matrix assemble(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
  const std::size_t n = a.rows();
  Matrix m(2 * n, 2 * n);
  m.set_block(0, 0, a);
  m.set_block(0, n, b);
  m.set_block(n, 0, c);
  m.set_block(n, n, d);
  return m;
}

Matrix antisym(const Matrix& a) { return a - a.transpose(); }

TwoFormMatrix make_form(const Vec& q0, const Vec& q1, Matrix m) { return TwoFormMatrix{q0, q1, std::move(m)}; }

double radical_inverse(std::size_t i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

double TwoFormMatrix::antisymmetry_defect() const { return (m + m.transpose()).max_abs(); }

TwoFormMatrix omega_Ld(const DiscreteSystem& sys, const Vec& q0, const Vec& q1) {
  const Matrix c = d1d2(sys.lagrangian, q0, q1);
  const std::size_t n = sys.dim();
  return make_form(q0, q1, assemble(Matrix(n, n), -c.transpose(), c, Matrix(n, n)));
}

TwoFormMatrix omega_f_plus(const DiscreteSystem& sys, const Vec& q0, const Vec& q1) {
  const std::size_t n = sys.dim();
  const ForceJacobians fj = force_jacobians(sys, q0, q1);
  const Matrix p0 = d1d2(sys.lagrangian, q0, q1) + fj.plus_0;
  return make_form(q0, q1, assemble(Matrix(n, n), -p0.transpose(), p0, antisym(fj.plus_1)));
}

TwoFormMatrix omega_f_minus(const DiscreteSystem& sys, const Vec& q0, const Vec& q1) {
  const std::size_t n = sys.dim();
  const ForceJacobians fj = force_jacobians(sys, q0, q1);
  const Matrix n1 = -d1d2(sys.lagrangian, q0, q1).transpose() - fj.minus_1;
  return make_form(q0, q1, assemble(-antisym(fj.minus_0), n1, -n1.transpose(), Matrix(n, n)));
}

Matrix df_matrix(const DiscreteSystem& sys, const Vec& q0, const Vec& q1) {
  const ForceJacobians fj = force_jacobians(sys, q0, q1);
  const Matrix jac = assemble(fj.minus_0, fj.minus_1, fj.plus_0, fj.plus_1);
  return jac.transpose() - jac;
}

TwoFormMatrix omega_plus_pullback(const DiscreteSystem& sys, const Vec& q0, const Vec& q1) {
  // (q0,q1) ↦ (q, p) = (q1, 𝔽⁺(q0,q1)); canonical form dq ∧ dp.
  const std::size_t n = sys.dim();
  const ScalarField2& L = sys.lagrangian;
  const CovectorField2& fp = sys.force_plus;
  const CovectorField2 legendre([L, fp](const auto& a, const auto& b) -> std::decay_t<decltype(a)> {
    using T = typename std::decay_t<decltype(a)>::value_type;
    if constexpr (!has_headroom_v<T>) throw_tower_exhausted("omega_plus_pullback");
    else {
      auto p = partial(L, Slot::Second, a, b);
      const auto f = fp(a, b);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += f[i];
      return p;
    }
  });
  Matrix t(2 * n, 2 * n);
  t.set_block(0, n, Matrix::identity(n));
  t.set_block(n, 0, jacobian(legendre, Slot::First, q0, q1));
  t.set_block(n, n, jacobian(legendre, Slot::Second, q0, q1));
  Matrix canonical(2 * n, 2 * n);
  canonical.set_block(0, n, Matrix::identity(n));
  canonical.set_block(n, 0, -Matrix::identity(n));
  return make_form(q0, q1, t.transpose() * canonical * t);
}

Matrix exterior_derivative_fd(const std::function<Vec(const Vec&)>& theta, const Vec& x, double step) {
  const std::size_t d = x.size();
  Matrix jac(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    Vec xp = x, xm = x;
    xp[a] += step;
    xm[a] -= step;
    const Vec tp = theta(xp), tm = theta(xm);
    for (std::size_t i = 0; i < d; ++i) jac(i, a) = (tp[i] - tm[i]) / (2.0 * step);
  }
  return jac.transpose() - jac;
}

double exterior_derivative_3_fd(const std::function<Matrix(const Vec&)>& beta, const Vec& x, double step) {
  const std::size_t d = x.size();
  std::vector<Matrix> grad(d);
  for (std::size_t a = 0; a < d; ++a) {
    Vec xp = x, xm = x;
    xp[a] += step;
    xm[a] -= step;
    grad[a] = (1.0 / (2.0 * step)) * (beta(xp) - beta(xm));
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b)
      for (std::size_t c = b + 1; c < d; ++c) {
        const double v = grad[a](b, c) - grad[b](a, c) + grad[c](a, b);
        worst = std::max(worst, std::abs(v));
      }
  return worst;
}

Matrix df_matrix_fd(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, double step) {
  const std::size_t n = sys.dim();
  auto theta = [&sys, n](const Vec& z) {
    Vec a(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
    Vec b(z.begin() + static_cast<std::ptrdiff_t>(n), z.end());
    Vec out = sys.force_minus(a, b);
    const Vec fp = sys.force_plus(a, b);
    out.insert(out.end(), fp.begin(), fp.end());
    return out;
  };
  Vec z(q0);
  z.insert(z.end(), q1.begin(), q1.end());
  return exterior_derivative_fd(theta, z, step);
}

// -- Routh ---------------------------------------------------------------------------

std::vector<ProbePair> halton_probes(std::size_t n, std::size_t count, const Vec& lo, const Vec& hi) {
  if (2 * n > std::size(kPrimes)) throw Error("halton_probes: dimension too large");
  std::vector<ProbePair> out;
  out.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    ProbePair p{Vec(n), Vec(n)};
    for (std::size_t i = 0; i < n; ++i) {
      p.q0[i] = lo[i] + (hi[i] - lo[i]) * radical_inverse(k, kPrimes[i]);
      p.q1[i] = lo[i] + (hi[i] - lo[i]) * radical_inverse(k, kPrimes[n + i]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

RouthCertificate detect_routh(const DiscreteSystem& sys, const RouthOptions& opt) {
  const std::size_t n = sys.dim();
  Vec lo = opt.lo, hi = opt.hi;
  if (lo.empty()) {
    lo.assign(n, -1.0);
    hi.assign(n, 1.0);
    for (std::size_t k : sys.chart.positive) {
      lo[k] = 0.5;
      hi[k] = 1.5;
    }
  }
  return detect_routh(sys, halton_probes(n, opt.n_probes, lo, hi), opt);
}

RouthCertificate detect_routh(const DiscreteSystem& sys, const std::vector<ProbePair>& probes,
                              const RouthOptions& opt) {
  if (probes.empty()) return detect_routh(sys, opt);
  RouthCertificate cert;
  cert.tol = opt.tol;
  auto& c = cert.condition_violation;
  auto& lit = cert.literal_violation;

  const std::size_t m = probes.size();
  for (std::size_t k = 0; k < m; ++k) {
    const Vec& q0 = probes[k].q0;
    const Vec& q1 = probes[k].q1;
    const ProbePair& alt = probes[(k + 1) % m];

    const ForceJacobians here = force_jacobians(sys, q0, q1);
    const ForceJacobians moved1 = force_jacobians(sys, q0, alt.q1);  // q1 changed
    const ForceJacobians moved0 = force_jacobians(sys, alt.q0, q1);  // q0 changed
    const ForceJacobians swapped = force_jacobians(sys, q1, q0);

    const double c1 = max_abs_diff(here.plus_0, here.minus_1.transpose());
    c[0] = std::max(c[0], c1);
    lit[0] = std::max(lit[0], c1);

    // β⁻(q0) from f⁻ must not see q1; β⁺(q1) from f⁺ must not see q0.
    const Matrix bm_here = antisym(here.minus_0.transpose());
    const Matrix bp_here = antisym(here.plus_1);
    c[1] = std::max({c[1], max_abs_diff(bm_here, antisym(moved1.minus_0.transpose())),
                     max_abs_diff(bp_here, antisym(moved0.plus_1))});
    lit[1] = std::max({lit[1], max_abs_diff(here.minus_0, moved1.minus_0),
                       max_abs_diff(here.plus_1, moved0.plus_1)});

    // both at the point q0: β⁻ through f⁻(q0, q1), β⁺ through f⁺(q1, q0)
    const Matrix bp_at_q0 = antisym(swapped.plus_1);
    c[2] = std::max(c[2], max_abs_diff(bm_here, bp_at_q0));
    lit[2] = std::max(lit[2], max_abs_diff(-here.minus_0, swapped.plus_1));
  }

  cert.max_violation = std::max({c[0], c[1], c[2]});
  cert.is_routh = cert.max_violation <= opt.tol;
  if (!cert.is_routh && c[0] <= opt.tol && c[1] <= opt.tol)
    throw InconsistentBeta("detect_routh: the β computed from f⁻ and from f⁺ differ by " +
                           std::to_string(c[2]));

  const DiscreteSystem captured = sys;
  cert.beta = [captured](const Vec& q) {
    const Matrix a = jacobian(captured.force_minus, Slot::First, q, q);
    return a.transpose() - a;
  };
  return cert;
}

TwoFormMatrix omega_plus_corrected(const DiscreteSystem& sys, const RouthCertificate& cert, const Vec& q0,
                                   const Vec& q1) {
  if (!cert.is_routh || !cert.beta)
    throw RequiresRouth("omega_plus_corrected: the force has no Routh certificate");
  TwoFormMatrix w = omega_f_plus(sys, q0, q1);
  const std::size_t n = sys.dim();
  w.m.set_block(n, n, w.second_block() - cert.beta(q1));
  return w;
}

// -- flow ------------------------------------------------------------------------

Matrix flow_jacobian(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, const Vec& q2) {
  const std::size_t n = sys.dim();
  const Matrix h01 = hessian(sys.lagrangian, q0, q1);
  const Matrix h12 = hessian(sys.lagrangian, q1, q2);
  const ForceJacobians f01 = force_jacobians(sys, q0, q1);
  const ForceJacobians f12 = force_jacobians(sys, q1, q2);

  const Matrix j0 = h01.block(n, 0, n, n) + f01.plus_0;
  const Matrix j1 = h01.block(n, n, n, n) + h12.block(0, 0, n, n) + f01.plus_1 + f12.minus_0;
  const Matrix j2 = h12.block(n, 0, n, n).transpose() + f12.minus_1;

  const LU lu(j2);
  if (lu.singular())
    throw SingularJacobian("flow_jacobian: Newton matrix is singular", lu.condition());
  Matrix tf(2 * n, 2 * n);
  tf.set_block(0, n, Matrix::identity(n));
  tf.set_block(n, 0, -lu.solve(j0));
  tf.set_block(n, n, -lu.solve(j1));
  return tf;
}

Matrix flow_jacobian(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, const SolverConfig& cfg) {
  return flow_jacobian(sys, q0, q1, step(sys, q0, q1, cfg).q2);
}

PreservationReport check_preservation(const DiscreteSystem& sys, FormKind kind, const Vec& q0, const Vec& q1,
                                      std::size_t n_steps, const PreservationOptions& opt) {
  if (kind == FormKind::OmegaPlusCorrected && (!opt.certificate || !opt.certificate->is_routh))
    throw RequiresRouth("check_preservation: corrected ω⁺ needs a Routh certificate");

  auto form = [&](const Vec& a, const Vec& b) -> Matrix {
    switch (kind) {
      case FormKind::OmegaLd: return omega_Ld(sys, a, b).m;
      case FormKind::OmegaPlusF: return omega_f_plus(sys, a, b).m;
      case FormKind::OmegaMinusF: return omega_f_minus(sys, a, b).m;
      case FormKind::OmegaPlusCorrected: return omega_plus_corrected(sys, *opt.certificate, a, b).m;
    }
    return {};
  };

  const std::size_t n = sys.dim();
  const Trajectory traj = run(sys, q0, q1, n_steps, opt.solver);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  auto random_unit = [&] {
    Vec u(2 * n);
    for (auto& x : u) x = normal(rng);
    const double s = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
    for (auto& x : u) x /= s;
    return u;
  };
  std::vector<std::pair<Vec, Vec>> pairs;
  for (std::size_t r = 0; r < opt.random_pairs; ++r) {
    Vec u = random_unit();
    Vec v = random_unit();
    pairs.emplace_back(std::move(u), std::move(v));
  }

  PreservationReport rep;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const Vec& a = traj[k];
    const Vec& b = traj[k + 1];
    const Vec& c = traj[k + 2];
    const Matrix tf = flow_jacobian(sys, a, b, c);
    const Matrix old_form = form(a, b);
    const Matrix defect = tf.transpose() * form(b, c) * tf - old_form;
    const double scale = std::max(old_form.max_abs(), 1e-300);

    Matrix predicted(2 * n, 2 * n);
    const bool has_prediction = kind == FormKind::OmegaPlusF || kind == FormKind::OmegaMinusF;
    if (kind == FormKind::OmegaPlusF) predicted = -(tf.transpose() * df_matrix(sys, b, c) * tf);
    if (kind == FormKind::OmegaMinusF) predicted = -df_matrix(sys, a, b);
    const Matrix mismatch = defect - predicted;

    // canonical pairs (e_a, e_b) are the matrix entries
    rep.max_defect = std::max(rep.max_defect, defect.max_abs() / scale);
    if (has_prediction) rep.max_force_mismatch = std::max(rep.max_force_mismatch, mismatch.max_abs() / scale);
    for (const auto& [u, v] : pairs) {
      rep.max_defect = std::max(rep.max_defect, std::abs(defect.bilinear(u, v)) / scale);
      if (has_prediction)
        rep.max_force_mismatch = std::max(rep.max_force_mismatch, std::abs(mismatch.bilinear(u, v)) / scale);
    }
    ++rep.steps;
  }
  return rep;
}

}  // namespace routhe
