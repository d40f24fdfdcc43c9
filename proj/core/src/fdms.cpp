#include "routhe/fdms.hpp"

#include <exception>
#include <string>
#include <utility>

#include "routhe/errors.hpp"

namespace routhe {

DiscreteSystem DiscreteSystem::make(std::string name, Chart chart, ScalarField2 lagrangian,
                                    CovectorField2 force_minus, CovectorField2 force_plus) {
  DiscreteSystem s;
  s.name = std::move(name);
  s.chart = std::move(chart);
  s.lagrangian = std::move(lagrangian);
  s.force_minus = std::move(force_minus);
  s.force_plus = std::move(force_plus);
  return s;
}

DiscreteSystem DiscreteSystem::make_unforced(std::string name, Chart chart, ScalarField2 lagrangian) {
  const std::size_t n = chart.dim;
  DiscreteSystem s = make(std::move(name), std::move(chart), std::move(lagrangian),
                          CovectorField2::zero(n), CovectorField2::zero(n));
  s.unforced_ = true;
  return s;
}

Vec legendre_plus(const DiscreteSystem& sys, const Vec& q0, const Vec& q1) {
  sys.chart.require(q0, "q0");
  sys.chart.require(q1, "q1");
  Vec p = d2(sys.lagrangian, q0, q1);
  const Vec f = sys.force_plus(q0, q1);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += f[i];
  return p;
}

Vec legendre_minus(const DiscreteSystem& sys, const Vec& q0, const Vec& q1) {
  sys.chart.require(q0, "q0");
  sys.chart.require(q1, "q1");
  Vec p = d1(sys.lagrangian, q0, q1);
  const Vec f = sys.force_minus(q0, q1);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = -p[i] - f[i];
  return p;
}

Vec del_residual(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, const Vec& q2) {
  return legendre_plus(sys, q0, q1) - legendre_minus(sys, q1, q2);
}

ForceJacobians force_jacobians(const DiscreteSystem& sys, const Vec& q0, const Vec& q1) {
  if (sys.unforced()) {
    const std::size_t n = sys.dim();
    return {Matrix(n, n), Matrix(n, n), Matrix(n, n), Matrix(n, n)};
  }
  return {jacobian(sys.force_minus, Slot::First, q0, q1), jacobian(sys.force_minus, Slot::Second, q0, q1),
          jacobian(sys.force_plus, Slot::First, q0, q1), jacobian(sys.force_plus, Slot::Second, q0, q1)};
}

RegularityMatrices regularity_matrices(const DiscreteSystem& sys, const Vec& q0, const Vec& q1) {
  sys.chart.require(q0, "q0");
  sys.chart.require(q1, "q1");
  const Matrix m = d1d2(sys.lagrangian, q0, q1);
  RegularityMatrices r;
  if (sys.unforced()) {
    r.b_plus = m;
    r.b_minus = -m.transpose();
  } else {
    r.b_plus = m + jacobian(sys.force_plus, Slot::First, q0, q1);
    r.b_minus = -m.transpose() - jacobian(sys.force_minus, Slot::Second, q0, q1);
  }
  r.is_regular = invertible(r.b_plus) && invertible(r.b_minus);
  return r;
}

Matrix newton_matrix(const DiscreteSystem& sys, const Vec& q1, const Vec& q2) {
  Matrix j = d1d2(sys.lagrangian, q1, q2).transpose();
  if (!sys.unforced()) j += jacobian(sys.force_minus, Slot::Second, q1, q2);
  return j;
}

StepResult step(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, const SolverConfig& cfg) {
  sys.chart.require(q0, "q0");
  sys.chart.require(q1, "q1");
  const Vec p = legendre_plus(sys, q0, q1);

  Vec q2(q1.size());
  for (std::size_t i = 0; i < q1.size(); ++i) q2[i] = 2.0 * q1[i] - q0[i];

  double res = 0.0;
  for (int it = 0;; ++it) {
    sys.chart.require(q2, "Newton iterate q2");
    const Vec r = p - legendre_minus(sys, q1, q2);
    res = norm_inf(r);
    if (res <= cfg.tol) return {q2, {it, res}};
    if (it == cfg.max_iter)
      throw NonConvergence("step: Newton did not converge in " + std::to_string(cfg.max_iter) +
                               " iterations (residual " + std::to_string(res) + ")",
                           it, res);
    const LU lu(newton_matrix(sys, q1, q2));
    if (lu.singular())
      throw SingularJacobian("step: Newton matrix is singular (condition " +
                                 std::to_string(lu.condition()) + ")",
                             lu.condition());
    const Vec dq = lu.solve(r);
    for (std::size_t i = 0; i < q2.size(); ++i) q2[i] -= cfg.damping * dq[i];
  }
}

Trajectory run(const DiscreteSystem& sys, const Vec& q0, const Vec& q1, std::size_t n_steps,
               const SolverConfig& cfg) {
  Trajectory traj;
  traj.points.reserve(n_steps + 2);
  traj.diagnostics.reserve(n_steps);
  traj.points.push_back(q0);
  traj.points.push_back(q1);
  for (std::size_t k = 0; k < n_steps; ++k) {
    try {
      StepResult s = step(sys, traj.points[k], traj.points[k + 1], cfg);
      traj.points.push_back(std::move(s.q2));
      traj.diagnostics.push_back(s.diag);
    } catch (const Error& e) {
      std::throw_with_nested(
          StepFailure("run: step " + std::to_string(k) + " failed: " + e.what(), k));
    }
  }
  return traj;
}

}  // namespace routhe
