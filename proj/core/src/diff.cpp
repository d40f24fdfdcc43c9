#include "routhe/diff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "routhe/errors.hpp"

namespace routhe {
namespace {

const double kEps = std::numeric_limits<double>::epsilon();

double step_for(double x, const DiffOptions& opt, bool second) {
  if (opt.fd_step > 0.0) return opt.fd_step;
  return (second ? std::pow(kEps, 0.25) : std::cbrt(kEps)) * std::max(1.0, std::abs(x));
}

void check_base(const DiffOptions& opt, const Vec& q0, const Vec& q1) {
  if (!opt.chart) return;
  opt.chart->require(q0, "q0");
  opt.chart->require(q1, "q1");
}

void check_probe(const DiffOptions& opt, const Vec& z, std::size_t n, std::size_t var, double h) {
  if (!opt.chart) return;
  std::span<const double> q0(z.data(), n);
  std::span<const double> q1(z.data() + n, n);
  const char* slot = var < n ? "q0" : "q1";
  const std::size_t idx = var < n ? var : var - n;
  std::string what = std::string("finite-difference probe ") + slot + "[" + std::to_string(idx) +
                     "]" + (h > 0 ? "+h" : "-h");
  opt.chart->require(q0, what);
  opt.chart->require(q1, what);
}

Vec concat(const Vec& a, const Vec& b) {
  Vec z(a);
  z.insert(z.end(), b.begin(), b.end());
  return z;
}

double eval_split(const ScalarField2& F, const Vec& z, std::size_t n) {
  Vec a(z.begin(), z.begin() + n), b(z.begin() + n, z.end());
  return F(a, b);
}

Vec eval_split(const CovectorField2& f, const Vec& z, std::size_t n) {
  Vec a(z.begin(), z.begin() + n), b(z.begin() + n, z.end());
  return f(a, b);
}

// ∂F/∂z_var by central differences
double fd_first(const ScalarField2& F, Vec z, std::size_t n, std::size_t var, const DiffOptions& opt) {
  const double x = z[var];
  const double h = step_for(x, opt, false);
  z[var] = x + h;
  check_probe(opt, z, n, var, h);
  const double fp = eval_split(F, z, n);
  z[var] = x - h;
  check_probe(opt, z, n, var, -h);
  const double fm = eval_split(F, z, n);
  return (fp - fm) / (2.0 * h);
}

double fd_second(const ScalarField2& F, Vec z, std::size_t n, std::size_t a, std::size_t b,
                 const DiffOptions& opt) {
  const double ha = step_for(z[a], opt, true);
  const double hb = step_for(z[b], opt, true);
  auto at = [&](double sa, double sb) {
    Vec w = z;
    w[a] += sa * ha;
    w[b] += sb * hb;
    check_probe(opt, w, n, a, sa);
    return eval_split(F, w, n);
  };
  if (a == b) {
    const double h = ha;
    Vec wp = z, wm = z;
    wp[a] += h;
    wm[a] -= h;
    check_probe(opt, wp, n, a, h);
    check_probe(opt, wm, n, a, -h);
    return (eval_split(F, wp, n) - 2.0 * eval_split(F, z, n) + eval_split(F, wm, n)) / (h * h);
  }
  return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * ha * hb);
}

// Mixed second derivative ∂²F/∂z_a∂z_b with nested duals.
double dual_second(const ScalarField2& F, const Vec& z, std::size_t n, std::size_t a, std::size_t b) {
  Point<D2> w;
  w.reserve(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    D1 inner(z[k], k == a ? 1.0 : 0.0);
    D1 outer(k == b ? 1.0 : 0.0, 0.0);
    w.push_back(D2(inner, outer));
  }
  Point<D2> q0(w.begin(), w.begin() + n), q1(w.begin() + n, w.end());
  return F(q0, q1).d.d;
}

}  // namespace

Vec gradient(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt) {
  check_base(opt, q0, q1);
  const std::size_t n = q0.size();
  if (opt.backend == Backend::Dual) {
    Vec g = partial<double>(F, Slot::First, q0, q1);
    Vec g1 = partial<double>(F, Slot::Second, q0, q1);
    g.insert(g.end(), g1.begin(), g1.end());
    return g;
  }
  const Vec z = concat(q0, q1);
  Vec g(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) g[k] = fd_first(F, z, n, k, opt);
  return g;
}

Vec d1(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt) {
  if (opt.backend == Backend::Dual) {
    check_base(opt, q0, q1);
    return partial<double>(F, Slot::First, q0, q1);
  }
  Vec g = gradient(F, q0, q1, opt);
  return Vec(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(q0.size()));
}

Vec d2(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt) {
  if (opt.backend == Backend::Dual) {
    check_base(opt, q0, q1);
    return partial<double>(F, Slot::Second, q0, q1);
  }
  Vec g = gradient(F, q0, q1, opt);
  return Vec(g.begin() + static_cast<std::ptrdiff_t>(q0.size()), g.end());
}

Matrix hessian(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt) {
  check_base(opt, q0, q1);
  const std::size_t n = q0.size();
  const Vec z = concat(q0, q1);
  Matrix H(2 * n, 2 * n);
  for (std::size_t a = 0; a < 2 * n; ++a)
    for (std::size_t b = a; b < 2 * n; ++b) {
      const double v = opt.backend == Backend::Dual ? dual_second(F, z, n, a, b)
                                                    : fd_second(F, z, n, a, b, opt);
      H(a, b) = v;
      H(b, a) = v;
    }
  return H;
}

Matrix d1d2(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt) {
  check_base(opt, q0, q1);
  const std::size_t n = q0.size();
  const Vec z = concat(q0, q1);
  Matrix M(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      M(i, j) = opt.backend == Backend::Dual ? dual_second(F, z, n, j, n + i)
                                             : fd_second(F, z, n, j, n + i, opt);
  return M;
}

Matrix d2d1(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt) {
  check_base(opt, q0, q1);
  const std::size_t n = q0.size();
  const Vec z = concat(q0, q1);
  Matrix M(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      M(i, j) = opt.backend == Backend::Dual ? dual_second(F, z, n, n + j, i)
                                             : fd_second(F, z, n, n + j, i, opt);
  return M;
}

Matrix jacobian(const CovectorField2& f, Slot slot, const Vec& q0, const Vec& q1,
                const DiffOptions& opt) {
  check_base(opt, q0, q1);
  const std::size_t n = q0.size();
  const std::size_t off = slot == Slot::First ? 0 : n;
  if (opt.backend == Backend::Dual) {
    auto a = promote<D1>(q0);
    auto b = promote<D1>(q1);
    auto& x = slot == Slot::First ? a : b;
    Matrix J;
    for (std::size_t j = 0; j < n; ++j) {
      x[j].d = 1.0;
      const Point<D1> r = f(a, b);
      x[j].d = 0.0;
      if (j == 0) J = Matrix(r.size(), n);
      for (std::size_t i = 0; i < r.size(); ++i) J(i, j) = r[i].d;
    }
    return J;
  }
  const Vec z = concat(q0, q1);
  Matrix J;
  for (std::size_t j = 0; j < n; ++j) {
    Vec w = z;
    const double x = w[off + j];
    const double h = step_for(x, opt, false);
    w[off + j] = x + h;
    check_probe(opt, w, n, off + j, h);
    const Vec fp = eval_split(f, w, n);
    w[off + j] = x - h;
    check_probe(opt, w, n, off + j, -h);
    const Vec fm = eval_split(f, w, n);
    if (j == 0) J = Matrix(fp.size(), n);
    for (std::size_t i = 0; i < fp.size(); ++i) J(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  return J;
}

Matrix jacobian(const CovectorField1& f, const Vec& q, const DiffOptions& opt) {
  if (opt.chart) opt.chart->require(q, "q");
  const std::size_t n = q.size();
  Matrix J;
  if (opt.backend == Backend::Dual) {
    auto a = promote<D1>(q);
    for (std::size_t j = 0; j < n; ++j) {
      a[j].d = 1.0;
      const Point<D1> r = f(a);
      a[j].d = 0.0;
      if (j == 0) J = Matrix(r.size(), n);
      for (std::size_t i = 0; i < r.size(); ++i) J(i, j) = r[i].d;
    }
    return J;
  }
  for (std::size_t j = 0; j < n; ++j) {
    Vec w = q;
    const double h = step_for(q[j], opt, false);
    w[j] = q[j] + h;
    if (opt.chart) opt.chart->require(w, "finite-difference probe q[" + std::to_string(j) + "]+h");
    const Vec fp = f(w);
    w[j] = q[j] - h;
    if (opt.chart) opt.chart->require(w, "finite-difference probe q[" + std::to_string(j) + "]-h");
    const Vec fm = f(w);
    if (j == 0) J = Matrix(fp.size(), n);
    for (std::size_t i = 0; i < fp.size(); ++i) J(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  return J;
}

}  // namespace routhe
