#pragma once

// Derivatives of fields on Q x Q. The default backend is forward-mode dual
// arithmetic (exact to rounding); central finite differences are available
// as an independent cross-check.
//
// Matrix layouts:
//   d1d2(F)(i, j)            = ∂²F / ∂q0^j ∂q1^i
//   d2d1(F)(i, j)            = ∂²F / ∂q1^j ∂q0^i      (= d1d2ᵀ)
//   hessian(F)               = 2n x 2n, variables ordered (q0, q1)
//   jacobian(f, slot)(i, j)  = ∂f_i / ∂q_slot^j

#include <cstddef>
#include <string>

#include "routhe/chart.hpp"
#include "routhe/field.hpp"
#include "routhe/linalg.hpp"

namespace routhe {

enum class Backend { Dual, FiniteDifference };

struct DiffOptions {
  Backend backend = Backend::Dual;
  /// Checked for the base points and, with finite differences, every probe.
  const Chart* chart = nullptr;
  /// Finite-difference step; 0 selects eps^(1/3)·max(1,|x|) (eps^(1/4) for
  /// second derivatives).
  double fd_step = 0.0;
};

enum class Slot { First = 0, Second = 1 };

Vec d1(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt = {});
Vec d2(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt = {});
/// (d1 F, d2 F) concatenated.
Vec gradient(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt = {});

Matrix d1d2(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt = {});
Matrix d2d1(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt = {});
Matrix hessian(const ScalarField2& F, const Vec& q0, const Vec& q1, const DiffOptions& opt = {});

Matrix jacobian(const CovectorField2& f, Slot slot, const Vec& q0, const Vec& q1,
                const DiffOptions& opt = {});
Matrix jacobian(const CovectorField1& f, const Vec& q, const DiffOptions& opt = {});

// -- generic kernels -----------------------------------------------------------
// Usable at any tower level T whose Dual<T> is still in the tower, which lets
// derived fields differentiate their ingredients inside their own evaluation.

/// ∂F/∂q_slot at scalar type T.
template <class T>
Point<T> partial(const ScalarField2& F, Slot slot, const Point<T>& q0, const Point<T>& q1) {
  auto a = raise(q0);
  auto b = raise(q1);
  auto& x = slot == Slot::First ? a : b;
  Point<T> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j].d = T(1.0);
    out[j] = F(a, b).d;
    x[j].d = T(0.0);
  }
  return out;
}

/// dF(q0,q1)·(u0,u1) at scalar type T.
template <class T>
T directional(const ScalarField2& F, const Point<T>& q0, const Point<T>& q1, const Point<T>& u0,
              const Point<T>& u1) {
  auto a = raise(q0);
  auto b = raise(q1);
  for (std::size_t j = 0; j < a.size(); ++j) a[j].d = u0[j];
  for (std::size_t j = 0; j < b.size(); ++j) b[j].d = u1[j];
  return F(a, b).d;
}

}  // namespace routhe
