#include "routhe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "routhe/errors.hpp"

namespace routhe {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  Matrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Matrix& Matrix::operator+=(const Matrix& o) {
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (auto& x : data_) x *= s;
  return *this;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double Matrix::norm1() const {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

Vec Matrix::apply(std::span<const double> x) const {
  Vec y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
  return y;
}

double Matrix::bilinear(std::span<const double> u, std::span<const double> v) const {
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) s += u[i] * (*this)(i, j) * v[j];
  return s;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator-(Matrix a) { return a *= -1.0; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

Vec operator+(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

Vec operator-(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

Vec operator*(double s, Vec a) {
  for (auto& x : a) x *= s;
  return a;
}

// -- LU -----------------------------------------------------------------------

LU::LU(const Matrix& a) : n_(a.rows()), lu_(a), perm_(a.rows()) {
  if (a.rows() != a.cols()) throw Error("LU: matrix is not square");
  for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;

  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n_; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    }
    if (best == 0.0) {
      exact_zero_pivot_ = true;
      continue;
    }
    if (p != k) {
      for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(perm_[k], perm_[p]);
      sign_ = -sign_;
    }
    for (std::size_t i = k + 1; i < n_; ++i) {
      lu_(i, k) /= lu_(k, k);
      const double lik = lu_(i, k);
      for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= lik * lu_(k, j);
    }
  }

  if (exact_zero_pivot_ || n_ == 0) {
    condition_ = n_ == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    singular_ = n_ != 0;
    return;
  }
  // n is tiny, so the exact 1-norm of the inverse is affordable.
  Matrix inv(n_, n_);
  Vec e(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    Vec col = solve_unchecked(e);
    for (std::size_t i = 0; i < n_; ++i) inv(i, j) = col[i];
  }
  condition_ = a.norm1() * inv.norm1();
  singular_ = !std::isfinite(condition_) || condition_ > kSingularCondition;
}

double LU::determinant() const {
  if (exact_zero_pivot_) return 0.0;
  double det = sign_;
  for (std::size_t i = 0; i < n_; ++i) det *= lu_(i, i);
  return det;
}

Vec LU::solve_unchecked(std::span<const double> b) const {
  Vec x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
  for (std::size_t i = n_; i-- > 0;) {
    for (std::size_t j = i + 1; j < n_; ++j) x[i] -= lu_(i, j) * x[j];
    x[i] /= lu_(i, i);
  }
  return x;
}

Vec LU::solve(std::span<const double> b) const {
  if (singular_) throw SingularJacobian("LU::solve on a singular matrix", condition_);
  return solve_unchecked(b);
}

Matrix LU::solve(const Matrix& b) const {
  Matrix x(b.rows(), b.cols());
  Vec col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    Vec s = solve(col);
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = s[i];
  }
  return x;
}

Matrix LU::inverse() const { return solve(Matrix::identity(n_)); }

bool invertible(const Matrix& a) { return !LU(a).singular(); }

}  // namespace routhe
