#pragma once

// Small dense linear algebra: every system in this library has n <= 8, and
// two-forms live on Q x Q (2n <= 16). Row-major storage, value semantics.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace routhe {

using Vec = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transpose() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  /// Largest absolute entry.
  double max_abs() const;
  /// Induced 1-norm (max column sum).
  double norm1() const;

  Vec apply(std::span<const double> x) const;
  /// uᵀ M v
  double bilinear(std::span<const double> u, std::span<const double> v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);

double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double norm_inf(std::span<const double> x);

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec a);

/// Dense LU factorization with partial pivoting.
///
/// A matrix is declared singular when a pivot vanishes or when the 1-norm
/// condition number exceeds `kSingularCondition`.
class LU {
 public:
  static constexpr double kSingularCondition = 1e12;

  explicit LU(const Matrix& a);

  bool singular() const { return singular_; }
  /// κ₁(A) = ‖A‖₁‖A⁻¹‖₁; +inf for exactly singular input.
  double condition() const { return condition_; }
  double determinant() const;

  Vec solve(std::span<const double> b) const;
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;

 private:
  Vec solve_unchecked(std::span<const double> b) const;

  std::size_t n_;
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool exact_zero_pivot_ = false;
  bool singular_ = false;
  double condition_ = 0.0;
};

/// True when `a` is numerically invertible under the LU threshold.
bool invertible(const Matrix& a);

}  // namespace routhe
