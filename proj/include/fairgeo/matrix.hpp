#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fairgeo {

using Vector = std::vector<double>;

/// Small dense row-major matrix. Sized for the handful-of-symbols alphabets this
/// library works with; no blocking, no expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Row-wise literal: Matrix{{a, b}, {c, d}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  /// Builds a matrix whose j-th column is columns[j].
  static Matrix from_columns(const std::vector<Vector>& columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Vector column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);
  Vector row(std::size_t r) const;

  Matrix transpose() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_norm(std::span<const double> a);
Vector scaled(std::span<const double> a, double s);
/// a + s * b
Vector axpy(std::span<const double> a, double s, std::span<const double> b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double max_abs_diff(const Matrix& a, const Matrix& b);

/// LU factorization with partial pivoting.
class LuDecomposition {
 public:
  explicit LuDecomposition(const Matrix& a);

  double determinant() const;
  /// Throws ConditioningError when a pivot is exactly zero.
  Matrix inverse() const;
  Vector solve(std::span<const double> b) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
};

double determinant(const Matrix& a);
Matrix inverse(const Matrix& a);

}  // namespace fairgeo
