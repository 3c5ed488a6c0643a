#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace eigenbench {

using Vector = std::vector<double>;

/// Dense real matrix with column-major storage: column j occupies the
/// contiguous range [j * rows, (j + 1) * rows).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);
  /// Row-wise literal, handy in tests: from_rows({{1, 0}, {1, 1}}).
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix from_columns(std::span<const Vector> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[c * rows_ + r]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[c * rows_ + r]; }

  std::span<double> column(std::size_t c) noexcept { return {data_.data() + c * rows_, rows_}; }
  std::span<const double> column(std::size_t c) const noexcept {
    return {data_.data() + c * rows_, rows_};
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  /// Keeps the first `count` columns.
  Matrix leading_columns(std::size_t count) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Eigenvalues sorted non-increasing (ties keep original index order) with
/// unit eigenvectors stored as the matching columns of `vectors`.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

struct SymEigOptions {
  /// Converged once the off-diagonal Frobenius mass is below
  /// relative_tolerance * ||S||_F.
  double relative_tolerance = 1e-12;
  int max_sweeps = 100;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> v);
double norm(std::span<const double> v);
double frobenius_norm(const Matrix& m);
double trace(const Matrix& m);

Matrix transpose(const Matrix& m);
Matrix multiply(const Matrix& a, const Matrix& b);

/// L = A^T A. Entry (i, j) is the dot product of columns i and j of A.
Matrix gram_matrix(const Matrix& a);

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Throws Error(invalid_input) for empty, non-square, non-finite or
/// asymmetric input, and ConvergenceError after options.max_sweeps sweeps.
EigenPairs sym_eig(const Matrix& s, const SymEigOptions& options = {});

}  // namespace eigenbench
