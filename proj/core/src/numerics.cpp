#include "eigenbench/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "eigenbench/error.hpp"

namespace eigenbench {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) {
      throw Error(ErrorKind::invalid_input, "from_rows: ragged row literal");
    }
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::from_columns(std::span<const Vector> columns) {
  if (columns.empty()) return {};
  Matrix m(columns.front().size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != m.rows()) {
      throw Error(ErrorKind::dimension_mismatch, "from_columns: columns differ in length");
    }
    std::copy(columns[j].begin(), columns[j].end(), m.column(j).begin());
  }
  return m;
}

Matrix Matrix::leading_columns(std::size_t count) const {
  count = std::min(count, cols_);
  Matrix m(rows_, count);
  std::copy_n(data_.begin(), rows_ * count, m.data_.begin());
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::dimension_mismatch, "dot: length mismatch");
  }
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

double squared_norm(std::span<const double> v) { return dot(v, v); }

double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

double frobenius_norm(const Matrix& m) { return norm(m.data()); }

double trace(const Matrix& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) t += m(i, i);
  return t;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) t(j, i) = m(i, j);
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream msg;
    msg << "multiply: inner dimensions differ (" << a.rows() << "x" << a.cols() << " * "
        << b.rows() << "x" << b.cols() << ")";
    throw Error(ErrorKind::dimension_mismatch, msg.str());
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto out = c.column(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double w = b(k, j);
      if (w == 0.0) continue;
      auto in = a.column(k);
      for (std::size_t i = 0; i < a.rows(); ++i) out[i] += w * in[i];
    }
  }
  return c;
}

Matrix gram_matrix(const Matrix& a) {
  if (a.empty()) {
    throw Error(ErrorKind::invalid_input, "gram_matrix: input has a zero dimension");
  }
  const std::size_t m = a.cols();
  Matrix l(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double v = dot(a.column(i), a.column(j));
      l(i, j) = v;
      l(j, i) = v;
    }
  }
  return l;
}

namespace {

// Square root of the summed squares of the strictly off-diagonal entries of
// an n x n row-major work matrix.
double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) sum += a[p * n + q] * a[p * n + q];
  return std::sqrt(2.0 * sum);
}

void validate_symmetric(const Matrix& s) {
  if (s.empty()) throw Error(ErrorKind::invalid_input, "sym_eig: empty matrix");
  if (s.rows() != s.cols()) {
    std::ostringstream msg;
    msg << "sym_eig: matrix is " << s.rows() << "x" << s.cols() << ", expected square";
    throw Error(ErrorKind::invalid_input, msg.str());
  }
  for (double v : s.data()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "sym_eig: non-finite entry");
  }
  const double scale = frobenius_norm(s);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j)
      worst = std::max(worst, std::abs(s(i, j) - s(j, i)));
  if (worst > 1e-9 * scale) {
    std::ostringstream msg;
    msg << "sym_eig: matrix is not symmetric (max |s_ij - s_ji| = " << worst
        << ", ||S||_F = " << scale << ")";
    throw Error(ErrorKind::invalid_input, msg.str());
  }
}

}  // namespace

EigenPairs sym_eig(const Matrix& s, const SymEigOptions& options) {
  validate_symmetric(s);
  const std::size_t n = s.rows();

  // Row-major work copy with both triangles set to their average.
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = 0.5 * (s(i, j) + s(j, i));
  Matrix v = Matrix::identity(n);

  const double target = options.relative_tolerance * frobenius_norm(s);
  double off = off_diagonal_norm(a, n);
  int sweep = 0;
  while (off > target) {
    if (sweep == options.max_sweeps) {
      std::ostringstream msg;
      msg << "sym_eig: no convergence after " << sweep << " sweeps; off-diagonal mass " << off
          << " exceeds target " << target;
      throw ConvergenceError(msg.str(), off);
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - sn * akq;
          a[k * n + q] = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - sn * aqk;
          a[q * n + k] = sn * apk + c * aqk;
        }
        a[p * n + p] = app - t * apq;
        a[q * n + q] = aqq + t * apq;
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;

        auto vp = v.column(p);
        auto vq = v.column(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double x = vp[k];
          const double y = vq[k];
          vp[k] = c * x - sn * y;
          vq[k] = sn * x + c * y;
        }
      }
    }
    ++sweep;
    off = off_diagonal_norm(a, n);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i * n + i] > a[j * n + j]; });

  EigenPairs out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a[order[k] * n + order[k]];
    auto src = v.column(order[k]);
    std::copy(src.begin(), src.end(), out.vectors.column(k).begin());
  }
  return out;
}

}  // namespace eigenbench
