#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hyperadapt {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(std::span<const double> v) { return dot(v, v); }

inline double norm(std::span<const double> v) { return std::sqrt(norm_sq(v)); }

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline Vec scaled(std::span<const double> v, double k) {
  Vec out(v.begin(), v.end());
  for (double& x : out) x *= k;
  return out;
}

// Dense row-major matrix. Columns are the unit of work in the adapter, so a
// couple of column helpers are provided.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Matrix(std::size_t r, std::size_t c, Vec values)
      : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != rows * cols)
      throw std::invalid_argument("matrix data size does not match shape");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  Vec col(std::size_t j) const {
    Vec out(rows);
    for (std::size_t i = 0; i < rows; ++i) out[i] = data[i * cols + j];
    return out;
  }

  void set_col(std::size_t j, std::span<const double> v) {
    for (std::size_t i = 0; i < rows; ++i) data[i * cols + j] = v[i];
  }

  Vec matvec(std::span<const double> x) const {
    if (x.size() != cols) throw std::invalid_argument("matvec dimension mismatch");
    Vec y(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      double s = 0.0;
      const double* row = data.data() + i * cols;
      for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
      y[i] = s;
    }
    return y;
  }

  Matrix matmul(const Matrix& other) const {
    if (cols != other.rows) throw std::invalid_argument("matmul dimension mismatch");
    Matrix out(rows, other.cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < cols; ++k) {
        const double a = (*this)(i, k);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < other.cols; ++j) out(i, j) += a * other(k, j);
      }
    return out;
  }
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace hyperadapt
