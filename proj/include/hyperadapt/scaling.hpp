#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "hyperadapt/vec.hpp"

// The four parametrizations of the learnable scaling matrix: diagonal,
// block-diagonal, banded, dense. Storage is the flat parameter array in a
// fixed canonical order so that serialization and gradient indexing agree:
//   diagonal        omega_1..omega_n (row order)
//   block_diagonal  blocks in order, each row-major
//   banded          row-major over the band (|i-j| <= d)
//   dense           row-major

namespace hyperadapt {

enum class MatrixKind { diagonal, block_diagonal, banded, dense };

inline const char* to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::diagonal: return "diagonal";
    case MatrixKind::block_diagonal: return "block";
    case MatrixKind::banded: return "banded";
    case MatrixKind::dense: return "dense";
  }
  return "unknown";
}

inline MatrixKind kind_from_string(std::string_view s) {
  if (s == "diagonal") return MatrixKind::diagonal;
  if (s == "block" || s == "block_diagonal") return MatrixKind::block_diagonal;
  if (s == "banded") return MatrixKind::banded;
  if (s == "dense") return MatrixKind::dense;
  throw std::invalid_argument("unknown matrix kind: " + std::string(s));
}

struct ScalingOperator {
  MatrixKind kind = MatrixKind::diagonal;
  std::size_t dim = 0;
  std::size_t block_size = 0;  // block_diagonal only
  std::size_t bandwidth = 0;   // banded only
  Vec params;
};

namespace detail {

inline void check_structure(MatrixKind kind, std::size_t dim,
                            std::size_t block_size, std::size_t bandwidth) {
  if (dim == 0) throw std::invalid_argument("scaling matrix dimension must be >= 1");
  switch (kind) {
    case MatrixKind::block_diagonal:
      if (block_size == 0 || dim % block_size != 0)
        throw std::invalid_argument("dim must be divisible by block_size");
      if (bandwidth != 0)
        throw std::invalid_argument("bandwidth is not a block_diagonal parameter");
      break;
    case MatrixKind::banded:
      if (bandwidth >= dim)
        throw std::invalid_argument("bandwidth must satisfy d < n");
      if (block_size != 0)
        throw std::invalid_argument("block_size is not a banded parameter");
      break;
    default:
      if (block_size != 0 || bandwidth != 0)
        throw std::invalid_argument("structural parameters only apply to block/banded kinds");
  }
}

// Width of the band in row i.
inline std::size_t band_row_width(std::size_t n, std::size_t d, std::size_t i) {
  const std::size_t lo = i >= d ? i - d : 0;
  const std::size_t hi = std::min(n - 1, i + d);
  return hi - lo + 1;
}

}  // namespace detail

inline std::size_t param_count(MatrixKind kind, std::size_t dim,
                               std::size_t block_size = 0,
                               std::size_t bandwidth = 0) {
  detail::check_structure(kind, dim, block_size, bandwidth);
  switch (kind) {
    case MatrixKind::diagonal: return dim;
    case MatrixKind::block_diagonal: return dim * block_size;
    case MatrixKind::banded:
      // entries with |i-j| <= d: n(2d+1) - d(d+1)
      return dim * (2 * bandwidth + 1) - bandwidth * (bandwidth + 1);
    case MatrixKind::dense: return dim * dim;
  }
  throw std::invalid_argument("unknown matrix kind");
}

inline std::size_t param_count(const ScalingOperator& op) {
  return param_count(op.kind, op.dim, op.block_size, op.bandwidth);
}

// Visit every parameter with its matrix position, in canonical order. This
// is the single definition of the layout; to_dense, gathers and the
// serialization code all run through it.
template <typename Fn>
void for_each_param_position(const ScalingOperator& op, Fn&& fn) {
  const std::size_t n = op.dim;
  std::size_t k = 0;
  switch (op.kind) {
    case MatrixKind::diagonal:
      for (std::size_t i = 0; i < n; ++i) fn(k++, i, i);
      break;
    case MatrixKind::block_diagonal: {
      const std::size_t b = op.block_size;
      for (std::size_t blk = 0; blk < n / b; ++blk)
        for (std::size_t i = 0; i < b; ++i)
          for (std::size_t j = 0; j < b; ++j) fn(k++, blk * b + i, blk * b + j);
      break;
    }
    case MatrixKind::banded: {
      const std::size_t d = op.bandwidth;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= d ? i - d : 0;
        const std::size_t hi = std::min(n - 1, i + d);
        for (std::size_t j = lo; j <= hi; ++j) fn(k++, i, j);
      }
      break;
    }
    case MatrixKind::dense:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) fn(k++, i, j);
      break;
  }
}

inline ScalingOperator make_operator(MatrixKind kind, std::size_t dim,
                                     std::size_t block_size,
                                     std::size_t bandwidth, Vec params) {
  const std::size_t expect = param_count(kind, dim, block_size, bandwidth);
  if (params.size() != expect)
    throw std::invalid_argument("parameter array has wrong length for this structure");
  if (!all_finite(params))
    throw std::invalid_argument("parameters must be finite");
  return ScalingOperator{kind, dim, block_size, bandwidth, std::move(params)};
}

// Identity initialization: the adapter is a no-op at step 0.
inline ScalingOperator init_identity(MatrixKind kind, std::size_t dim,
                                     std::size_t block_size = 0,
                                     std::size_t bandwidth = 0) {
  ScalingOperator op{kind, dim, block_size, bandwidth,
                     Vec(param_count(kind, dim, block_size, bandwidth), 0.0)};
  for_each_param_position(op, [&](std::size_t k, std::size_t i, std::size_t j) {
    if (i == j) op.params[k] = 1.0;
  });
  return op;
}

// Structure-exploiting matrix-vector product: O(n) diagonal, O(n*b) block,
// O(n*d) banded.
inline Vec matvec(const ScalingOperator& op, std::span<const double> x) {
  if (x.size() != op.dim) throw std::invalid_argument("matvec dimension mismatch");
  const std::size_t n = op.dim;
  Vec y(n, 0.0);
  switch (op.kind) {
    case MatrixKind::diagonal:
      for (std::size_t i = 0; i < n; ++i) y[i] = op.params[i] * x[i];
      break;
    case MatrixKind::block_diagonal: {
      const std::size_t b = op.block_size;
      for (std::size_t blk = 0; blk < n / b; ++blk) {
        const double* block = op.params.data() + blk * b * b;
        for (std::size_t i = 0; i < b; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < b; ++j) s += block[i * b + j] * x[blk * b + j];
          y[blk * b + i] = s;
        }
      }
      break;
    }
    case MatrixKind::banded: {
      const std::size_t d = op.bandwidth;
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= d ? i - d : 0;
        const std::size_t hi = std::min(n - 1, i + d);
        double s = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) s += op.params[k++] * x[j];
        y[i] = s;
      }
      break;
    }
    case MatrixKind::dense:
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = op.params.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
        y[i] = s;
      }
      break;
  }
  return y;
}

// Reference path: structural zeros are exactly 0.0. Used by tests, reports
// and the gradient gather, never on the hot path.
inline Matrix to_dense(const ScalingOperator& op) {
  Matrix m(op.dim, op.dim);
  for_each_param_position(op, [&](std::size_t k, std::size_t i, std::size_t j) {
    m(i, j) = op.params[k];
  });
  return m;
}

// Pull the entries of a dense gradient back into the canonical parameter
// order; structurally-zero positions are never touched.
inline Vec gather_structural(const ScalingOperator& op, const Matrix& dense) {
  if (dense.rows != op.dim || dense.cols != op.dim)
    throw std::invalid_argument("gather_structural shape mismatch");
  Vec out(param_count(op), 0.0);
  for_each_param_position(op, [&](std::size_t k, std::size_t i, std::size_t j) {
    out[k] = dense(i, j);
  });
  return out;
}

}  // namespace hyperadapt
