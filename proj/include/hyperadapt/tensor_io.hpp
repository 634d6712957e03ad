#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperadapt/scaling.hpp"
#include "hyperadapt/vec.hpp"

// Bit-exact binary tensor container:
//
//   magic   "HYPT"            4 bytes
//   version u8 = 1
//   dtype   u8                0 = float32, 1 = float64
//   rank    u8
//   dims    rank x u64        little-endian
//   payload row-major values  little-endian
//
// Values are held as f64 in memory; an f32 file rounds on write and is
// exact at f32 precision on read-back. Writes are atomic
// (write-temp-then-rename). A plain-CSV import path exists for hand-made
// fixtures.

namespace hyperadapt {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Dtype : std::uint8_t { f32 = 0, f64 = 1 };

struct Tensor {
  Dtype dtype = Dtype::f64;
  std::vector<std::uint64_t> dims;
  Vec values;

  std::uint64_t element_count() const {
    std::uint64_t n = 1;
    for (std::uint64_t d : dims) n *= d;
    return n;
  }
};

namespace detail {

inline void put_u64le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

inline void put_f64le(std::string& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  put_u64le(out, bits);
}

inline void put_f32le(std::string& out, float x) {
  std::uint32_t bits;
  std::memcpy(&bits, &x, 4);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline double get_f64le(const unsigned char* p) {
  const std::uint64_t bits = get_u64le(p);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

inline float get_f32le(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  float x;
  std::memcpy(&x, &bits, 4);
  return x;
}

}  // namespace detail

// Atomic text/binary file write: temp in the same directory, then rename.
inline void atomic_write_file(const std::filesystem::path& path,
                              const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open for write: " + tmp.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw io_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string encode_tensor(const Tensor& t) {
  if (t.values.size() != t.element_count())
    throw io_error("tensor payload does not match dims");
  std::string out;
  out.reserve(7 + 8 * t.dims.size() + 8 * t.values.size());
  out += "HYPT";
  out.push_back(static_cast<char>(1));  // version
  out.push_back(static_cast<char>(t.dtype));
  out.push_back(static_cast<char>(t.dims.size()));
  for (std::uint64_t d : t.dims) detail::put_u64le(out, d);
  if (t.dtype == Dtype::f64) {
    for (double v : t.values) detail::put_f64le(out, v);
  } else {
    for (double v : t.values) detail::put_f32le(out, static_cast<float>(v));
  }
  return out;
}

inline Tensor decode_tensor(const std::string& bytes, const std::string& what) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 7 || std::memcmp(p, "HYPT", 4) != 0)
    throw io_error(what + ": bad magic (expected HYPT)");
  if (p[4] != 1) throw io_error(what + ": unsupported version");
  if (p[5] > 1) throw io_error(what + ": unsupported dtype");
  Tensor t;
  t.dtype = static_cast<Dtype>(p[5]);
  const std::size_t rank = p[6];
  std::size_t off = 7;
  if (bytes.size() < off + 8 * rank) throw io_error(what + ": truncated header");
  for (std::size_t i = 0; i < rank; ++i) {
    t.dims.push_back(detail::get_u64le(p + off));
    off += 8;
  }
  // overflow-safe length check: derive the element count from the actual
  // payload size, then require the dim product to hit it exactly
  const std::size_t esize = t.dtype == Dtype::f64 ? 8 : 4;
  const std::size_t payload = bytes.size() - off;
  if (payload % esize != 0)
    throw io_error(what + ": payload length does not match dims");
  const std::uint64_t count = payload / esize;
  std::uint64_t expect = 1;
  bool overflow = false;
  for (std::uint64_t d : t.dims) {
    if (d != 0 && expect > count / d) {
      overflow = true;  // product already exceeds the payload
      break;
    }
    expect *= d;
  }
  if (overflow || expect != count)
    throw io_error(what + ": payload length does not match dims");
  t.values.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    if (t.dtype == Dtype::f64)
      t.values.push_back(detail::get_f64le(p + off + 8 * i));
    else
      t.values.push_back(static_cast<double>(detail::get_f32le(p + off + 4 * i)));
  }
  return t;
}

inline void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  atomic_write_file(path, encode_tensor(t));
}

inline Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_tensor(ss.str(), path.string());
}

inline Matrix tensor_to_matrix(const Tensor& t) {
  if (t.dims.size() != 2) throw io_error("expected a rank-2 tensor");
  return Matrix(static_cast<std::size_t>(t.dims[0]),
                static_cast<std::size_t>(t.dims[1]), t.values);
}

inline Tensor matrix_to_tensor(const Matrix& m, Dtype dtype = Dtype::f64) {
  Tensor t;
  t.dtype = dtype;
  t.dims = {m.rows, m.cols};
  t.values = m.data;
  return t;
}

// Scaling operators ride in the same container as a rank-1 f64 tensor with
// payload [kind, dim, structural, params...]; kind codes follow MatrixKind
// and `structural` is the block size or bandwidth (0 elsewhere).
inline void write_operator(const std::filesystem::path& path,
                           const ScalingOperator& op) {
  Tensor t;
  t.dtype = Dtype::f64;
  Vec payload;
  payload.reserve(3 + op.params.size());
  payload.push_back(static_cast<double>(op.kind));
  payload.push_back(static_cast<double>(op.dim));
  payload.push_back(static_cast<double>(
      op.kind == MatrixKind::block_diagonal ? op.block_size : op.bandwidth));
  payload.insert(payload.end(), op.params.begin(), op.params.end());
  t.dims = {payload.size()};
  t.values = std::move(payload);
  write_tensor(path, t);
}

inline ScalingOperator read_operator(const std::filesystem::path& path) {
  const Tensor t = read_tensor(path);
  if (t.dims.size() != 1 || t.values.size() < 3)
    throw io_error(path.string() + ": not an operator file");
  const double max_field = 1e9;  // header ints must be small exact integers
  for (int i = 0; i < 3; ++i)
    if (!(t.values[i] >= 0.0) || t.values[i] > max_field ||
        t.values[i] != std::floor(t.values[i]))
      throw io_error(path.string() + ": bad operator header field");
  const int kind_code = static_cast<int>(t.values[0]);
  if (kind_code > 3) throw io_error(path.string() + ": bad operator kind tag");
  const auto kind = static_cast<MatrixKind>(kind_code);
  const auto dim = static_cast<std::size_t>(t.values[1]);
  const auto structural = static_cast<std::size_t>(t.values[2]);
  Vec params(t.values.begin() + 3, t.values.end());
  try {
    return make_operator(kind, dim,
                         kind == MatrixKind::block_diagonal ? structural : 0,
                         kind == MatrixKind::banded ? structural : 0,
                         std::move(params));
  } catch (const std::invalid_argument& e) {
    throw io_error(path.string() + ": " + e.what());
  }
}

// Plain-CSV fixture import: one matrix row per line, comma-separated.
inline Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot open: " + path.string());
  std::vector<Vec> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    Vec row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw io_error(path.string() + ": bad numeric cell '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw io_error(path.string() + ": ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error(path.string() + ": empty CSV");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace hyperadapt
