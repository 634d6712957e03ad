#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "hyperadapt/config.hpp"
#include "hyperadapt/rng.hpp"
#include "hyperadapt/tensor_io.hpp"

using namespace hyperadapt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("hyperadapt_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("tensor f64 roundtrip is bit exact") {
  TempDir tmp;
  Rng rng(211);
  Tensor t;
  t.dtype = Dtype::f64;
  t.dims = {3, 4, 2};
  t.values = rng.normal_vec(24);
  t.values[0] = -0.0;
  t.values[1] = 1e-300;
  const fs::path p = tmp.path / "a.hypt";
  write_tensor(p, t);
  const Tensor back = read_tensor(p);
  REQUIRE(back.dtype == Dtype::f64);
  REQUIRE(back.dims == t.dims);
  REQUIRE(std::memcmp(back.values.data(), t.values.data(), 24 * 8) == 0);
}

TEST_CASE("tensor f32 roundtrip is exact at f32 precision") {
  TempDir tmp;
  Rng rng(223);
  Tensor t;
  t.dtype = Dtype::f32;
  t.dims = {6};
  t.values = rng.normal_vec(6);
  const fs::path p = tmp.path / "b.hypt";
  write_tensor(p, t);
  const Tensor back = read_tensor(p);
  for (std::size_t i = 0; i < 6; ++i)
    REQUIRE(back.values[i] == static_cast<double>(static_cast<float>(t.values[i])));
}

TEST_CASE("tensor format errors") {
  TempDir tmp;
  const fs::path bad = tmp.path / "bad.hypt";
  {
    std::ofstream f(bad, std::ios::binary);
    f << "NOPE1234567890";
  }
  REQUIRE_THROWS_AS(read_tensor(bad), io_error);

  // bad version byte
  Tensor t;
  t.dims = {2};
  t.values = {1.0, 2.0};
  std::string bytes = encode_tensor(t);
  bytes[4] = 9;
  REQUIRE_THROWS_AS(decode_tensor(bytes, "mem"), io_error);

  // truncated payload
  std::string short_bytes = encode_tensor(t);
  short_bytes.pop_back();
  REQUIRE_THROWS_AS(decode_tensor(short_bytes, "mem"), io_error);

  REQUIRE_THROWS_AS(read_tensor(tmp.path / "missing.hypt"), io_error);

  // dims whose product overflows u64 must be rejected, not trusted
  std::string hostile = "HYPT";
  hostile.push_back(1);  // version
  hostile.push_back(1);  // f64
  hostile.push_back(2);  // rank
  for (int d = 0; d < 2; ++d) {
    for (int i = 0; i < 8; ++i) hostile.push_back(i == 5 ? 0x10 : 0x00);  // 2^44
  }
  hostile.append(16, '\0');  // 2 fake elements
  REQUIRE_THROWS_AS(decode_tensor(hostile, "mem"), io_error);

  // operator header fields must be small nonnegative integers
  Tensor op_t;
  op_t.dims = {5};
  op_t.values = {-1.0, 4.0, 0.0, 1.0, 1.0};
  const fs::path bad_op = tmp.path / "bad_op.hypt";
  write_tensor(bad_op, op_t);
  REQUIRE_THROWS_AS(read_operator(bad_op), io_error);
  op_t.values = {0.0, 2.5, 0.0, 1.0, 1.0};  // fractional dim
  write_tensor(bad_op, op_t);
  REQUIRE_THROWS_AS(read_operator(bad_op), io_error);
}

TEST_CASE("tensor header layout is little-endian and fixed") {
  Tensor t;
  t.dims = {1};
  t.values = {1.0};
  const std::string bytes = encode_tensor(t);
  REQUIRE(bytes.size() == 7 + 8 + 8);
  REQUIRE(bytes.substr(0, 4) == "HYPT");
  REQUIRE(bytes[4] == 1);  // version
  REQUIRE(bytes[5] == 1);  // f64
  REQUIRE(bytes[6] == 1);  // rank
  REQUIRE(static_cast<unsigned char>(bytes[7]) == 1);  // dim 1, LE low byte
  for (int i = 8; i < 15; ++i) REQUIRE(bytes[i] == 0);
  // 1.0 encodes as 0x3FF0000000000000, little-endian
  REQUIRE(static_cast<unsigned char>(bytes[21]) == 0xf0);
  REQUIRE(static_cast<unsigned char>(bytes[22]) == 0x3f);
}

TEST_CASE("operator files roundtrip for every kind") {
  TempDir tmp;
  Rng rng(227);
  const ScalingOperator ops[] = {
      init_identity(MatrixKind::diagonal, 6),
      init_identity(MatrixKind::block_diagonal, 6, 3, 0),
      init_identity(MatrixKind::banded, 6, 0, 2),
      init_identity(MatrixKind::dense, 6),
  };
  int i = 0;
  for (ScalingOperator op : ops) {
    for (double& p : op.params) p = rng.normal();
    const fs::path p = tmp.path / ("op" + std::to_string(i++) + ".hypt");
    write_operator(p, op);
    const ScalingOperator back = read_operator(p);
    REQUIRE(back.kind == op.kind);
    REQUIRE(back.dim == op.dim);
    REQUIRE(back.block_size == op.block_size);
    REQUIRE(back.bandwidth == op.bandwidth);
    REQUIRE(back.params == op.params);
  }
}

TEST_CASE("csv fixture import") {
  TempDir tmp;
  const fs::path p = tmp.path / "w.csv";
  {
    std::ofstream f(p);
    f << "1.5,2,-3\n0.25,1e-3,4\n";
  }
  const Matrix m = read_matrix_csv(p);
  REQUIRE(m.rows == 2);
  REQUIRE(m.cols == 3);
  REQUIRE(m(0, 0) == 1.5);
  REQUIRE(m(1, 1) == 1e-3);

  const fs::path ragged = tmp.path / "ragged.csv";
  {
    std::ofstream f(ragged);
    f << "1,2\n3\n";
  }
  REQUIRE_THROWS_AS(read_matrix_csv(ragged), io_error);
}

TEST_CASE("config files parse with validation") {
  TempDir tmp;
  const fs::path p = tmp.path / "run.cfg";
  {
    std::ofstream f(p);
    f << "# toy run\n";
    f << "curvature = 0.1\n";
    f << "kind = banded\n";
    f << "bandwidth = 2\n";
    f << "seed = 9\n";
    f << "lr = 0.005  # half the default\n";
  }
  RunConfig cfg;
  load_config_file(cfg, p);
  REQUIRE(cfg.curvature == 0.1);
  REQUIRE(cfg.kind == MatrixKind::banded);
  REQUIRE(cfg.bandwidth == 2);
  REQUIRE(cfg.seed == 9);
  REQUIRE(cfg.lr == 0.005);
  cfg.validate();

  RunConfig bad;
  bad.curvature = -1.0;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  RunConfig bad2;
  bad2.kind = MatrixKind::block_diagonal;
  bad2.dim = 10;
  bad2.block_size = 3;
  REQUIRE_THROWS_AS(bad2.validate(), std::invalid_argument);

  REQUIRE_THROWS_AS(apply_config_entry(bad, "no_such_key", "1"),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(apply_config_entry(bad, "lr", "fast"), std::invalid_argument);
  const fs::path broken = tmp.path / "broken.cfg";
  {
    std::ofstream f(broken);
    f << "curvature 0.1\n";
  }
  RunConfig c2;
  REQUIRE_THROWS_AS(load_config_file(c2, broken), std::invalid_argument);
}

TEST_CASE("resolved config json carries the defaults") {
  RunConfig cfg;
  const nlohmann::json j = cfg.to_json();
  REQUIRE(j["curvature"] == 0.01);
  REQUIRE(j["kind"] == "diagonal");
  REQUIRE(j["seed"] == 42);
}
