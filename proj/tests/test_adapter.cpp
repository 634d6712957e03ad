#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "hyperadapt/adapter.hpp"
#include "hyperadapt/rng.hpp"

using namespace hyperadapt;

namespace {

// Frozen weight whose lifted columns have sqrt(c)-norms in [lo, hi].
FrozenWeight random_frozen(Rng& rng, std::size_t n, std::size_t m, Curvature c,
                           double lo = 0.1, double hi = 0.8) {
  Matrix w(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    Vec col = rng.unit_vec(n);
    const double k = std::atanh(rng.uniform(lo, hi)) / c.sqrt_value();
    for (double& t : col) t *= k;
    w.set_col(j, col);
  }
  return make_frozen(std::move(w));
}

}  // namespace

TEST_CASE("scalar adjustment identity and zero") {
  Rng rng(51);
  const Curvature c(0.01);
  const FrozenWeight w0 = random_frozen(rng, 6, 4, c);

  const Matrix same = adjust_weight_scalar(w0, 1.0, c);
  REQUIRE(max_abs_diff(same, w0.matrix) <= 1e-12);

  const Matrix zero = adjust_weight_scalar(w0, 0.0, c);
  for (double v : zero.data) REQUIRE(v == 0.0);
}

TEST_CASE("scalar adjustment closed-form column") {
  // c=1, tangent column v with exp0(v) = (0.5, 0); s=2 lands on (0.8, 0)
  // whose log is (artanh(0.8), 0) = (ln 3, 0).
  const Curvature c1(1.0);
  Matrix w(2, 1);
  w(0, 0) = std::atanh(0.5);
  const Matrix out = adjust_weight_scalar(make_frozen(w), 2.0, c1);
  REQUIRE(std::abs(out(0, 0) - 1.0986122886681098) < 1e-12);
  REQUIRE(std::abs(out(1, 0)) < 1e-15);
}

TEST_CASE("matrix adjustment with identity operator is a no-op") {
  Rng rng(53);
  for (MatrixKind kind : {MatrixKind::diagonal, MatrixKind::block_diagonal,
                          MatrixKind::banded, MatrixKind::dense}) {
    const Curvature c(0.01);
    const FrozenWeight w0 = random_frozen(rng, 8, 3, c);
    const std::size_t block = kind == MatrixKind::block_diagonal ? 2 : 0;
    const std::size_t band = kind == MatrixKind::banded ? 1 : 0;
    const auto ws = init_identity(kind, 8, block, band);
    REQUIRE(max_abs_diff(adjust_weight_matrix(w0, ws, c), w0.matrix) <= 1e-12);
  }
}

TEST_CASE("scalar and uniform-diagonal paths coincide") {
  Rng rng(59);
  for (int i = 0; i < 50; ++i) {
    const Curvature c(i % 2 ? 1.0 : 0.01);
    const std::size_t n = 2 + i % 6;
    const FrozenWeight w0 = random_frozen(rng, n, 1 + i % 4, c, 0.05, 0.8);
    const double s = rng.uniform(0.1, 3.0);
    const auto uniform = make_operator(MatrixKind::diagonal, n, 0, 0, Vec(n, s));
    REQUIRE(max_abs_diff(adjust_weight_scalar(w0, s, c),
                         adjust_weight_matrix(w0, uniform, c)) <= 1e-12);
  }
}

TEST_CASE("per-column radius contract under a random diagonal") {
  Rng rng(61);
  const Curvature c(0.01);
  Matrix w(4, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    Vec col = rng.unit_vec(4);
    const double k = std::atanh(rng.uniform(0.1, 0.7)) / c.sqrt_value();
    for (double& t : col) t *= k;
    w.set_col(j, col);
  }
  const FrozenWeight w0 = make_frozen(w);
  Vec params(4);
  for (double& p : params) p = rng.uniform(0.5, 2.0);
  const auto ws = make_operator(MatrixKind::diagonal, 4, 0, 0, params);
  const Matrix adjusted = adjust_weight_matrix(w0, ws, c);
  for (std::size_t j = 0; j < 3; ++j) {
    const BallPoint lifted = lift(w0.matrix.col(j), c);
    const double expected_scale =
        norm(matvec(ws, lifted.coords)) / norm(lifted.coords);
    const double before = hyperbolic_radius(lifted);
    const double after = hyperbolic_radius(lift(adjusted.col(j), c));
    REQUIRE(std::abs(after - expected_scale * before) <=
            1e-9 * (1.0 + expected_scale * before));
  }
}

TEST_CASE("forward pass") {
  Rng rng(67);
  const Curvature c(0.01);
  const FrozenWeight w0 = random_frozen(rng, 6, 4, c);

  Matrix x(4, 3);
  for (double& v : x.data) v = rng.normal();

  const auto id = init_identity(MatrixKind::diagonal, 6);
  const AdapterLayer frozen_layer = make_layer(w0, id, c);
  REQUIRE(max_abs_diff(forward(frozen_layer, x), w0.matrix.matmul(x)) <= 1e-12);

  // probing with the identity input returns the adjusted columns
  const AdapterLayer scalar_layer = make_layer(w0, id, c, 2.0);
  const Matrix probe = forward(scalar_layer, Matrix::identity(4));
  REQUIRE(max_abs_diff(probe, adjust_weight_scalar(w0, 2.0, c)) == 0.0);

  // scalar path and uniform-diagonal path produce the same output
  const auto uniform = make_operator(MatrixKind::diagonal, 6, 0, 0, Vec(6, 2.0));
  const AdapterLayer matrix_layer = make_layer(w0, uniform, c);
  REQUIRE(max_abs_diff(forward(scalar_layer, x), forward(matrix_layer, x)) <= 1e-12);

  Matrix bad(5, 2);
  REQUIRE_THROWS_AS(forward(frozen_layer, bad), std::invalid_argument);
}

TEST_CASE("representation radius scale") {
  Rng rng(71);
  const Curvature c(0.01);
  const auto id = init_identity(MatrixKind::diagonal, 8);

  const Vec y0 = rng.normal_vec(8);
  const RadiusScale rs = representation_radius_scale(y0, id, c);
  REQUIRE(rs.scale == 1.0);
  const BallPoint lifted = lift(y0, c);
  for (std::size_t k = 0; k < 8; ++k)
    REQUIRE(std::abs(rs.point.coords[k] - lifted.coords[k]) < 1e-15);

  const auto twice = make_operator(MatrixKind::diagonal, 8, 0, 0, Vec(8, 2.0));
  REQUIRE(representation_radius_scale(y0, twice, c).scale == 2.0);

  const RadiusScale zero = representation_radius_scale(Vec(8, 0.0), id, c);
  REQUIRE(zero.scale == 1.0);
  REQUIRE(norm(zero.point.coords) == 0.0);
}

TEST_CASE("representation radius identity on random operators") {
  Rng rng(73);
  for (int i = 0; i < 1000; ++i) {
    const Curvature c(i % 2 ? 0.01 : 1.0);
    const std::size_t n = 2 + i % 7;
    Vec params(n);
    for (double& p : params) p = rng.uniform(0.3, 2.5);
    const auto ws = make_operator(MatrixKind::diagonal, n, 0, 0, params);
    Vec y0 = rng.unit_vec(n);
    const double k = rng.uniform(0.2, 1.5) / c.sqrt_value();
    for (double& t : y0) t *= k;
    const RadiusScale rs = representation_radius_scale(y0, ws, c);
    const double base_radius = hyperbolic_radius(lift(y0, c));
    const double got = hyperbolic_radius(rs.point);
    REQUIRE(std::abs(got - rs.scale * base_radius) <=
            1e-9 * (1.0 + rs.scale * base_radius));
  }
}

TEST_CASE("adapter report") {
  Rng rng(79);
  const Curvature c(0.01);
  const FrozenWeight w0 = random_frozen(rng, 8, 5, c);

  const AdapterLayer id_layer = make_layer(w0, init_identity(MatrixKind::diagonal, 8), c);
  const AdapterReport id_rep = report(id_layer);
  for (const ColumnScale& cs : id_rep.per_column)
    REQUIRE(std::abs(cs.effective_scale - 1.0) < 1e-9);

  const AdapterLayer half = make_layer(w0, init_identity(MatrixKind::diagonal, 8), c, 0.5);
  for (const ColumnScale& cs : report(half).per_column)
    REQUIRE(std::abs(cs.effective_scale - 0.5) < 1e-9);

  const AdapterLayer wide = make_layer(
      random_frozen(rng, 1024, 2, c), init_identity(MatrixKind::diagonal, 1024), c);
  REQUIRE(report(wide).param_overhead == 1024);
}

TEST_CASE("zero columns pass through with unit effective scale") {
  const Curvature c(0.01);
  Matrix w(4, 2);
  w(0, 0) = 1.0;  // column 1 is all zero
  const FrozenWeight w0 = make_frozen(w);
  const auto twice = make_operator(MatrixKind::diagonal, 4, 0, 0, Vec(4, 2.0));
  const Matrix adjusted = adjust_weight_matrix(w0, twice, c);
  for (std::size_t i = 0; i < 4; ++i) REQUIRE(adjusted(i, 1) == 0.0);
  const AdapterReport rep = report(make_layer(w0, twice, c));
  REQUIRE(rep.per_column[1].effective_scale == 1.0);
  REQUIRE(rep.per_column[1].radius_before == 0.0);
}

TEST_CASE("adjustment is deterministic") {
  Rng rng(83);
  const Curvature c(0.01);
  const FrozenWeight w0 = random_frozen(rng, 8, 4, c);
  Vec params(8);
  for (double& p : params) p = rng.uniform(0.5, 2.0);
  const auto ws = make_operator(MatrixKind::diagonal, 8, 0, 0, params);
  const Matrix a = adjust_weight_matrix(w0, ws, c);
  const Matrix b = adjust_weight_matrix(w0, ws, c);
  REQUIRE(std::memcmp(a.data.data(), b.data.data(), a.data.size() * 8) == 0);
}

TEST_CASE("euclidean limit of the matrix adjustment") {
  Rng rng(89);
  const Curvature c(1e-8);
  Matrix w(6, 3);
  for (double& v : w.data) v = rng.normal();
  const FrozenWeight w0 = make_frozen(w);
  Vec params(6);
  for (double& p : params) p = rng.uniform(0.5, 2.0);
  const auto ws = make_operator(MatrixKind::diagonal, 6, 0, 0, params);
  const Matrix adjusted = adjust_weight_matrix(w0, ws, c);
  const Matrix dense = to_dense(ws);
  for (std::size_t j = 0; j < 3; ++j) {
    const Vec expect = dense.matvec(w0.matrix.col(j));
    const Vec got = adjusted.col(j);
    double err = 0.0;
    for (std::size_t k = 0; k < 6; ++k)
      err = std::max(err, std::abs(got[k] - expect[k]));
    REQUIRE(err / norm(expect) < 1e-4);
  }
}

TEST_CASE("layer construction validates dimensions") {
  Rng rng(97);
  const Curvature c(0.01);
  const FrozenWeight w0 = random_frozen(rng, 6, 2, c);
  REQUIRE_THROWS_AS(make_layer(w0, init_identity(MatrixKind::diagonal, 5), c),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(adjust_weight_matrix(w0, init_identity(MatrixKind::diagonal, 5), c),
                    std::invalid_argument);
}
