#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hyperadapt/adapter.hpp"
#include "hyperadapt/rng.hpp"
#include "hyperadapt/scaling.hpp"

using namespace hyperadapt;

TEST_CASE("identity initialization per kind") {
  const auto diag = init_identity(MatrixKind::diagonal, 4);
  REQUIRE(diag.params == Vec{1.0, 1.0, 1.0, 1.0});

  const auto band = init_identity(MatrixKind::banded, 4, 0, 1);
  REQUIRE(band.params.size() == 10);  // 4*3 - 2
  const Matrix bd = to_dense(band);
  REQUIRE(max_abs_diff(bd, Matrix::identity(4)) == 0.0);

  const auto block = init_identity(MatrixKind::block_diagonal, 4, 2, 0);
  REQUIRE(block.params.size() == 8);
  REQUIRE(max_abs_diff(to_dense(block), Matrix::identity(4)) == 0.0);

  REQUIRE_THROWS_AS(init_identity(MatrixKind::block_diagonal, 4, 3, 0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(init_identity(MatrixKind::banded, 4, 0, 4),
                    std::invalid_argument);
}

TEST_CASE("parameter counts") {
  REQUIRE(param_count(MatrixKind::diagonal, 1024) == 1024);
  REQUIRE(param_count(MatrixKind::banded, 1024, 0, 1) == 3070);
  REQUIRE(param_count(MatrixKind::dense, 1024) == 1024 * 1024);
  REQUIRE(param_count(MatrixKind::block_diagonal, 1024, 2, 0) == 2048);

  // banded count equals a direct enumeration of |i-j| <= d
  for (std::size_t n : {4u, 7u, 16u}) {
    for (std::size_t d = 0; d < n; ++d) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if ((i >= j ? i - j : j - i) <= d) ++count;
      REQUIRE(param_count(MatrixKind::banded, n, 0, d) == count);
    }
  }

  // diagonal <= banded(d>=1) <= dense for fixed n
  for (std::size_t n : {2u, 8u, 64u, 1024u}) {
    const std::size_t diag = param_count(MatrixKind::diagonal, n);
    const std::size_t dense = param_count(MatrixKind::dense, n);
    for (std::size_t d = 1; d < std::min<std::size_t>(n, 6); ++d) {
      const std::size_t banded = param_count(MatrixKind::banded, n, 0, d);
      REQUIRE(diag <= banded);
      REQUIRE(banded <= dense);
    }
  }
}

TEST_CASE("matvec structure") {
  const auto id = init_identity(MatrixKind::banded, 6, 0, 2);
  const Vec x = {1, 2, 3, 4, 5, 6};
  REQUIRE(matvec(id, x) == x);

  const auto diag = make_operator(MatrixKind::diagonal, 2, 0, 0, {2.0, 3.0});
  REQUIRE(matvec(diag, Vec{1.0, 1.0}) == Vec{2.0, 3.0});

  REQUIRE_THROWS_AS(matvec(diag, Vec{1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("structured matvec agrees with the dense expansion") {
  Rng rng(31);
  const MatrixKind kinds[] = {MatrixKind::diagonal, MatrixKind::block_diagonal,
                              MatrixKind::banded, MatrixKind::dense};
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 * (1 + i % 8);
    const MatrixKind kind = kinds[i % 4];
    const std::size_t block = kind == MatrixKind::block_diagonal ? 2 : 0;
    const std::size_t band =
        kind == MatrixKind::banded ? std::min<std::size_t>(n - 1, i % 4) : 0;
    Vec params(param_count(kind, n, block, band));
    for (double& p : params) p = rng.normal();
    const auto op = make_operator(kind, n, block, band, std::move(params));
    const Vec x = rng.normal_vec(n);
    const Vec fast = matvec(op, x);
    const Vec ref = to_dense(op).matvec(x);
    for (std::size_t k = 0; k < n; ++k)
      REQUIRE(std::abs(fast[k] - ref[k]) <= 1e-13);
  }
}

TEST_CASE("degeneration to the diagonal is exact") {
  Rng rng(37);
  for (std::size_t n : {2u, 5u, 8u, 16u}) {
    Vec params(n);
    for (double& p : params) p = rng.normal();
    const auto diag = make_operator(MatrixKind::diagonal, n, 0, 0, params);
    const auto band0 = make_operator(MatrixKind::banded, n, 0, 0, params);
    const auto block1 = make_operator(MatrixKind::block_diagonal, n, 1, 0, params);
    const Matrix d = to_dense(diag);
    REQUIRE(max_abs_diff(d, to_dense(band0)) == 0.0);
    REQUIRE(max_abs_diff(d, to_dense(block1)) == 0.0);
  }
}

TEST_CASE("structural zeros are exactly zero in the dense expansion") {
  Rng rng(41);
  Vec params(param_count(MatrixKind::banded, 8, 0, 1));
  for (double& p : params) p = rng.normal();
  const Matrix d = to_dense(make_operator(MatrixKind::banded, 8, 0, 1, params));
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      if ((i > j ? i - j : j - i) > 1) REQUIRE(d(i, j) == 0.0);
}

TEST_CASE("banded parameter ordering is row-major over the band") {
  // n=4, d=1 rows have widths 2,3,3,2; place a marker and look it up.
  Vec params(10, 0.0);
  params[3] = 7.0;  // row 1, second in-band column -> (1, 1)
  const Matrix d = to_dense(make_operator(MatrixKind::banded, 4, 0, 1, params));
  REQUIRE(d(1, 1) == 7.0);

  Vec bparams(8, 0.0);
  bparams[6] = 3.0;  // block 1, local (1, 0) -> (3, 2)
  const Matrix b =
      to_dense(make_operator(MatrixKind::block_diagonal, 4, 2, 0, bparams));
  REQUIRE(b(3, 2) == 3.0);
}

TEST_CASE("uniform diagonal pushed through the Mobius action equals scalar") {
  Rng rng(43);
  for (double cv : {0.01, 1.0}) {
    const Curvature c(cv);
    for (int i = 0; i < 100; ++i) {
      const std::size_t n = 3 + i % 5;
      Vec dir = rng.unit_vec(n);
      const double k = rng.uniform(0.05, 0.9) / c.sqrt_value();
      for (double& t : dir) t *= k;
      const BallPoint x = ball_point(std::move(dir), c);
      const double s = rng.uniform(0.1, 3.0);
      const auto uniform = make_operator(MatrixKind::diagonal, n, 0, 0, Vec(n, s));
      const BallPoint a = mobius_matrix_mul(uniform, x);
      const BallPoint b = mobius_scalar_mul(s, x);
      for (std::size_t j = 0; j < n; ++j)
        REQUIRE(std::abs(a.coords[j] - b.coords[j]) <= 1e-12);
    }
  }
}

TEST_CASE("operator construction validates parameter length") {
  REQUIRE_THROWS_AS(make_operator(MatrixKind::diagonal, 4, 0, 0, Vec(5, 1.0)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(make_operator(MatrixKind::banded, 4, 0, 1, Vec(9, 1.0)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(
      make_operator(MatrixKind::diagonal, 4, 2, 0, Vec(4, 1.0)),
      std::invalid_argument);  // stray structural parameter
}
