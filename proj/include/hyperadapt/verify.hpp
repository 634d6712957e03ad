#pragma once

#include <chrono>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "hyperadapt/adapter.hpp"
#include "hyperadapt/rng.hpp"

// Seeded property suites for the radius-scaling identities and the
// structural guarantees. The CLI `verify` subcommand and the acceptance
// tests both run these.

namespace hyperadapt {

struct SuiteResult {
  std::string name;
  std::size_t samples = 0;
  std::size_t excluded = 0;  // boundary-band cases skipped and counted
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

namespace verify_detail {

inline const std::vector<double>& curvature_grid() {
  static const std::vector<double> g = {0.01, 0.1, 1.0};
  return g;
}

inline const std::vector<std::size_t>& dim_grid() {
  static const std::vector<std::size_t> g = {2, 8, 64};
  return g;
}

// Interior point with sqrt(c)*|x| drawn uniformly from [lo, hi].
inline BallPoint random_interior(Rng& rng, std::size_t dim, Curvature c,
                                 double lo, double hi) {
  const double u = rng.uniform(lo, hi);
  Vec v = rng.unit_vec(dim);
  const double k = u / c.sqrt_value();
  for (double& x : v) x *= k;
  return ball_point(std::move(v), c);
}

// Random operator of the given kind, rescaled so |Mx|/|x| hits `ratio`.
inline ScalingOperator random_operator_with_ratio(Rng& rng, MatrixKind kind,
                                                  std::size_t dim,
                                                  const Vec& x, double ratio) {
  const std::size_t block = kind == MatrixKind::block_diagonal ? 2 : 0;
  const std::size_t band = kind == MatrixKind::banded ? 1 : 0;
  for (;;) {
    Vec params(param_count(kind, dim, block, band));
    for (double& p : params) p = rng.normal();
    ScalingOperator op = make_operator(kind, dim, block, band, std::move(params));
    const double t0 = norm(matvec(op, x)) / norm(x);
    if (t0 < 1e-9) continue;  // x nearly in the null space; resample
    const double k = ratio / t0;
    for (double& p : op.params) p *= k;
    return op;
  }
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void finish(SuiteResult& r, const Timer& t) {
  r.seconds = t.seconds();
  r.pass = r.max_error <= r.tolerance;
}

}  // namespace verify_detail

// Rad(s (x) x) == s * Rad(x), normalized error <= 1e-9.
inline SuiteResult run_theorem1(std::uint64_t seed, std::size_t cases_per_combo = 1200) {
  verify_detail::Timer timer;
  SuiteResult res{.name = "theorem1", .tolerance = 1e-9};
  Rng rng(seed);
  for (double c_val : verify_detail::curvature_grid())
    for (std::size_t dim : verify_detail::dim_grid()) {
      const Curvature c(c_val);
      for (std::size_t i = 0; i < cases_per_combo; ++i) {
        const BallPoint x = verify_detail::random_interior(rng, dim, c, 0.05, 0.9);
        const double s = rng.uniform(0.1, 5.0);
        const double lhs = hyperbolic_radius(mobius_scalar_mul(s, x));
        const double rhs = s * hyperbolic_radius(x);
        const double err = std::abs(lhs - rhs) / (1.0 + rhs);
        res.max_error = std::max(res.max_error, err);
        ++res.samples;
      }
    }
  verify_detail::finish(res, timer);
  return res;
}

// Rad(M (x) x) == (|Mx|/|x|) * Rad(x) for dense and structured M. The norm
// ratio on the right is taken through the dense expansion, so the identity
// and the structured fast path are checked against each other in one pass.
inline SuiteResult run_theorem2(std::uint64_t seed, std::size_t cases_per_combo = 1200) {
  verify_detail::Timer timer;
  SuiteResult res{.name = "theorem2", .tolerance = 1e-9};
  Rng rng(seed);
  const MatrixKind kinds[] = {MatrixKind::dense, MatrixKind::diagonal,
                              MatrixKind::block_diagonal, MatrixKind::banded};
  for (double c_val : verify_detail::curvature_grid())
    for (std::size_t dim : verify_detail::dim_grid()) {
      const Curvature c(c_val);
      for (std::size_t i = 0; i < cases_per_combo; ++i) {
        const BallPoint x = verify_detail::random_interior(rng, dim, c, 0.05, 0.9);
        const double ratio = rng.uniform(0.1, 5.0);
        const ScalingOperator op = verify_detail::random_operator_with_ratio(
            rng, kinds[i % 4], dim, x.coords, ratio);
        const Matrix dense = to_dense(op);
        const double t = norm(dense.matvec(x.coords)) / norm(x.coords);
        const double lhs = hyperbolic_radius(mobius_matrix_mul(op, x));
        const double rhs = t * hyperbolic_radius(x);
        const double err = std::abs(lhs - rhs) / (1.0 + rhs);
        res.max_error = std::max(res.max_error, err);
        ++res.samples;
      }
    }
  verify_detail::finish(res, timer);
  return res;
}

// exp0/log0 are mutual inverses away from the clamp band.
inline SuiteResult run_roundtrip(std::uint64_t seed, std::size_t cases = 10000) {
  verify_detail::Timer timer;
  SuiteResult res{.name = "roundtrip", .tolerance = 1e-9};
  Rng rng(seed);
  const auto& cs = verify_detail::curvature_grid();
  const auto& dims = verify_detail::dim_grid();
  for (std::size_t i = 0; i < cases / 2; ++i) {
    const Curvature c(cs[i % cs.size()]);
    const std::size_t dim = dims[(i / cs.size()) % dims.size()];
    // ball -> tangent -> ball
    const BallPoint x = verify_detail::random_interior(rng, dim, c, 1e-4, 0.99);
    const BallPoint x2 = exp_map_origin(log_map_origin(x));
    double err = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
      err = std::max(err, std::abs(x2.coords[k] - x.coords[k]));
    res.max_error = std::max(res.max_error, err / norm(x.coords));
    // tangent -> ball -> tangent
    Vec v = rng.unit_vec(dim);
    const double vn = rng.uniform(1e-4, 2.6) / c.sqrt_value();
    for (double& t : v) t *= vn;
    const TangentVector tv{v, c};
    const TangentVector v2 = log_map_origin(exp_map_origin(tv));
    err = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
      err = std::max(err, std::abs(v2.coords[k] - tv.coords[k]));
    res.max_error = std::max(res.max_error, err / norm(tv.coords));
    res.samples += 2;
  }
  verify_detail::finish(res, timer);
  return res;
}

// Identity, inverse and origin-distance facts of Mobius addition.
inline SuiteResult run_mobius(std::uint64_t seed, std::size_t cases = 2000) {
  verify_detail::Timer timer;
  SuiteResult res{.name = "mobius", .tolerance = 1e-12};
  Rng rng(seed);
  const auto& cs = verify_detail::curvature_grid();
  const auto& dims = verify_detail::dim_grid();
  for (std::size_t i = 0; i < cases; ++i) {
    const Curvature c(cs[i % cs.size()]);
    const std::size_t dim = dims[(i / cs.size()) % dims.size()];
    const BallPoint x = verify_detail::random_interior(rng, dim, c, 0.01, 0.9);
    const BallPoint y = verify_detail::random_interior(rng, dim, c, 0.01, 0.9);
    const BallPoint zero = origin(dim, c);
    double err = 0.0;
    const BallPoint id = mobius_add(x, zero);
    for (std::size_t k = 0; k < dim; ++k)
      err = std::max(err, std::abs(id.coords[k] - x.coords[k]));
    err = std::max(err, norm(mobius_add(x, mobius_neg(x)).coords));
    const double rad = hyperbolic_radius(x);
    err = std::max(err, std::abs(ball_distance(x, zero) - rad) / (1.0 + rad));
    const double dxy = ball_distance(x, y);
    err = std::max(err, std::abs(dxy - ball_distance(y, x)) / (1.0 + dxy));
    res.max_error = std::max(res.max_error, err);
    ++res.samples;
  }
  verify_detail::finish(res, timer);
  return res;
}

// banded(d=0) and block(b=1) must equal diagonal exactly, both as dense
// expansions and through the weight adjustment.
inline SuiteResult run_degeneration(std::uint64_t seed, std::size_t cases = 50) {
  verify_detail::Timer timer;
  SuiteResult res{.name = "degeneration", .tolerance = 1e-12};
  Rng rng(seed);
  const std::size_t dims[] = {2, 4, 8, 16};
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t n = dims[i % 4];
    Vec params(n);
    for (double& p : params) p = rng.uniform(0.2, 2.0);
    const auto diag = make_operator(MatrixKind::diagonal, n, 0, 0, params);
    const auto band0 = make_operator(MatrixKind::banded, n, 0, 0, params);
    const auto block1 = make_operator(MatrixKind::block_diagonal, n, 1, 0, params);
    // dense expansions must be entry-identical
    const Matrix d = to_dense(diag);
    if (max_abs_diff(d, to_dense(band0)) != 0.0 ||
        max_abs_diff(d, to_dense(block1)) != 0.0) {
      res.max_error = std::max(res.max_error, 1.0);
    }
    Matrix w0(n, 3);
    for (double& v : w0.data) v = rng.normal() * 0.3;
    const FrozenWeight fw = make_frozen(w0);
    const Curvature c(verify_detail::curvature_grid()[i % 3]);
    const Matrix adj = adjust_weight_matrix(fw, diag, c);
    res.max_error = std::max(res.max_error,
                             max_abs_diff(adj, adjust_weight_matrix(fw, band0, c)));
    res.max_error = std::max(res.max_error,
                             max_abs_diff(adj, adjust_weight_matrix(fw, block1, c)));
    ++res.samples;
  }
  verify_detail::finish(res, timer);
  return res;
}

// Scalar adjustment equals matrix adjustment with a uniform diagonal.
inline SuiteResult run_equivalence(std::uint64_t seed, std::size_t cases = 100) {
  verify_detail::Timer timer;
  SuiteResult res{.name = "equivalence", .tolerance = 1e-12};
  Rng rng(seed);
  const std::size_t dims[] = {2, 4, 8, 16, 32};
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t n = dims[i % 5];
    const std::size_t m = 1 + i % 4;
    const Curvature c(verify_detail::curvature_grid()[i % 3]);
    Matrix w0(n, m);
    for (std::size_t j = 0; j < m; ++j) {
      Vec col = rng.unit_vec(n);
      const double u = rng.uniform(0.05, 0.8);  // lifted sqrt(c)-norm
      const double k = std::atanh(u) / c.sqrt_value();
      for (double& t : col) t *= k;
      w0.set_col(j, col);
    }
    const FrozenWeight fw = make_frozen(std::move(w0));
    const double s = rng.uniform(0.1, 3.0);
    const auto uniform = make_operator(MatrixKind::diagonal, n, 0, 0, Vec(n, s));
    const double err = max_abs_diff(adjust_weight_scalar(fw, s, c),
                                    adjust_weight_matrix(fw, uniform, c));
    res.max_error = std::max(res.max_error, err);
    ++res.samples;
  }
  verify_detail::finish(res, timer);
  return res;
}

// Structured matvec agrees with the dense expansion.
inline SuiteResult run_matvec(std::uint64_t seed, std::size_t cases = 1000) {
  verify_detail::Timer timer;
  SuiteResult res{.name = "matvec", .tolerance = 1e-13};
  Rng rng(seed);
  const MatrixKind kinds[] = {MatrixKind::diagonal, MatrixKind::block_diagonal,
                              MatrixKind::banded, MatrixKind::dense};
  const std::size_t dims[] = {2, 4, 8, 16, 64};
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t n = dims[i % 5];
    const MatrixKind kind = kinds[i % 4];
    const std::size_t block = kind == MatrixKind::block_diagonal ? 2 : 0;
    const std::size_t band = kind == MatrixKind::banded ? std::min<std::size_t>(n - 1, 1 + i % 3) : 0;
    Vec params(param_count(kind, n, block, band));
    for (double& p : params) p = rng.normal();
    const auto op = make_operator(kind, n, block, band, std::move(params));
    const Vec x = rng.normal_vec(n);
    const Vec fast = matvec(op, x);
    const Vec ref = to_dense(op).matvec(x);
    double err = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      err = std::max(err, std::abs(fast[k] - ref[k]));
    res.max_error = std::max(res.max_error, err);
    ++res.samples;
  }
  verify_detail::finish(res, timer);
  return res;
}

// As c -> 0+ the ball flattens out: exp0 approaches the identity and the
// adjusted weight approaches the plain Euclidean action of the operator.
inline SuiteResult run_limit(std::uint64_t seed, std::size_t cases = 200) {
  verify_detail::Timer timer;
  SuiteResult res{.name = "limit", .tolerance = 1e-4};
  Rng rng(seed);
  const Curvature c(1e-8);
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t n = 2 + 2 * (i % 4);
    Vec v = rng.normal_vec(n);
    const BallPoint p = exp_map_origin(TangentVector{v, c});
    const double nv = norm(v);
    res.max_error =
        std::max(res.max_error, std::abs(norm(p.coords) - nv) / nv);
    // adjusted weight vs Euclidean action
    Matrix w0(n, 2);
    for (double& t : w0.data) t = rng.normal();
    const FrozenWeight fw = make_frozen(w0);
    Vec params(n);
    for (double& t : params) t = rng.uniform(0.5, 2.0);
    const auto op = make_operator(MatrixKind::diagonal, n, 0, 0, std::move(params));
    const Matrix adj = adjust_weight_matrix(fw, op, c);
    const Matrix dense = to_dense(op);
    for (std::size_t j = 0; j < 2; ++j) {
      const Vec expect = dense.matvec(fw.matrix.col(j));
      const Vec got = adj.col(j);
      double err = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        err = std::max(err, std::abs(got[k] - expect[k]));
      res.max_error = std::max(res.max_error, err / norm(expect));
    }
    ++res.samples;
  }
  verify_detail::finish(res, timer);
  return res;
}

inline std::vector<std::string> suite_names() {
  return {"theorem1", "theorem2", "roundtrip", "mobius",
          "degeneration", "equivalence", "matvec", "limit"};
}

// Run all suites, or the comma-separated subset in `filter`.
inline std::vector<SuiteResult> run_suites(std::uint64_t seed,
                                           const std::string& filter = "") {
  std::vector<std::string> wanted;
  if (!filter.empty()) {
    std::stringstream ss(filter);
    std::string item;
    while (std::getline(ss, item, ',')) {
      bool known = false;
      for (const auto& n : suite_names()) known = known || n == item;
      if (!known) throw std::invalid_argument("unknown suite: " + item);
      wanted.push_back(item);
    }
  } else {
    wanted = suite_names();
  }
  std::vector<SuiteResult> out;
  for (const auto& name : wanted) {
    if (name == "theorem1") out.push_back(run_theorem1(seed));
    else if (name == "theorem2") out.push_back(run_theorem2(seed));
    else if (name == "roundtrip") out.push_back(run_roundtrip(seed));
    else if (name == "mobius") out.push_back(run_mobius(seed));
    else if (name == "degeneration") out.push_back(run_degeneration(seed));
    else if (name == "equivalence") out.push_back(run_equivalence(seed));
    else if (name == "matvec") out.push_back(run_matvec(seed));
    else if (name == "limit") out.push_back(run_limit(seed));
  }
  return out;
}

}  // namespace hyperadapt
