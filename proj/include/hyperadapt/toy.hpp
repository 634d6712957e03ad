#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hyperadapt/grad.hpp"
#include "hyperadapt/rng.hpp"

// Desk-scale synthetic task: train a scaling operator so that adjusted
// representations hit prescribed per-sample radius scales. One shared
// operator serves every sample; the mixed-target generator plants a dense
// teacher so that configuration is reachable, and convergence is judged at
// the loss level.

namespace hyperadapt {

struct ToyTask {
  std::size_t dim = 32;
  std::size_t columns = 64;
  std::size_t samples = 256;
  double curvature = 0.01;
  double target_lo = 0.5;
  double target_hi = 2.0;
  std::optional<double> uniform_target;  // overrides the sampled range
  std::uint64_t seed = 42;

  void validate() const {
    if (dim < 1 || columns < 1 || samples < 1)
      throw std::invalid_argument("toy task sizes must be >= 1");
    Curvature check(curvature);
    if (!(target_lo > 0.0) || !(target_hi >= target_lo))
      throw std::invalid_argument("target scale range must be positive and ordered");
  }
};

struct ToyDataset {
  std::vector<Vec> base_tangents;      // raw Euclidean vectors, pre-lift
  std::vector<BallPoint> base_points;  // exp-lifted, sqrt(c)|x| in [0.1, 0.8]
  Vec target_scales;
  Curvature curvature{0.01};
};

namespace detail {

// Uniform-target datasets use directions from orthonormal frames. Balanced
// frames keep the per-coordinate second moments exactly equal, so gradient
// descent on a uniform target moves every diagonal entry in lockstep and
// no error leaks into the ill-conditioned off-uniform modes.
inline std::vector<Vec> balanced_directions(Rng& rng, std::size_t n,
                                            std::size_t count) {
  std::vector<Vec> dirs;
  dirs.reserve(count);
  while (dirs.size() < count) {
    std::vector<Vec> frame = random_orthonormal_frame(rng, n);
    for (std::size_t j = 0; j < n && dirs.size() < count; ++j)
      dirs.push_back(std::move(frame[j]));
  }
  return dirs;
}

// Mixed-target datasets are built around a planted dense teacher. Targets
// are drawn first, iid uniform; each direction is then composed in the
// teacher's eigenbasis so its norm ratio under the teacher equals its
// target exactly. A quadratic form concentrates near its mean on generic
// directions, so targets spanning [0.5, 2] are unreachable for any single
// operator unless the geometry cooperates; planting a teacher keeps the
// task realizable, which the convergence thresholds assume.
inline std::vector<Vec> teacher_directions(Rng& rng, std::size_t n,
                                           const Vec& targets, double lo,
                                           double hi) {
  const double lam_lo = 0.85 * lo * lo;
  const double lam_hi = 1.15 * hi * hi;
  Vec lam(n);
  for (std::size_t j = 0; j < n; ++j)
    lam[j] = n == 1 ? 0.5 * (lam_lo + lam_hi)
                    : lam_lo + (lam_hi - lam_lo) * static_cast<double>(j) /
                                   static_cast<double>(n - 1);
  const std::vector<Vec> basis = random_orthonormal_frame(rng, n);
  std::vector<Vec> dirs;
  dirs.reserve(targets.size());
  for (double target : targets) {
    const double t2 = target * target;
    // Dirichlet(1/2) base weights over the eigenvalues
    Vec w(n);
    double tot = 0.0;
    for (double& x : w) {
      const double g = rng.normal();
      x = g * g;
      tot += x;
    }
    for (double& x : w) x /= tot;
    double v0 = 0.0;
    for (std::size_t j = 0; j < n; ++j) v0 += w[j] * lam[j];
    // mix toward a random eigen-slot on the far side of the target
    std::vector<std::size_t> eligible;
    for (std::size_t j = 0; j < n; ++j)
      if (t2 >= v0 ? lam[j] >= t2 : lam[j] <= t2) eligible.push_back(j);
    if (!eligible.empty()) {
      const std::size_t js = eligible[rng.index(eligible.size())];
      if (std::abs(lam[js] - v0) > 1e-12) {
        const double a = (t2 - v0) / (lam[js] - v0);
        for (double& x : w) x *= 1.0 - a;
        w[js] += a;
      }
    }
    Vec dir(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double amp = (rng.uniform() < 0.5 ? -1.0 : 1.0) * std::sqrt(w[j]);
      for (std::size_t t = 0; t < n; ++t) dir[t] += amp * basis[j][t];
    }
    const double dn = norm(dir);
    for (double& x : dir) x /= dn;
    dirs.push_back(std::move(dir));
  }
  return dirs;
}

}  // namespace detail

// Deterministic given the seed. Lifted norms are placed uniformly in
// [0.1, 0.8] (away from origin and boundary), which keeps every target in
// [0.5, 2] safely inside the ball after scaling.
inline ToyDataset generate_dataset(const ToyTask& task) {
  task.validate();
  const Curvature c(task.curvature);
  const double sc = c.sqrt_value();
  Rng rng(task.seed);
  ToyDataset ds;
  ds.curvature = c;
  ds.base_tangents.reserve(task.samples);
  ds.base_points.reserve(task.samples);

  Vec targets(task.samples);
  for (double& t : targets)
    t = task.uniform_target ? *task.uniform_target
                            : rng.uniform(task.target_lo, task.target_hi);
  std::vector<Vec> dirs =
      task.uniform_target
          ? detail::balanced_directions(rng, task.dim, task.samples)
          : detail::teacher_directions(rng, task.dim, targets, task.target_lo,
                                       task.target_hi);
  ds.target_scales = std::move(targets);

  for (std::size_t i = 0; i < task.samples; ++i) {
    const double u = rng.uniform(0.1, 0.8);  // lifted sqrt(c)-norm
    Vec v = std::move(dirs[i]);
    const double tangent_norm = std::atanh(u) / sc;
    for (double& x : v) x *= tangent_norm;
    ds.base_points.push_back(lift(v, c));
    ds.base_tangents.push_back(std::move(v));
  }
  return ds;
}

// Mean squared error between achieved and target radius scales.
inline double radius_loss(const ScalingOperator& ws, const ToyDataset& ds) {
  if (ds.base_points.empty()) throw std::invalid_argument("empty dataset");
  double acc = 0.0;
  for (std::size_t i = 0; i < ds.base_points.size(); ++i) {
    const Vec& x = ds.base_points[i].coords;
    const double base = norm(x);
    const double achieved = base < kZeroNorm ? 1.0 : norm(matvec(ws, x)) / base;
    const double e = achieved - ds.target_scales[i];
    acc += e * e;
  }
  return acc / static_cast<double>(ds.base_points.size());
}

// Loss plus its analytic gradient in canonical parameter order:
//   dL/dW = (2/N) sum_i e_i (W x_i) x_i^T / (|W x_i| |x_i|).
inline std::pair<double, ParamGradient> radius_loss_grad(const ScalingOperator& ws,
                                                         const ToyDataset& ds) {
  if (ds.base_points.empty()) throw std::invalid_argument("empty dataset");
  const std::size_t n = ws.dim;
  Matrix acc(n, n);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(ds.base_points.size());
  for (std::size_t i = 0; i < ds.base_points.size(); ++i) {
    const Vec& x = ds.base_points[i].coords;
    const double base = norm(x);
    if (base < kZeroNorm) {
      const double e = 1.0 - ds.target_scales[i];
      loss += e * e;  // origin samples carry scale 1 and no gradient
      continue;
    }
    const Vec image = matvec(ws, x);
    const double q = norm(image);
    const double achieved = q / base;
    const double e = achieved - ds.target_scales[i];
    loss += e * e;
    if (q < kZeroNorm) continue;  // scale kink at |Wx| = 0; subgradient 0
    const double w = 2.0 * inv_n * e / (q * base);
    for (std::size_t row = 0; row < n; ++row) {
      const double f = w * image[row];
      if (f == 0.0) continue;
      for (std::size_t col = 0; col < n; ++col) acc(row, col) += f * x[col];
    }
  }
  return {loss * inv_n, ParamGradient{gather_structural(ws, acc)}};
}

struct TrainResult {
  Vec loss_curve;      // loss before each step, plus the final loss
  Vec final_scales;    // achieved per-sample radius ratios after training
  std::size_t steps = 0;
  bool converged = false;
};

struct divergence_error : std::runtime_error {
  TrainResult partial;
  explicit divergence_error(TrainResult r)
      : std::runtime_error("training diverged: non-finite loss"),
        partial(std::move(r)) {}
};

inline constexpr double kConvergedLoss = 1e-4;
inline constexpr double kExactStopLoss = 1e-12;

inline Vec achieved_scales(const ScalingOperator& ws, const ToyDataset& ds) {
  Vec out;
  out.reserve(ds.base_points.size());
  for (const BallPoint& p : ds.base_points) {
    const double base = norm(p.coords);
    out.push_back(base < kZeroNorm ? 1.0 : norm(matvec(ws, p.coords)) / base);
  }
  return out;
}

// Full-batch SGD with momentum on the operator parameters, in place.
// Deterministic given the dataset; stops early only when the loss is
// numerically zero. On divergence the operator is rolled back to the last
// parameters with a finite loss and the error carries that state's curve.
inline TrainResult train(const ToyDataset& ds, ScalingOperator& ws, double lr,
                         double momentum, std::size_t max_steps) {
  TrainResult res;
  Vec velocity(ws.params.size(), 0.0);
  Vec last_finite = ws.params;
  for (std::size_t step = 0; step < max_steps; ++step) {
    auto [loss, grad] = radius_loss_grad(ws, ds);
    if (!std::isfinite(loss)) {
      ws.params = last_finite;
      res.final_scales = achieved_scales(ws, ds);
      throw divergence_error(std::move(res));
    }
    last_finite = ws.params;
    res.loss_curve.push_back(loss);
    if (loss < kExactStopLoss) {
      res.final_scales = achieved_scales(ws, ds);
      res.converged = true;
      return res;
    }
    sgd_step(ws.params, velocity, grad.grads, lr, momentum);
    ++res.steps;
  }
  const double final_loss = radius_loss(ws, ds);
  if (!std::isfinite(final_loss)) {
    ws.params = last_finite;
    res.final_scales = achieved_scales(ws, ds);
    throw divergence_error(std::move(res));
  }
  res.loss_curve.push_back(final_loss);
  res.final_scales = achieved_scales(ws, ds);
  res.converged = final_loss < kConvergedLoss;
  return res;
}

struct RadiusHistogram {
  std::vector<std::size_t> counts;
  double normalizer = 0.0;       // (2/sqrt(c)) artanh(1 - eps)
  double mean_normalized = 0.0;  // mean of the normalized radii themselves
};

// Radii normalized to [0, 1] by the maximum clamped radius, then binned.
inline RadiusHistogram radius_histogram(const std::vector<BallPoint>& points,
                                        std::size_t bins) {
  if (points.empty()) throw std::invalid_argument("radius_histogram: empty input");
  if (bins < 1) throw std::invalid_argument("radius_histogram: bins must be >= 1");
  RadiusHistogram h;
  h.counts.assign(bins, 0);
  h.normalizer = max_radius(points.front().curvature);
  double sum = 0.0;
  for (const BallPoint& p : points) {
    if (p.curvature != points.front().curvature)
      throw std::invalid_argument("radius_histogram: mixed curvatures");
    const double r = hyperbolic_radius(p) / h.normalizer;
    sum += r;
    std::size_t idx = static_cast<std::size_t>(r * static_cast<double>(bins));
    if (idx >= bins) idx = bins - 1;
    ++h.counts[idx];
  }
  h.mean_normalized = sum / static_cast<double>(points.size());
  return h;
}

}  // namespace hyperadapt
