#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hyperadapt/adapter.hpp"

// Analytic reverse-mode gradients for the adapter path plus the
// finite-difference oracle that keeps them honest.

namespace hyperadapt {

struct GradCheckConfig {
  double step = 1e-6;     // central-difference step
  double rel_tol = 1e-5;
  double abs_tol = 1e-8;
  std::size_t samples = 100;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw std::invalid_argument("tolerances must be > 0");
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  }
};

// Gradient aligned with the operator's canonical parameter ordering.
struct ParamGradient {
  Vec grads;
};

struct WeightVjp {
  ParamGradient grad;
  // Columns whose lifted point or Mobius image sits inside the clamp band;
  // the derivative there is not the smooth one, so they are skipped and
  // reported rather than silently included.
  std::vector<std::size_t> excluded_columns;
};

namespace detail {

// Margin test for differentiability: both the lifted column and the image
// of the Mobius action must stay 10*eps clear of the boundary clamp.
inline bool column_in_clamp_band(double sc_lifted_norm, double scaled_arg) {
  const double lim = 1.0 - 10.0 * ball_epsilon();
  return sc_lifted_norm > lim || std::tanh(scaled_arg) > lim;
}

}  // namespace detail

// d <upstream, W> / d params for W = log0(Ws (x) exp0(W0)).
//
// Away from the clamps the composite collapses per column to
//   u = k * Ws * w^,   k = artanh(sqrt(c)|w^|) / (sqrt(c)|w^|),
// because the artanh of the log map cancels the tanh of the Mobius norm
// exactly (the chain-rule factors 1/(1-m^2) and (1-m^2) annihilate). The
// VJP is therefore k * upstream * w^T gathered at structural positions.
inline WeightVjp vjp_adjust_weight_matrix(const FrozenWeight& w0,
                                          const ScalingOperator& ws,
                                          Curvature c, const Matrix& upstream) {
  if (ws.dim != w0.feature_dim())
    throw std::invalid_argument("vjp_adjust_weight_matrix: operator dim mismatch");
  if (upstream.rows != w0.feature_dim() || upstream.cols != w0.columns())
    throw std::invalid_argument("vjp_adjust_weight_matrix: upstream shape mismatch");
  const std::size_t n = w0.feature_dim();
  const double sc = c.sqrt_value();
  Matrix acc(n, n);
  WeightVjp out;
  for (std::size_t j = 0; j < w0.columns(); ++j) {
    const BallPoint lifted = lift(w0.matrix.col(j), c);
    const double a = norm(lifted.coords);
    if (a < kZeroNorm) continue;  // constant zero column, zero gradient
    const double r = detail::radial_artanh(sc * a);
    const Vec image = matvec(ws, lifted.coords);
    const double q = norm(image);
    const double scaled_arg = (q / a) * r;
    if (detail::column_in_clamp_band(sc * a, scaled_arg)) {
      out.excluded_columns.push_back(j);
      continue;
    }
    const double k = r / (sc * a);
    const Vec g = upstream.col(j);
    for (std::size_t row = 0; row < n; ++row) {
      const double kg = k * g[row];
      if (kg == 0.0) continue;
      for (std::size_t col = 0; col < n; ++col)
        acc(row, col) += kg * lifted.coords[col];
    }
  }
  out.grad.grads = gather_structural(ws, acc);
  return out;
}

using LossFn = std::function<double(std::span<const double>)>;

// Central differences, one coordinate at a time.
inline Vec finite_diff_oracle(const LossFn& loss, std::span<const double> params,
                              const GradCheckConfig& cfg) {
  cfg.validate();
  Vec p(params.begin(), params.end());
  Vec g(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + cfg.step;
    const double fp = loss(p);
    p[i] = saved - cfg.step;
    const double fm = loss(p);
    p[i] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::domain_error("finite_diff_oracle: non-finite loss");
    g[i] = (fp - fm) / (2.0 * cfg.step);
  }
  return g;
}

// Classical momentum: v <- momentum*v + g; p <- p - lr*v. The velocity
// buffer belongs to the training loop.
inline void sgd_step(Vec& params, Vec& velocity, std::span<const double> grads,
                     double lr, double momentum) {
  if (params.size() != grads.size() || velocity.size() != params.size())
    throw std::invalid_argument("sgd_step: length mismatch");
  if (!(lr >= 0.0)) throw std::invalid_argument("sgd_step: lr must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw std::invalid_argument("sgd_step: momentum must be in [0, 1)");
  for (std::size_t i = 0; i < params.size(); ++i) {
    velocity[i] = momentum * velocity[i] + grads[i];
    params[i] -= lr * velocity[i];
  }
}

}  // namespace hyperadapt
