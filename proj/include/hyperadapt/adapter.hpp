#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hyperadapt/poincare.hpp"
#include "hyperadapt/scaling.hpp"

// The weight-adjustment operator: a frozen pre-trained matrix W0 has each
// column lifted into the ball, rescaled by a Mobius action, and mapped back:
//
//   scalar form   W = log0( s  (x) exp0(W0) )
//   matrix form   W = log0( Ws (x) exp0(W0) )
//
// Columns are independent ball points; the scaling operator acts on the
// feature (row) dimension. Zero columns pass through unchanged with an
// effective scale of 1.

namespace hyperadapt {

struct FrozenWeight {
  Matrix matrix;  // n x m, n = feature dim, m = columns; never updated

  std::size_t feature_dim() const { return matrix.rows; }
  std::size_t columns() const { return matrix.cols; }
};

inline FrozenWeight make_frozen(Matrix m) {
  if (m.rows == 0 || m.cols == 0)
    throw std::invalid_argument("frozen weight must be at least 1x1");
  if (!all_finite(m.data))
    throw std::invalid_argument("frozen weight must be finite");
  return FrozenWeight{std::move(m)};
}

// The adapter's lifting convention: a Euclidean vector is a tangent vector
// at the origin and enters the ball through the exp map.
inline BallPoint lift(const Vec& v, Curvature c) {
  return exp_map_origin(TangentVector{v, c});
}

// Structured overload of the matrix action.
inline BallPoint mobius_matrix_mul(const ScalingOperator& op, const BallPoint& x) {
  detail::require_interior(x, "mobius_matrix_mul");
  if (op.dim != x.dim())
    throw std::invalid_argument("mobius_matrix_mul: operator/point dimension mismatch");
  return detail::mobius_image(matvec(op, x.coords), x);
}

inline Matrix adjust_weight_scalar(const FrozenWeight& w0, double s, Curvature c) {
  if (!std::isfinite(s))
    throw std::invalid_argument("adjust_weight_scalar: non-finite scale");
  Matrix out(w0.feature_dim(), w0.columns());
  for (std::size_t j = 0; j < w0.columns(); ++j) {
    const BallPoint lifted = lift(w0.matrix.col(j), c);
    const TangentVector adj = log_map_origin(mobius_scalar_mul(s, lifted));
    out.set_col(j, adj.coords);
  }
  return out;
}

inline Matrix adjust_weight_matrix(const FrozenWeight& w0,
                                   const ScalingOperator& ws, Curvature c) {
  if (ws.dim != w0.feature_dim())
    throw std::invalid_argument("adjust_weight_matrix: operator dim must match feature dim");
  Matrix out(w0.feature_dim(), w0.columns());
  for (std::size_t j = 0; j < w0.columns(); ++j) {
    const BallPoint lifted = lift(w0.matrix.col(j), c);
    const TangentVector adj = log_map_origin(mobius_matrix_mul(ws, lifted));
    out.set_col(j, adj.coords);
  }
  return out;
}

struct AdapterLayer {
  FrozenWeight frozen;
  ScalingOperator scaling;
  Curvature curvature;
  std::optional<double> scalar_mode;  // when set, the scalar path is active
};

inline AdapterLayer make_layer(FrozenWeight frozen, ScalingOperator scaling,
                               Curvature c,
                               std::optional<double> scalar_mode = std::nullopt) {
  if (!scalar_mode && scaling.dim != frozen.feature_dim())
    throw std::invalid_argument("scaling dim must equal the frozen feature dim");
  return AdapterLayer{std::move(frozen), std::move(scaling), c, scalar_mode};
}

inline Matrix adjusted_weight(const AdapterLayer& layer) {
  if (layer.scalar_mode)
    return adjust_weight_scalar(layer.frozen, *layer.scalar_mode, layer.curvature);
  return adjust_weight_matrix(layer.frozen, layer.scaling, layer.curvature);
}

// Y = W_adj * X, an ordinary Euclidean product of the adjusted weight.
inline Matrix forward(const AdapterLayer& layer, const Matrix& x) {
  if (x.rows != layer.frozen.columns())
    throw std::invalid_argument("forward: inner dimensions disagree");
  return adjusted_weight(layer).matmul(x);
}

struct RadiusScale {
  double scale = 1.0;
  BallPoint point;
};

// Representation-level radius scaling: lift y0, act with the operator, and
// report the realized ratio s = |Ws y^| / |y^|. The adjusted point's radius
// is exactly s times the lifted radius.
inline RadiusScale representation_radius_scale(const Vec& y0,
                                               const ScalingOperator& ws,
                                               Curvature c) {
  if (!all_finite(y0))
    throw std::invalid_argument("representation_radius_scale: non-finite input");
  if (y0.size() != ws.dim)
    throw std::invalid_argument("representation_radius_scale: dimension mismatch");
  const BallPoint lifted = lift(y0, c);
  const double base = norm(lifted.coords);
  if (base < kZeroNorm) return RadiusScale{1.0, origin(y0.size(), c)};
  const Vec image = matvec(ws, lifted.coords);
  const double scale = norm(image) / base;
  return RadiusScale{scale, detail::mobius_image(image, lifted)};
}

struct ColumnScale {
  double radius_before = 0.0;
  double radius_after = 0.0;
  double effective_scale = 1.0;
};

struct AdapterReport {
  std::vector<ColumnScale> per_column;
  double scale_mean = 1.0;
  double scale_min = 1.0;
  double scale_max = 1.0;
  std::size_t param_overhead = 0;
  // Report-only metric: radius of the exp-lifted flattened matrix.
  double frobenius_radius_before = 0.0;
  double frobenius_radius_after = 0.0;
};

namespace detail {

inline double flattened_radius(const Matrix& m, Curvature c) {
  return hyperbolic_radius(lift(m.data, c));
}

}  // namespace detail

inline AdapterReport report(const AdapterLayer& layer) {
  const Curvature c = layer.curvature;
  const Matrix adjusted = adjusted_weight(layer);
  AdapterReport rep;
  rep.per_column.reserve(layer.frozen.columns());
  double sum = 0.0;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < layer.frozen.columns(); ++j) {
    ColumnScale cs;
    cs.radius_before = hyperbolic_radius(lift(layer.frozen.matrix.col(j), c));
    cs.radius_after = hyperbolic_radius(lift(adjusted.col(j), c));
    cs.effective_scale =
        cs.radius_before > 0.0 ? cs.radius_after / cs.radius_before : 1.0;
    sum += cs.effective_scale;
    mn = std::min(mn, cs.effective_scale);
    mx = std::max(mx, cs.effective_scale);
    rep.per_column.push_back(cs);
  }
  rep.scale_mean = sum / static_cast<double>(rep.per_column.size());
  rep.scale_min = mn;
  rep.scale_max = mx;
  rep.param_overhead = layer.scalar_mode ? 1 : param_count(layer.scaling);
  rep.frobenius_radius_before = detail::flattened_radius(layer.frozen.matrix, c);
  rep.frobenius_radius_after = detail::flattened_radius(adjusted, c);
  return rep;
}

}  // namespace hyperadapt
