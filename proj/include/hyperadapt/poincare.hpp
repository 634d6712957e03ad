#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "hyperadapt/numeric.hpp"
#include "hyperadapt/vec.hpp"

// Poincare ball primitives. The ball of curvature -c (c > 0) is the set
// {x : c*|x|^2 < 1}, radius 1/sqrt(c). All gyrovector operations used by the
// radius-scaling identities live here.

namespace hyperadapt {

class Curvature {
 public:
  explicit Curvature(double c) : c_(checked(c)), sqrt_c_(std::sqrt(c)) {}

  double value() const { return c_; }
  double sqrt_value() const { return sqrt_c_; }
  double ball_radius() const { return 1.0 / sqrt_c_; }

  friend bool operator==(const Curvature& a, const Curvature& b) {
    return a.c_ == b.c_;
  }
  friend bool operator!=(const Curvature& a, const Curvature& b) {
    return !(a == b);
  }

 private:
  static double checked(double c) {
    if (!std::isfinite(c) || c <= 0.0)
      throw std::invalid_argument("curvature must be a finite positive real");
    return c;
  }

  double c_;
  double sqrt_c_;
};

// Point strictly inside the ball. Fields are public so callers (and tests)
// can build raw values; `ball_point` is the checked constructor.
struct BallPoint {
  Vec coords;
  Curvature curvature;

  std::size_t dim() const { return coords.size(); }
};

// Vector in the tangent space at the origin (all of R^n).
struct TangentVector {
  Vec coords;
  Curvature curvature;

  std::size_t dim() const { return coords.size(); }
};

inline bool is_interior(const BallPoint& x) {
  return all_finite(x.coords) &&
         x.curvature.value() * norm_sq(x.coords) < 1.0;
}

namespace detail {

inline void require_interior(const BallPoint& x, const char* who) {
  if (x.coords.empty()) throw std::domain_error(std::string(who) + ": empty point");
  if (!all_finite(x.coords))
    throw std::domain_error(std::string(who) + ": non-finite coordinates");
  if (x.curvature.value() * norm_sq(x.coords) >= 1.0)
    throw std::domain_error(std::string(who) + ": point on or outside the ball");
}

inline void require_same_frame(const BallPoint& x, const BallPoint& y,
                               const char* who) {
  if (x.dim() != y.dim())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  if (x.curvature != y.curvature)
    throw std::invalid_argument(std::string(who) + ": curvature mismatch");
}

// artanh(sqrt(c)*|x|) with the interior clamp applied first.
inline double radial_artanh(double sc_norm) {
  const double lim = 1.0 - ball_epsilon();
  return clamped_artanh(std::min(sc_norm, lim));
}

}  // namespace detail

inline BallPoint origin(std::size_t n, Curvature c) {
  return BallPoint{Vec(n, 0.0), c};
}

// Clamp an arbitrary finite vector into the ball: interior vectors pass
// through unchanged, anything at or beyond the guard band is rescaled to
// norm (1 - eps)/sqrt(c) along its own direction.
inline BallPoint project_to_ball(Vec v, Curvature c) {
  if (!all_finite(v)) throw std::domain_error("project_to_ball: non-finite input");
  const double eps = ball_epsilon();
  const double lim = (1.0 - eps) / c.sqrt_value();
  const double n = norm(v);
  if (n > lim) {
    const double k = lim / n;
    for (double& x : v) x *= k;
  }
  return BallPoint{std::move(v), c};
}

inline BallPoint ball_point(Vec coords, Curvature c) {
  BallPoint p{std::move(coords), c};
  detail::require_interior(p, "ball_point");
  return p;
}

// lambda_{c,x} = 2 / (1 - c*|x|^2); equals 2 at the origin.
inline double conformal_factor(const BallPoint& x) {
  detail::require_interior(x, "conformal_factor");
  return 2.0 / (1.0 - x.curvature.value() * norm_sq(x.coords));
}

inline BallPoint mobius_neg(const BallPoint& x) {
  Vec v = x.coords;
  for (double& t : v) t = -t;
  return BallPoint{std::move(v), x.curvature};
}

// Mobius addition in the standard gyrovector form:
//   x (+) y = ((1 + 2c<x,y> + c|y|^2) x + (1 - c|x|^2) y)
//             / (1 + 2c<x,y> + c^2 |x|^2 |y|^2)
inline BallPoint mobius_add(const BallPoint& x, const BallPoint& y) {
  detail::require_same_frame(x, y, "mobius_add");
  detail::require_interior(x, "mobius_add");
  detail::require_interior(y, "mobius_add");
  const double c = x.curvature.value();
  const double xy = dot(x.coords, y.coords);
  const double x2 = norm_sq(x.coords);
  const double y2 = norm_sq(y.coords);
  const double ax = 1.0 + 2.0 * c * xy + c * y2;
  const double ay = 1.0 - c * x2;
  const double den = 1.0 + 2.0 * c * xy + c * c * x2 * y2;
  Vec out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (ax * x.coords[i] + ay * y.coords[i]) / den;
  return project_to_ball(std::move(out), x.curvature);
}

// exp at the origin: v |-> tanh(sqrt(c)|v|) * v / (sqrt(c)|v|).
inline BallPoint exp_map_origin(const TangentVector& v) {
  if (!all_finite(v.coords))
    throw std::domain_error("exp_map_origin: non-finite input");
  const double n = norm(v.coords);
  if (n < kZeroNorm) return origin(v.dim(), v.curvature);
  const double sc = v.curvature.sqrt_value();
  const double k = std::tanh(sc * n) / (sc * n);
  return project_to_ball(scaled(v.coords, k), v.curvature);
}

// log at the origin: x |-> artanh(sqrt(c)|x|) * x / (sqrt(c)|x|).
inline TangentVector log_map_origin(const BallPoint& x) {
  detail::require_interior(x, "log_map_origin");
  const double n = norm(x.coords);
  if (n < kZeroNorm) return TangentVector{Vec(x.dim(), 0.0), x.curvature};
  const double sc = x.curvature.sqrt_value();
  const double k = detail::radial_artanh(sc * n) / (sc * n);
  return TangentVector{scaled(x.coords, k), x.curvature};
}

// s (x) x: collinear with x, norm (1/sqrt(c)) tanh(s * artanh(sqrt(c)|x|)).
inline BallPoint mobius_scalar_mul(double s, const BallPoint& x) {
  detail::require_interior(x, "mobius_scalar_mul");
  if (!std::isfinite(s))
    throw std::domain_error("mobius_scalar_mul: non-finite scalar");
  const double n = norm(x.coords);
  if (n < kZeroNorm) return origin(x.dim(), x.curvature);
  const double sc = x.curvature.sqrt_value();
  const double r = detail::radial_artanh(sc * n);
  const double k = std::tanh(s * r) / (sc * n);
  return project_to_ball(scaled(x.coords, k), x.curvature);
}

namespace detail {

// Shared core of the matrix action: given the Euclidean image mx = M*x,
// the result points along mx with norm (1/sqrt(c)) tanh((|mx|/|x|) * r).
inline BallPoint mobius_image(Vec mx, const BallPoint& x) {
  const double n = norm(x.coords);
  if (n < kZeroNorm) return origin(x.dim(), x.curvature);
  const double q = norm(mx);
  if (q < kZeroNorm) return origin(x.dim(), x.curvature);
  const double sc = x.curvature.sqrt_value();
  const double r = radial_artanh(sc * n);
  const double ratio = q / n;
  const double k = std::tanh(ratio * r) / (sc * q);
  for (double& t : mx) t *= k;
  return project_to_ball(std::move(mx), x.curvature);
}

}  // namespace detail

// M (x) x, the flexible radius action. M = I returns x unchanged; a zero
// image collapses to the origin.
inline BallPoint mobius_matrix_mul(const Matrix& m, const BallPoint& x) {
  detail::require_interior(x, "mobius_matrix_mul");
  if (m.rows != m.cols || m.cols != x.dim())
    throw std::invalid_argument("mobius_matrix_mul: matrix must be n x n");
  if (!all_finite(m.data))
    throw std::domain_error("mobius_matrix_mul: non-finite matrix");
  return detail::mobius_image(m.matvec(x.coords), x);
}

// Rad_x = (2/sqrt(c)) artanh(sqrt(c)|x|): distance from x to the origin.
inline double hyperbolic_radius(const BallPoint& x) {
  detail::require_interior(x, "hyperbolic_radius");
  const double sc = x.curvature.sqrt_value();
  const double n = norm(x.coords);
  if (n < kZeroNorm) return 0.0;
  return (2.0 / sc) * detail::radial_artanh(sc * n);
}

// Gyrodistance (2/sqrt(c)) artanh(sqrt(c)|(-x) (+) y|). Reduces to the
// radius when y is compared against the origin.
inline double ball_distance(const BallPoint& x, const BallPoint& y) {
  detail::require_same_frame(x, y, "ball_distance");
  const BallPoint d = mobius_add(mobius_neg(x), y);
  const double sc = x.curvature.sqrt_value();
  const double n = norm(d.coords);
  if (n < kZeroNorm) return 0.0;
  return (2.0 / sc) * detail::radial_artanh(sc * n);
}

// Largest radius representable under the clamp; the histogram normalizer.
inline double max_radius(Curvature c) {
  const double sc = c.sqrt_value();
  return (2.0 / sc) * clamped_artanh(1.0 - ball_epsilon());
}

}  // namespace hyperadapt
