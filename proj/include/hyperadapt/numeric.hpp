#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

// Numeric guard constants shared by every ball operation. All arithmetic is
// 64-bit; 32-bit floats appear only in file payloads.

namespace hyperadapt {

// artanh arguments are clamped to [-(1 - kArtanhClamp), 1 - kArtanhClamp].
inline constexpr double kArtanhClamp = 1e-12;

// Vectors with norm below this are treated as the origin wherever a
// direction would have to be normalized.
inline constexpr double kZeroNorm = 1e-15;

inline constexpr double kDefaultBallEps = 1e-7;

namespace detail {

inline double& ball_eps_storage() {
  static double eps = [] {
    if (const char* env = std::getenv("HYPERADAPT_EPS")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end != env && v > 0.0 && v < 1.0) return v;
    }
    return kDefaultBallEps;
  }();
  return eps;
}

inline bool& ball_eps_env_locked() {
  static bool locked = std::getenv("HYPERADAPT_EPS") != nullptr;
  return locked;
}

}  // namespace detail

// Boundary guard: interior points are clamped so sqrt(c)*|x| <= 1 - eps
// before any artanh. Overridable via HYPERADAPT_EPS (testing only).
inline double ball_epsilon() { return detail::ball_eps_storage(); }

// Config-level override. The environment variable wins when set; callers
// adjust this once before computation (single-writer).
inline void set_ball_epsilon(double eps) {
  if (!(std::isfinite(eps)) || eps <= 0.0 || eps >= 1.0)
    throw std::invalid_argument("ball epsilon must lie in (0, 1)");
  if (!detail::ball_eps_env_locked()) detail::ball_eps_storage() = eps;
}

// artanh with the argument clamped away from +-1.
inline double clamped_artanh(double t) {
  const double lim = 1.0 - kArtanhClamp;
  return std::atanh(std::clamp(t, -lim, lim));
}

}  // namespace hyperadapt
