#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "hyperadapt/vec.hpp"

namespace hyperadapt {

// Deterministic RNG. The raw engine (mt19937_64) is standard-specified, and
// the variate transforms are hand-rolled here so that a seed produces the
// same stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    has_spare_ = true;
    return mag * std::cos(two_pi * u2);
  }

  Vec normal_vec(std::size_t n) {
    Vec v(n);
    for (double& x : v) x = normal();
    return v;
  }

  // Uniform direction on the unit sphere.
  Vec unit_vec(std::size_t n) {
    Vec v = normal_vec(n);
    double nv = norm(v);
    while (nv < 1e-12) {
      v = normal_vec(n);
      nv = norm(v);
    }
    for (double& x : v) x /= nv;
    return v;
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Haar-distributed orthonormal frame: Gram-Schmidt on Gaussian columns.
inline std::vector<Vec> random_orthonormal_frame(Rng& rng, std::size_t n) {
  std::vector<Vec> cols(n);
  for (std::size_t j = 0; j < n; ++j) {
    double nn = 0.0;
    do {
      cols[j] = rng.normal_vec(n);
      for (std::size_t k = 0; k < j; ++k) {
        const double d = dot(cols[j], cols[k]);
        for (std::size_t t = 0; t < n; ++t) cols[j][t] -= d * cols[k][t];
      }
      nn = norm(cols[j]);
    } while (nn < 1e-12);  // degenerate draw; resample the column
    for (double& t : cols[j]) t /= nn;
  }
  return cols;
}

}  // namespace hyperadapt
