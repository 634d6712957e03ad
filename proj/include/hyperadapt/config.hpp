#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hyperadapt/numeric.hpp"
#include "hyperadapt/scaling.hpp"
#include "hyperadapt/version.hpp"

// Run configuration shared by every subcommand: defaults, then a flat
// key=value config file, then CLI flags (flags win). All values are
// validated before any computation, and every emitted report carries the
// fully resolved config.

namespace hyperadapt {

struct RunConfig {
  double curvature = 0.01;
  MatrixKind kind = MatrixKind::diagonal;
  std::size_t block_size = 4;
  std::size_t bandwidth = 1;
  std::optional<double> scalar;
  std::uint64_t seed = 42;
  double lr = 1e-2;
  double momentum = 0.98;
  std::size_t max_steps = 500;
  std::optional<double> eps_ball;  // testing override; HYPERADAPT_EPS wins

  // toy task shape
  std::size_t dim = 32;
  std::size_t columns = 64;
  std::size_t samples = 256;
  std::size_t bins = 50;
  std::optional<double> targets_uniform;

  // gradient checking
  double fd_step = 1e-6;
  double fd_rel_tol = 1e-5;
  double fd_abs_tol = 1e-8;
  std::size_t fd_samples = 100;

  std::string suites;  // comma-separated filter for verify; empty = all

  std::size_t structural() const {
    return kind == MatrixKind::block_diagonal
               ? block_size
               : (kind == MatrixKind::banded ? bandwidth : 0);
  }

  void validate() const {
    if (!std::isfinite(curvature) || curvature <= 0.0)
      throw std::invalid_argument("curvature must be a positive finite real");
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    // exercises the divisibility / bandwidth invariants
    param_count(kind, dim, kind == MatrixKind::block_diagonal ? block_size : 0,
                kind == MatrixKind::banded ? bandwidth : 0);
    if (scalar && !std::isfinite(*scalar))
      throw std::invalid_argument("scalar must be finite");
    if (!(lr >= 0.0) || !std::isfinite(lr))
      throw std::invalid_argument("lr must be >= 0");
    if (!(momentum >= 0.0 && momentum < 1.0))
      throw std::invalid_argument("momentum must be in [0, 1)");
    if (columns < 1 || samples < 1)
      throw std::invalid_argument("columns and samples must be >= 1");
    if (bins < 1) throw std::invalid_argument("bins must be >= 1");
    if (!(fd_step > 0.0)) throw std::invalid_argument("step must be > 0");
    if (!(fd_rel_tol > 0.0) || !(fd_abs_tol > 0.0))
      throw std::invalid_argument("tolerances must be > 0");
    if (fd_samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (targets_uniform && !(*targets_uniform > 0.0))
      throw std::invalid_argument("targets-uniform must be > 0");
    if (eps_ball && !(*eps_ball > 0.0 && *eps_ball < 1.0))
      throw std::invalid_argument("eps_ball must lie in (0, 1)");
  }

  // Applied once after resolution, before any computation.
  void apply_epsilon() const {
    if (eps_ball) set_ball_epsilon(*eps_ball);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["curvature"] = curvature;
    j["kind"] = to_string(kind);
    j["block_size"] = block_size;
    j["bandwidth"] = bandwidth;
    if (scalar) j["scalar"] = *scalar;
    j["seed"] = seed;
    j["lr"] = lr;
    j["momentum"] = momentum;
    j["max_steps"] = max_steps;
    j["dim"] = dim;
    j["columns"] = columns;
    j["samples"] = samples;
    j["bins"] = bins;
    if (targets_uniform) j["targets_uniform"] = *targets_uniform;
    j["fd_step"] = fd_step;
    j["fd_rel_tol"] = fd_rel_tol;
    j["fd_abs_tol"] = fd_abs_tol;
    j["fd_samples"] = fd_samples;
    if (!suites.empty()) j["suites"] = suites;
    j["eps_ball"] = ball_epsilon();
    return j;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + v + "'");
  }
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v + "'");
  }
}

}  // namespace detail

// One key=value pair; shared by the file parser and tests.
inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
  if (key == "curvature") cfg.curvature = detail::to_double(key, value);
  else if (key == "kind") cfg.kind = kind_from_string(value);
  else if (key == "block_size") cfg.block_size = detail::to_u64(key, value);
  else if (key == "bandwidth") cfg.bandwidth = detail::to_u64(key, value);
  else if (key == "scalar") cfg.scalar = detail::to_double(key, value);
  else if (key == "seed") cfg.seed = detail::to_u64(key, value);
  else if (key == "lr") cfg.lr = detail::to_double(key, value);
  else if (key == "momentum") cfg.momentum = detail::to_double(key, value);
  else if (key == "max_steps") cfg.max_steps = detail::to_u64(key, value);
  else if (key == "eps_ball") cfg.eps_ball = detail::to_double(key, value);
  else if (key == "dim") cfg.dim = detail::to_u64(key, value);
  else if (key == "columns") cfg.columns = detail::to_u64(key, value);
  else if (key == "samples") cfg.samples = detail::to_u64(key, value);
  else if (key == "bins") cfg.bins = detail::to_u64(key, value);
  else if (key == "targets_uniform") cfg.targets_uniform = detail::to_double(key, value);
  else if (key == "fd_step" || key == "step") cfg.fd_step = detail::to_double(key, value);
  else if (key == "fd_rel_tol") cfg.fd_rel_tol = detail::to_double(key, value);
  else if (key == "fd_abs_tol") cfg.fd_abs_tol = detail::to_double(key, value);
  else if (key == "fd_samples") cfg.fd_samples = detail::to_u64(key, value);
  else if (key == "suites") cfg.suites = value;
  else throw std::invalid_argument("unknown config key: " + key);
}

// Flat key=value file; '#' starts a comment, blank lines are skipped.
inline void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file: " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    apply_config_entry(cfg, detail::trim(line.substr(0, eq)),
                       detail::trim(line.substr(eq + 1)));
  }
}

}  // namespace hyperadapt
