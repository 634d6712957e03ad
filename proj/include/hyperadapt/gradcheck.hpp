#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperadapt/grad.hpp"
#include "hyperadapt/rng.hpp"
#include "hyperadapt/toy.hpp"

// Seeded gradient-check harness. Two analytic paths are checked against the
// central-difference oracle for every operator kind:
//   weight_vjp    d<upstream, adjusted weight>/d params
//   radius_loss   the training objective's parameter gradient
// Columns inside the boundary clamp band are excluded from both sides of
// the weight check and counted.

namespace hyperadapt {

struct GradCheckReport {
  MatrixKind kind = MatrixKind::diagonal;
  std::string path;  // "weight_vjp" or "radius_loss"
  std::size_t cases = 0;
  std::size_t excluded_columns = 0;
  double max_rel_error = 0.0;
  std::size_t worst_case = 0;
  std::size_t worst_param = 0;
  bool pass = false;
};

namespace detail {

inline std::size_t structural_for(MatrixKind kind, std::size_t n, std::size_t i) {
  if (kind == MatrixKind::block_diagonal) return 2;
  if (kind == MatrixKind::banded) return std::min(n - 1, 1 + i % 3);
  return 0;
}

}  // namespace detail

// One random layer per case. Columns sit in the positive orthant with
// components bounded away from zero and the cotangent is positive, so every
// parameter's gradient is bounded below and the relative comparison against
// finite differences carries full force (no tiny-denominator noise).
inline GradCheckReport run_grad_check(MatrixKind kind, const GradCheckConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed ^ (static_cast<std::uint64_t>(kind) + 1));
  const double curvatures[] = {0.01, 0.1, 1.0};
  const std::size_t dims[] = {4, 8, 16};
  GradCheckReport report;
  report.kind = kind;
  report.path = "weight_vjp";
  for (std::size_t case_i = 0; case_i < cfg.samples; ++case_i) {
    const std::size_t n = dims[case_i % 3];
    const std::size_t m = 2 + case_i % 3;
    const Curvature c(curvatures[(case_i / 3) % 3]);
    Matrix w0(n, m);
    for (std::size_t j = 0; j < m; ++j) {
      Vec col(n);
      double nn = 0.0;
      for (double& x : col) {
        x = rng.uniform(0.3, 1.0);
        nn += x * x;
      }
      nn = std::sqrt(nn);
      const double k = std::atanh(rng.uniform(0.1, 0.8)) / c.sqrt_value();
      for (double& x : col) x *= k / nn;
      w0.set_col(j, col);
    }
    const FrozenWeight frozen = make_frozen(std::move(w0));
    const std::size_t structural = detail::structural_for(kind, n, case_i);
    ScalingOperator op =
        init_identity(kind, n, kind == MatrixKind::block_diagonal ? structural : 0,
                      kind == MatrixKind::banded ? structural : 0);
    for (double& p : op.params) p += 0.2 * rng.normal();
    // positive cotangent, scaled so the loss magnitude is curvature-free
    Matrix upstream(n, m);
    for (double& v : upstream.data) v = rng.uniform(0.5, 1.5) * c.sqrt_value();

    const WeightVjp vjp = vjp_adjust_weight_matrix(frozen, op, c, upstream);
    report.excluded_columns += vjp.excluded_columns.size();

    // FD differentiates the full nonlinear composition, skipping the same
    // columns the analytic path excluded.
    const auto& excluded = vjp.excluded_columns;
    const LossFn loss = [&](std::span<const double> p) {
      ScalingOperator probe = op;
      probe.params.assign(p.begin(), p.end());
      const Matrix adj = adjust_weight_matrix(frozen, probe, c);
      double acc = 0.0;
      std::size_t e = 0;
      for (std::size_t j = 0; j < adj.cols; ++j) {
        if (e < excluded.size() && excluded[e] == j) {
          ++e;
          continue;
        }
        for (std::size_t i = 0; i < adj.rows; ++i)
          acc += upstream(i, j) * adj(i, j);
      }
      return acc;
    };
    const Vec fd = finite_diff_oracle(loss, op.params, cfg);
    for (std::size_t i = 0; i < fd.size(); ++i) {
      const double rel =
          std::abs(vjp.grad.grads[i] - fd[i]) / (std::abs(fd[i]) + cfg.abs_tol);
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_case = case_i;
        report.worst_param = i;
      }
    }
    ++report.cases;
  }
  report.pass = report.max_rel_error < cfg.rel_tol;
  return report;
}

// Training-objective gradient against the oracle on small mixed-target
// tasks. Unlike the weight path this objective is genuinely nonlinear in
// the parameters, so it also guards the oracle's step size.
inline GradCheckReport run_radius_grad_check(MatrixKind kind,
                                             const GradCheckConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed ^ (0x100 + static_cast<std::uint64_t>(kind)));
  GradCheckReport report;
  report.kind = kind;
  report.path = "radius_loss";
  for (std::size_t case_i = 0; case_i < cfg.samples; ++case_i) {
    ToyTask task;
    task.dim = 4 + 4 * (case_i % 3);
    task.samples = 8 + case_i % 8;
    task.seed = rng.next_u64();
    const ToyDataset ds = generate_dataset(task);
    const std::size_t structural = detail::structural_for(kind, task.dim, case_i);
    ScalingOperator op = init_identity(
        kind, task.dim, kind == MatrixKind::block_diagonal ? structural : 0,
        kind == MatrixKind::banded ? structural : 0);
    for (double& p : op.params) p += 0.1 * rng.normal();
    const auto [loss, grad] = radius_loss_grad(op, ds);
    (void)loss;
    const LossFn fn = [&](std::span<const double> p) {
      ScalingOperator probe = op;
      probe.params.assign(p.begin(), p.end());
      return radius_loss(probe, ds);
    };
    const Vec fd = finite_diff_oracle(fn, op.params, cfg);
    for (std::size_t i = 0; i < fd.size(); ++i) {
      const double rel =
          std::abs(grad.grads[i] - fd[i]) / (std::abs(fd[i]) + cfg.abs_tol);
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_case = case_i;
        report.worst_param = i;
      }
    }
    ++report.cases;
  }
  report.pass = report.max_rel_error < cfg.rel_tol;
  return report;
}

inline std::vector<GradCheckReport> run_grad_checks_all_kinds(
    const GradCheckConfig& cfg) {
  std::vector<GradCheckReport> out;
  for (MatrixKind kind : {MatrixKind::diagonal, MatrixKind::block_diagonal,
                          MatrixKind::banded, MatrixKind::dense}) {
    out.push_back(run_grad_check(kind, cfg));
    out.push_back(run_radius_grad_check(kind, cfg));
  }
  return out;
}

}  // namespace hyperadapt
