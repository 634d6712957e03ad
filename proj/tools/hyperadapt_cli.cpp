// Command-line surface: verify / adjust / train / check-grad / report.
//
// Exit codes: 0 pass, 1 property failure, 2 invalid config or usage,
// 3 file I/O error, 4 training divergence.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hyperadapt/hyperadapt.hpp"

namespace ha = hyperadapt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFail = 1;
constexpr int kExitConfigInvalid = 2;
constexpr int kExitIo = 3;
constexpr int kExitDivergence = 4;

// Flags are collected as optionals so that config-file values lose only to
// flags the user actually passed.
struct FlagValues {
  std::optional<double> curvature;
  std::optional<std::string> kind;
  std::optional<std::size_t> block_size;
  std::optional<std::size_t> bandwidth;
  std::optional<double> scalar;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr;
  std::optional<double> momentum;
  std::optional<std::size_t> max_steps;
  std::optional<std::size_t> dim;
  std::optional<std::size_t> bins;
  std::optional<double> targets_uniform;
  std::optional<double> step;
  std::optional<std::size_t> samples;  // check-grad sample count
  std::optional<std::string> suites;
  std::string config_path;
};

void add_common_flags(CLI::App* cmd, FlagValues& f) {
  cmd->add_option("--curvature", f.curvature, "ball curvature c > 0 (default 0.01)");
  cmd->add_option("--kind", f.kind, "scaling matrix kind: diagonal|block|banded|dense");
  cmd->add_option("--block-size", f.block_size, "block size for --kind block");
  cmd->add_option("--bandwidth", f.bandwidth, "bandwidth d for --kind banded");
  cmd->add_option("--scalar", f.scalar, "use the scalar adjustment path with this s");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--lr", f.lr, "learning rate");
  cmd->add_option("--momentum", f.momentum, "SGD momentum in [0,1)");
  cmd->add_option("--max-steps", f.max_steps, "training step budget");
  cmd->add_option("--dim", f.dim, "feature dimension for train/check-grad tasks");
  cmd->add_option("--config", f.config_path, "key=value config file (flags win)");
}

ha::RunConfig resolve_config(const FlagValues& f) {
  ha::RunConfig cfg;
  if (!f.config_path.empty())
    ha::load_config_file(cfg, f.config_path);
  if (f.curvature) cfg.curvature = *f.curvature;
  if (f.kind) cfg.kind = ha::kind_from_string(*f.kind);
  if (f.block_size) cfg.block_size = *f.block_size;
  if (f.bandwidth) cfg.bandwidth = *f.bandwidth;
  if (f.scalar) cfg.scalar = *f.scalar;
  if (f.seed) cfg.seed = *f.seed;
  if (f.lr) cfg.lr = *f.lr;
  if (f.momentum) cfg.momentum = *f.momentum;
  if (f.max_steps) cfg.max_steps = *f.max_steps;
  if (f.dim) cfg.dim = *f.dim;
  if (f.bins) cfg.bins = *f.bins;
  if (f.targets_uniform) cfg.targets_uniform = *f.targets_uniform;
  if (f.step) cfg.fd_step = *f.step;
  if (f.samples) cfg.fd_samples = *f.samples;
  if (f.suites) cfg.suites = *f.suites;
  cfg.validate();
  cfg.apply_epsilon();
  return cfg;
}

// Build the operator for adjust/report: explicit file > identity of --kind.
ha::ScalingOperator operator_for_weights(const ha::RunConfig& cfg,
                                         const std::string& params_in,
                                         std::size_t n) {
  if (!params_in.empty()) {
    ha::ScalingOperator op = ha::read_operator(params_in);
    if (op.dim != n)
      throw std::invalid_argument("operator dim does not match weight rows");
    return op;
  }
  const std::size_t block = cfg.kind == ha::MatrixKind::block_diagonal ? cfg.block_size : 0;
  const std::size_t band = cfg.kind == ha::MatrixKind::banded ? cfg.bandwidth : 0;
  return ha::init_identity(cfg.kind, n, block, band);
}

int cmd_verify(const ha::RunConfig& cfg, const std::string& out_path) {
  const auto results = ha::run_suites(cfg.seed, cfg.suites);
  bool all_pass = true;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    std::printf("suite %-13s %s  max_error=%.3g tol=%.0e samples=%zu excluded=%zu (%.2fs)\n",
                r.name.c_str(), r.pass ? "PASS" : "FAIL", r.max_error, r.tolerance,
                r.samples, r.excluded, r.seconds);
  }
  nlohmann::json j = ha::report_envelope(cfg);
  nlohmann::json suites = nlohmann::json::array();
  for (const auto& r : results) suites.push_back(ha::to_json(r));
  j["suites"] = suites;
  j["pass"] = all_pass;
  if (!out_path.empty()) ha::write_json(out_path, j);
  return all_pass ? kExitOk : kExitPropertyFail;
}

int cmd_adjust(const ha::RunConfig& cfg, const std::string& weights_in,
               const std::string& weights_out, const std::string& report_out,
               const std::string& params_in) {
  const ha::Tensor input = ha::read_tensor(weights_in);
  const ha::Matrix w0 = ha::tensor_to_matrix(input);
  const ha::FrozenWeight frozen = ha::make_frozen(w0);
  const ha::Curvature c(cfg.curvature);

  ha::ScalingOperator op = ha::init_identity(ha::MatrixKind::diagonal, frozen.feature_dim());
  std::optional<double> scalar = cfg.scalar;
  if (!scalar) op = operator_for_weights(cfg, params_in, frozen.feature_dim());

  const ha::AdapterLayer layer = ha::make_layer(frozen, op, c, scalar);
  const ha::Matrix adjusted = ha::adjusted_weight(layer);

  ha::Tensor out_tensor = ha::matrix_to_tensor(adjusted, input.dtype);
  ha::write_tensor(weights_out, out_tensor);

  // the adapter report always accompanies the adjusted weights
  const std::string report_path =
      report_out.empty() ? weights_out + ".report.json" : report_out;
  nlohmann::json j = ha::report_envelope(cfg);
  j["report"] = ha::to_json(ha::report(layer));
  j["weights_in"] = weights_in;
  j["weights_out"] = weights_out;
  ha::write_json(report_path, j);
  std::printf("adjusted %zux%zu weights -> %s\n", adjusted.rows, adjusted.cols,
              weights_out.c_str());
  return kExitOk;
}

int cmd_train(const ha::RunConfig& cfg, const std::string& out_prefix,
              const std::string& params_out) {
  ha::ToyTask task;
  task.dim = cfg.dim;
  task.columns = cfg.columns;
  task.samples = cfg.samples;
  task.curvature = cfg.curvature;
  task.uniform_target = cfg.targets_uniform;
  task.seed = cfg.seed;
  const ha::ToyDataset ds = ha::generate_dataset(task);
  const ha::Curvature c(cfg.curvature);

  const std::size_t block = cfg.kind == ha::MatrixKind::block_diagonal ? cfg.block_size : 0;
  const std::size_t band = cfg.kind == ha::MatrixKind::banded ? cfg.bandwidth : 0;
  ha::ScalingOperator ws = ha::init_identity(cfg.kind, cfg.dim, block, band);

  nlohmann::json j = ha::report_envelope(cfg);
  ha::TrainResult result;
  bool diverged = false;
  try {
    result = ha::train(ds, ws, cfg.lr, cfg.momentum, cfg.max_steps);
  } catch (const ha::divergence_error& e) {
    result = e.partial;
    diverged = true;
  }

  // Fig-style before/after radius histograms at the representation level.
  std::vector<ha::BallPoint> after;
  after.reserve(ds.base_points.size());
  for (const ha::BallPoint& p : ds.base_points)
    after.push_back(ha::mobius_matrix_mul(ws, p));
  const ha::RadiusHistogram hist_before = ha::radius_histogram(ds.base_points, cfg.bins);
  const ha::RadiusHistogram hist_after = ha::radius_histogram(after, cfg.bins);

  double target_mean = 0.0;
  for (std::size_t i = 0; i < ds.base_points.size(); ++i)
    target_mean += ds.target_scales[i] * ha::hyperbolic_radius(ds.base_points[i]);
  target_mean /= static_cast<double>(ds.base_points.size()) * hist_before.normalizer;

  j["train"] = ha::to_json(result);
  j["diverged"] = diverged;
  j["histogram"] = {{"bins", cfg.bins},
                    {"normalizer", hist_before.normalizer},
                    {"mean_before", hist_before.mean_normalized},
                    {"mean_after", hist_after.mean_normalized},
                    {"mean_target", target_mean}};

  // Weight-level view: the trained operator applied to a random frozen
  // layer of the task's column count.
  ha::Rng wrng(cfg.seed + 1);
  ha::Matrix demo(cfg.dim, cfg.columns);
  for (std::size_t col = 0; col < cfg.columns; ++col) {
    ha::Vec v = wrng.unit_vec(cfg.dim);
    const double u = wrng.uniform(0.1, 0.8);
    const double k = std::atanh(u) / c.sqrt_value();
    for (double& t : v) t *= k;
    demo.set_col(col, v);
  }
  const ha::AdapterLayer layer = ha::make_layer(ha::make_frozen(demo), ws, c);
  j["adapter_report"] = ha::to_json(ha::report(layer));

  const std::string prefix = out_prefix.empty() ? "train_out" : out_prefix;
  ha::write_json(prefix + ".json", j);
  ha::atomic_write_file(prefix + "_hist_before.csv", ha::histogram_csv(hist_before));
  ha::atomic_write_file(prefix + "_hist_after.csv", ha::histogram_csv(hist_after));
  if (!params_out.empty()) ha::write_operator(params_out, ws);

  const double final_loss = result.loss_curve.empty() ? 0.0 : result.loss_curve.back();
  std::printf("train: steps=%zu final_loss=%.6g converged=%s -> %s.json\n",
              result.steps, final_loss, result.converged ? "true" : "false",
              prefix.c_str());
  return diverged ? kExitDivergence : kExitOk;
}

int cmd_check_grad(const ha::RunConfig& cfg, const std::string& out_path) {
  ha::GradCheckConfig gc;
  gc.step = cfg.fd_step;
  gc.rel_tol = cfg.fd_rel_tol;
  gc.abs_tol = cfg.fd_abs_tol;
  gc.samples = cfg.fd_samples;
  gc.seed = cfg.seed;
  gc.validate();
  const auto reports = ha::run_grad_checks_all_kinds(gc);
  bool all_pass = true;
  nlohmann::json j = ha::report_envelope(cfg);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    all_pass = all_pass && r.pass;
    arr.push_back(ha::to_json(r));
    std::printf("check-grad %-9s %-11s %s  max_rel_error=%.3g cases=%zu excluded=%zu\n",
                ha::to_string(r.kind), r.path.c_str(), r.pass ? "PASS" : "FAIL",
                r.max_rel_error, r.cases, r.excluded_columns);
  }
  j["kinds"] = arr;
  j["pass"] = all_pass;
  if (!out_path.empty()) ha::write_json(out_path, j);
  return all_pass ? kExitOk : kExitPropertyFail;
}

int cmd_report(const ha::RunConfig& cfg, const std::string& weights_in,
               const std::string& params_in, const std::string& out_path) {
  const ha::Tensor input = ha::read_tensor(weights_in);
  const ha::FrozenWeight frozen = ha::make_frozen(ha::tensor_to_matrix(input));
  const ha::Curvature c(cfg.curvature);
  ha::ScalingOperator op = ha::init_identity(ha::MatrixKind::diagonal, frozen.feature_dim());
  std::optional<double> scalar = cfg.scalar;
  if (!scalar) op = operator_for_weights(cfg, params_in, frozen.feature_dim());
  const ha::AdapterLayer layer = ha::make_layer(frozen, op, c, scalar);
  nlohmann::json j = ha::report_envelope(cfg);
  j["report"] = ha::to_json(ha::report(layer));
  if (out_path.empty())
    std::printf("%s\n", j.dump(2).c_str());
  else
    ha::write_json(out_path, j);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poincare-ball radius adjustment toolkit"};
  app.require_subcommand(1);

  FlagValues verify_f, adjust_f, train_f, grad_f, report_f;
  std::string verify_out, adjust_in, adjust_out, adjust_report, adjust_params;
  std::string train_out, train_params_out, grad_out, report_in, report_params,
      report_out;

  CLI::App* verify = app.add_subcommand("verify", "run the property suites");
  add_common_flags(verify, verify_f);
  verify->add_option("--suites", verify_f.suites,
                     "comma-separated suite filter (default: all)");
  verify->add_option("--out", verify_out, "JSON report path");

  CLI::App* adjust = app.add_subcommand("adjust", "apply the adapter to a weight file");
  add_common_flags(adjust, adjust_f);
  adjust->add_option("--weights-in", adjust_in, "input tensor file")->required();
  adjust->add_option("--weights-out", adjust_out, "output tensor file")->required();
  adjust->add_option("--report-out", adjust_report, "JSON adapter report path");
  adjust->add_option("--params-in", adjust_params, "operator file (default: identity)");

  CLI::App* train = app.add_subcommand("train", "run the synthetic radius-alignment task");
  add_common_flags(train, train_f);
  train->add_option("--targets-uniform", train_f.targets_uniform,
                    "use one target scale for every sample");
  train->add_option("--bins", train_f.bins, "histogram bins (default 50)");
  train->add_option("--out", train_out, "output prefix (default train_out)");
  train->add_option("--params-out", train_params_out, "write the trained operator here");

  CLI::App* grad = app.add_subcommand("check-grad", "analytic gradients vs central differences");
  add_common_flags(grad, grad_f);
  grad->add_option("--step", grad_f.step, "central-difference step (default 1e-6)");
  grad->add_option("--samples", grad_f.samples, "cases per matrix kind (default 100)");
  grad->add_option("--out", grad_out, "JSON report path");

  CLI::App* report = app.add_subcommand("report", "adapter report for a weight file");
  add_common_flags(report, report_f);
  report->add_option("--weights-in", report_in, "input tensor file")->required();
  report->add_option("--params-in", report_params, "operator file (default: identity)");
  report->add_option("--out", report_out, "JSON report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigInvalid;
  }

  try {
    if (verify->parsed()) return cmd_verify(resolve_config(verify_f), verify_out);
    if (adjust->parsed())
      return cmd_adjust(resolve_config(adjust_f), adjust_in, adjust_out,
                        adjust_report, adjust_params);
    if (train->parsed())
      return cmd_train(resolve_config(train_f), train_out, train_params_out);
    if (grad->parsed()) return cmd_check_grad(resolve_config(grad_f), grad_out);
    if (report->parsed())
      return cmd_report(resolve_config(report_f), report_in, report_params,
                        report_out);
  } catch (const ha::io_error& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const ha::divergence_error& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid config: %s\n", e.what());
    return kExitConfigInvalid;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return kExitConfigInvalid;
  }
  return kExitConfigInvalid;
}
