#pragma once

#include <charconv>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperadapt/adapter.hpp"
#include "hyperadapt/config.hpp"
#include "hyperadapt/gradcheck.hpp"
#include "hyperadapt/tensor_io.hpp"
#include "hyperadapt/toy.hpp"
#include "hyperadapt/verify.hpp"

// Machine-readable outputs. Every JSON report carries the resolved config
// and the library version; histograms go to CSV with one bin per row.

namespace hyperadapt {

inline nlohmann::json report_envelope(const RunConfig& cfg) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["config"] = cfg.to_json();
  return j;
}

inline nlohmann::json to_json(const SuiteResult& r) {
  return {{"name", r.name},         {"samples", r.samples},
          {"excluded", r.excluded}, {"max_error", r.max_error},
          {"tolerance", r.tolerance}, {"pass", r.pass},
          {"seconds", r.seconds}};
}

inline nlohmann::json to_json(const AdapterReport& r) {
  nlohmann::json cols = nlohmann::json::array();
  for (const ColumnScale& c : r.per_column)
    cols.push_back({{"radius_before", c.radius_before},
                    {"radius_after", c.radius_after},
                    {"effective_scale", c.effective_scale}});
  return {{"columns", cols},
          {"scale_mean", r.scale_mean},
          {"scale_min", r.scale_min},
          {"scale_max", r.scale_max},
          {"param_overhead", r.param_overhead},
          {"frobenius_radius_before", r.frobenius_radius_before},
          {"frobenius_radius_after", r.frobenius_radius_after}};
}

inline nlohmann::json to_json(const TrainResult& r) {
  return {{"loss_curve", r.loss_curve},
          {"final_scales", r.final_scales},
          {"steps", r.steps},
          {"converged", r.converged},
          {"final_loss", r.loss_curve.empty() ? 0.0 : r.loss_curve.back()}};
}

inline nlohmann::json to_json(const GradCheckReport& r) {
  return {{"kind", to_string(r.kind)},
          {"path", r.path},
          {"cases", r.cases},
          {"excluded_columns", r.excluded_columns},
          {"max_rel_error", r.max_rel_error},
          {"worst_case", r.worst_case},
          {"worst_param", r.worst_param},
          {"pass", r.pass}};
}

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// CSV rows are bin_lower,bin_upper,count over the normalized [0,1] range.
// The normalizer itself travels in the accompanying JSON report.
inline std::string histogram_csv(const RadiusHistogram& h) {
  std::string out = "bin_lower,bin_upper,count\n";
  const std::size_t bins = h.counts.size();
  for (std::size_t i = 0; i < bins; ++i) {
    out += detail::format_double(static_cast<double>(i) / static_cast<double>(bins));
    out += ',';
    out += detail::format_double(static_cast<double>(i + 1) / static_cast<double>(bins));
    out += ',';
    out += std::to_string(h.counts[i]);
    out += '\n';
  }
  return out;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace hyperadapt
