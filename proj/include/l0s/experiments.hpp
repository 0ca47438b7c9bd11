// Copyright (c) 2026 The l0s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "l0s/hvs_reference.hpp"
#include "l0s/metrics.hpp"
#include "l0s/scenes.hpp"
#include "l0s/version.hpp"

namespace l0s {

using json = nlohmann::ordered_json;

//! Configuration problems (bad field values, unknown keys, unreadable or
//! unwritable paths). The CLI maps these to exit code 1; everything else
//! unexpected maps to 2.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ExperimentInfo
{
  std::string_view name;
  std::string_view summary;
};

//! Fixed experiment registry; unknown names fail loudly.
inline std::span<const ExperimentInfo> experiment_registry()
{
  static const ExperimentInfo entries[] = {
      {"bias-curves", "barycenter of each kernel as a function of a (b = 1)"},
      {"integral-curves", "unit-interval mass of each kernel as a function of a (b = 1)"},
      {"concentration", "sample-to-surface distances and per-interval hit frequencies"},
      {"ablation", "per-kernel rendering error on the scene catalog"},
      {"distribution-audit", "KS test of drawn samples against the exact piecewise CDF"},
      {"hvs-regression", "constant kernel vs the classical searchsorted inversion"},
  };
  return entries;
}

inline bool known_experiment(std::string_view name)
{
  for (const auto& e : experiment_registry()) {
    if (e.name == name) return true;
  }
  return false;
}

//! A validated, fully defaulted experiment configuration.
//! `scene` stays in JSON form (catalog name or inline profile object) so the
//! report echo round-trips exactly.
struct ExperimentConfig
{
  std::string experiment = "bias-curves";
  json scene = json("sharp-bump");
  std::vector<KernelKind> kernels = {KernelKind::constant, KernelKind::linear,
                                     KernelKind::exponential, KernelKind::inverse};
  int n_coarse = 64;
  int n_fine = 128;
  int n_trials = 1000;
  std::uint64_t seed = 1;
  bool use_maxblur = true;
  bool jitter = false;
  std::string out_dir = "out";

  PipelineOptions pipeline() const
  {
    return PipelineOptions{n_coarse, n_fine, n_trials, seed, use_maxblur, jitter};
  }

  //! Canonical JSON form; feeding it back through validate() reproduces
  //! this config.
  json echo() const
  {
    json doc;
    doc["experiment"] = experiment;
    doc["scene"] = scene;
    json kernel_names = json::array();
    for (KernelKind k : kernels) kernel_names.push_back(std::string(to_string(k)));
    doc["kernels"] = kernel_names;
    doc["n_coarse"] = n_coarse;
    doc["n_fine"] = n_fine;
    doc["n_trials"] = n_trials;
    doc["seed"] = seed;
    doc["maxblur"] = use_maxblur;
    doc["jitter"] = jitter;
    doc["out"] = out_dir;
    return doc;
  }
};

namespace detail {

inline void reject_unknown_keys(const json& obj,
                                std::initializer_list<std::string_view> allowed,
                                const std::string& where)
{
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (std::string_view key : allowed) {
      if (item.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConfigError("unknown config key: " + where + item.key());
    }
  }
}

inline double require_number(const json& obj, const std::string& key, const std::string& where)
{
  if (!obj.contains(key)) {
    throw ConfigError("missing required field: " + where + key);
  }
  if (!obj.at(key).is_number()) {
    throw ConfigError("field must be a number: " + where + key);
  }
  return obj.at(key).get<double>();
}

}  // namespace detail

//! Build the analytic scene named or described by a config scene entry.
inline DensityScene scene_from_json(const json& spec)
{
  if (spec.is_string()) {
    const std::string name = spec.get<std::string>();
    try {
      return make_scene(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("scene: ") + e.what());
    }
  }
  if (!spec.is_object()) {
    throw ConfigError("scene: must be a catalog name or an object");
  }
  const std::string where = "scene.";
  if (!spec.contains("profile") || !spec.at("profile").is_string()) {
    throw ConfigError("scene.profile: required string");
  }
  const std::string profile = spec.at("profile").get<std::string>();
  const double t_near = detail::require_number(spec, "t_near", where);
  const double t_far = detail::require_number(spec, "t_far", where);
  const double color_near = spec.value("color_near", 1.0);
  const double color_far = spec.value("color_far", 1.0);
  try {
    if (profile == "box") {
      detail::reject_unknown_keys(
          spec, {"profile", "t_near", "t_far", "color_near", "color_far", "entry", "exit", "level"},
          where);
      return DensityScene(BoxSlab{detail::require_number(spec, "entry", where),
                                  detail::require_number(spec, "exit", where),
                                  detail::require_number(spec, "level", where)},
                          t_near, t_far, ColorRamp{color_near, color_far});
    }
    if (profile == "gaussian-bump") {
      detail::reject_unknown_keys(
          spec, {"profile", "t_near", "t_far", "color_near", "color_far", "center", "width", "peak"},
          where);
      return DensityScene(std::vector<GaussianBump>{{detail::require_number(spec, "center", where),
                                                     detail::require_number(spec, "width", where),
                                                     detail::require_number(spec, "peak", where)}},
                          t_near, t_far, ColorRamp{color_near, color_far});
    }
    if (profile == "multi-surface") {
      detail::reject_unknown_keys(
          spec, {"profile", "t_near", "t_far", "color_near", "color_far", "bumps"}, where);
      if (!spec.contains("bumps") || !spec.at("bumps").is_array() || spec.at("bumps").empty()) {
        throw ConfigError("scene.bumps: required non-empty array");
      }
      std::vector<GaussianBump> bumps;
      for (const auto& b : spec.at("bumps")) {
        detail::reject_unknown_keys(b, {"center", "width", "peak"}, where + "bumps.");
        bumps.push_back({detail::require_number(b, "center", where + "bumps."),
                         detail::require_number(b, "width", where + "bumps."),
                         detail::require_number(b, "peak", where + "bumps.")});
      }
      return DensityScene(std::move(bumps), t_near, t_far, ColorRamp{color_near, color_far});
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scene: ") + e.what());
  }
  throw ConfigError("scene.profile: unknown profile '" + profile + "'");
}

//! Parse, default, and range-check a config document. Every violated
//! constraint reports its field path; unknown keys are rejected.
inline ExperimentConfig validate(std::string_view config_text)
{
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  detail::reject_unknown_keys(doc,
                              {"experiment", "scene", "kernels", "n_coarse", "n_fine", "n_trials",
                               "seed", "maxblur", "jitter", "out"},
                              "");

  ExperimentConfig cfg;
  if (doc.contains("experiment")) {
    if (!doc.at("experiment").is_string()) throw ConfigError("experiment: must be a string");
    cfg.experiment = doc.at("experiment").get<std::string>();
  }
  if (!known_experiment(cfg.experiment)) {
    throw ConfigError("experiment: unknown name '" + cfg.experiment + "' (see --list)");
  }

  if (doc.contains("scene")) {
    cfg.scene = doc.at("scene");
    scene_from_json(cfg.scene);  // validate eagerly
  }

  if (doc.contains("kernels")) {
    if (!doc.at("kernels").is_array() || doc.at("kernels").empty()) {
      throw ConfigError("kernels: must be a non-empty array of kernel names");
    }
    cfg.kernels.clear();
    for (const auto& k : doc.at("kernels")) {
      if (!k.is_string()) throw ConfigError("kernels: entries must be strings");
      try {
        cfg.kernels.push_back(kernel_kind_from_string(k.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("kernels: ") + e.what());
      }
    }
  }

  const auto read_count = [&](const char* key, int minimum, int& out) {
    if (!doc.contains(key)) return;
    if (!doc.at(key).is_number_integer() || doc.at(key).get<long long>() < minimum) {
      throw ConfigError(std::string(key) + ": must be an integer >= " + std::to_string(minimum));
    }
    out = doc.at(key).get<int>();
  };
  read_count("n_coarse", 2, cfg.n_coarse);
  read_count("n_fine", 1, cfg.n_fine);
  read_count("n_trials", 1, cfg.n_trials);

  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer()) {
      throw ConfigError("seed: must be a non-negative integer");
    }
    if (doc.at("seed").is_number_integer() && doc.at("seed").get<long long>() < 0) {
      throw ConfigError("seed: must be a non-negative integer");
    }
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("maxblur")) {
    if (!doc.at("maxblur").is_boolean()) throw ConfigError("maxblur: must be a boolean");
    cfg.use_maxblur = doc.at("maxblur").get<bool>();
  }
  if (doc.contains("jitter")) {
    if (!doc.at("jitter").is_boolean()) throw ConfigError("jitter: must be a boolean");
    cfg.jitter = doc.at("jitter").get<bool>();
  }
  if (doc.contains("out")) {
    if (!doc.at("out").is_string() || doc.at("out").get<std::string>().empty()) {
      throw ConfigError("out: must be a non-empty path");
    }
    cfg.out_dir = doc.at("out").get<std::string>();
  }

  const bool curves = cfg.experiment == "bias-curves" || cfg.experiment == "integral-curves";
  for (KernelKind k : cfg.kernels) {
    if (curves && k == KernelKind::argmax_delta) {
      throw ConfigError("kernels: argmax-delta has no per-interval curve");
    }
  }
  return cfg;
}

//! A finished experiment: the report document plus the files written.
struct ExperimentReport
{
  json document;
  std::vector<std::filesystem::path> files;
};

namespace detail {

//! 17 significant digits: enough to round-trip any double exactly.
inline std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter
{
public:
  explicit CsvWriter(std::vector<std::string> header)
    : columns_(header.size())
  {
    append_row(header);
  }

  void append_row(std::span<const std::string> cells)
  {
    if (cells.size() != columns_) {
      throw std::logic_error("CsvWriter: row width mismatch");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
  }

  const std::string& str() const { return body_; }

private:
  std::size_t columns_;
  std::string body_;
};

inline void write_file(const std::filesystem::path& path, const std::string& bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("out: cannot open '" + path.string() + "' for writing");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw ConfigError("out: failed writing '" + path.string() + "'");
  }
}

class ArmTimer
{
public:
  explicit ArmTimer(std::string label)
    : label_(std::move(label))
    , start_(std::chrono::steady_clock::now())
  {
  }

  // Wall clock goes to stderr only; report files must be byte-identical
  // across reruns.
  ~ArmTimer()
  {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    std::cerr << "[l0s] " << label_ << ": " << ms << " ms\n";
  }

private:
  std::string label_;
  std::chrono::steady_clock::time_point start_;
};

inline constexpr int curve_grid_points = 200;
inline constexpr double curve_grid_min = 1e-3;
inline constexpr int audit_interval_count = 16;
inline constexpr int audit_sample_count = 1'000'000;
inline constexpr double audit_ks_threshold = 0.002;
inline constexpr double hvs_regression_tolerance = 1e-12;

inline json run_curves(const ExperimentConfig& cfg,
                       std::vector<std::pair<std::string, std::string>>& csv_files)
{
  const bool is_bias = cfg.experiment == "bias-curves";
  const std::vector<double> grid = log_grid(curve_grid_min, 1.0, curve_grid_points);
  std::vector<KernelCurve> curves;
  for (KernelKind kind : cfg.kernels) {
    ArmTimer timer(cfg.experiment + " " + std::string(to_string(kind)));
    curves.push_back(is_bias ? bias_curve(kind, grid) : integral_curve(kind, grid));
  }

  std::vector<std::string> header = {"a"};
  for (KernelKind kind : cfg.kernels) header.emplace_back(to_string(kind));
  CsvWriter csv(header);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> row = {format_double(grid[i])};
    for (const auto& curve : curves) row.push_back(format_double(curve.values[i]));
    csv.append_row(row);
  }
  csv_files.emplace_back(is_bias ? "bias" : "integral", csv.str());

  json results;
  results["grid_points"] = curve_grid_points;
  results["a_min"] = curve_grid_min;
  results["a_max"] = 1.0;
  results["b"] = 1.0;
  json per_kernel;
  for (const auto& curve : curves) {
    json entry;
    entry["at_a_min"] = curve.values.front();
    entry["at_a_max"] = curve.values.back();
    per_kernel[std::string(to_string(curve.kind))] = entry;
  }
  results["kernels"] = per_kernel;
  return results;
}

inline json run_concentration(const ExperimentConfig& cfg,
                              std::vector<std::pair<std::string, std::string>>& csv_files)
{
  const DensityScene scene = scene_from_json(cfg.scene);
  std::vector<ConcentrationReport> reports;
  for (KernelKind kind : cfg.kernels) {
    ArmTimer timer("concentration " + std::string(to_string(kind)));
    reports.push_back(concentration(scene, kind, cfg.pipeline()));
  }

  std::vector<std::string> header = {"interval"};
  for (KernelKind kind : cfg.kernels) header.emplace_back(to_string(kind));
  CsvWriter freq_csv(header);
  for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(cfg.n_coarse); ++i) {
    std::vector<std::string> row = {std::to_string(i)};
    for (const auto& r : reports) row.push_back(format_double(r.interval_frequency[i]));
    freq_csv.append_row(row);
  }
  csv_files.emplace_back("frequencies", freq_csv.str());

  header[0] = "trial";
  CsvWriter dist_csv(header);
  for (int trial = 0; trial < cfg.n_trials; ++trial) {
    std::vector<std::string> row = {std::to_string(trial)};
    for (const auto& r : reports) {
      row.push_back(format_double(r.trial_mean_distance[static_cast<std::size_t>(trial)]));
    }
    dist_csv.append_row(row);
  }
  csv_files.emplace_back("distances", dist_csv.str());

  json results;
  for (const auto& r : reports) {
    json entry;
    entry["mean_distance"] = r.mean_distance;
    entry["sample_count"] = r.sample_count;
    entry["uniform_fallback"] = r.uniform_fallback;
    results[std::string(to_string(r.kind))] = entry;
  }
  return results;
}

inline json run_ablation(const ExperimentConfig& cfg,
                         std::vector<std::pair<std::string, std::string>>& csv_files)
{
  CsvWriter csv({"scene", "kernel", "mean_abs_error", "stddev_abs_error", "n_trials"});
  json results;
  for (const std::string& scene_name : scene_catalog()) {
    const DensityScene scene = make_scene(scene_name);
    std::vector<RenderErrorStats> arms;
    for (KernelKind kind : cfg.kernels) {
      ArmTimer timer("ablation " + scene_name + " " + std::string(to_string(kind)));
      arms.push_back(render_error(scene, kind, cfg.pipeline()));
    }
    json scene_entry;
    for (const auto& s : arms) {
      csv.append_row(std::vector<std::string>{scene_name, std::string(to_string(s.kind)),
                                              format_double(s.mean_abs_error),
                                              format_double(s.stddev_abs_error),
                                              std::to_string(cfg.n_trials)});
      json entry;
      entry["mean_abs_error"] = s.mean_abs_error;
      entry["stddev_abs_error"] = s.stddev_abs_error;
      entry["reference"] = s.reference;
      scene_entry[std::string(to_string(s.kind))] = entry;
    }
    // Paired one-sided sign tests between every ordered kernel pair;
    // the arms share coarse stages and CDF levels trial by trial.
    json comparisons;
    for (std::size_t i = 0; i < arms.size(); ++i) {
      for (std::size_t j = 0; j < arms.size(); ++j) {
        if (i == j) continue;
        const auto [pos, eff] = paired_wins(arms[i].trial_abs_error, arms[j].trial_abs_error);
        if (eff == 0) continue;
        json cmp;
        cmp["wins"] = pos;
        cmp["effective_trials"] = eff;
        cmp["p_value"] = sign_test_pvalue(pos, eff);
        comparisons[std::string(to_string(arms[i].kind)) + "<" +
                    std::string(to_string(arms[j].kind))] = cmp;
      }
    }
    scene_entry["comparisons"] = comparisons;
    results[scene_name] = scene_entry;
  }
  csv_files.emplace_back("errors", csv.str());
  return results;
}

//! Deterministic 16-interval test distribution: irregular knot spacing,
//! weights comfortably above the clamp floor.
inline RayWeights audit_weights(std::uint64_t seed)
{
  Rng rng(seed);
  RayWeights rw;
  rw.t.resize(audit_interval_count + 1);
  rw.w.resize(audit_interval_count + 1);
  rw.t[0] = 0.0;
  for (int i = 0; i < audit_interval_count; ++i) {
    rw.t[static_cast<std::size_t>(i) + 1] = rw.t[static_cast<std::size_t>(i)] + 0.5 + rng.uniform01();
  }
  for (auto& w : rw.w) w = 0.01 + rng.uniform01();
  return rw;
}

inline json run_distribution_audit(const ExperimentConfig& cfg,
                                   std::vector<std::pair<std::string, std::string>>& csv_files)
{
  CsvWriter csv({"kernel", "n_samples", "ks_d", "threshold", "pass"});
  json results;
  for (std::size_t arm = 0; arm < cfg.kernels.size(); ++arm) {
    const KernelKind kind = cfg.kernels[arm];
    ArmTimer timer("distribution-audit " + std::string(to_string(kind)));
    const RayWeights rw = audit_weights(derive_seed(cfg.seed, arm));
    const RayPdf pdf = build_pdf(rw, kind);
    const SampleBatch batch = sample(pdf, audit_sample_count, SampleMode::independent,
                                     derive_seed(cfg.seed, 100 + arm));
    const double d = ks_statistic(batch.positions, [&](double x) { return pdf.cdf(x); });
    const bool pass = d < audit_ks_threshold;
    csv.append_row(std::vector<std::string>{std::string(to_string(kind)),
                                            std::to_string(audit_sample_count), format_double(d),
                                            format_double(audit_ks_threshold),
                                            pass ? "true" : "false"});
    json entry;
    entry["n_samples"] = audit_sample_count;
    entry["ks_d"] = d;
    entry["threshold"] = audit_ks_threshold;
    entry["pass"] = pass;
    results[std::string(to_string(kind))] = entry;
  }
  csv_files.emplace_back("ks", csv.str());
  return results;
}

inline json run_hvs_regression(const ExperimentConfig& cfg,
                               std::vector<std::pair<std::string, std::string>>& csv_files)
{
  // Constant kernel by definition; the configured kernel list is not used.
  CsvWriter csv({"trial", "max_abs_deviation"});
  double worst = 0.0;
  for (int trial = 0; trial < cfg.n_trials; ++trial) {
    const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    const RayWeights rw = audit_weights(trial_seed);
    const RayPdf pdf = build_pdf(rw, KernelKind::constant);
    const std::vector<double> levels =
        uniform_levels(cfg.n_fine, SampleMode::stratified, derive_seed(trial_seed, 1));
    std::vector<double> mine = invert_levels(pdf, levels);
    std::sort(mine.begin(), mine.end());
    const std::vector<double> oracle = hvs_reference_positions(rw.t, rw.w, levels);
    double deviation = 0.0;
    for (std::size_t i = 0; i < mine.size(); ++i) {
      deviation = std::max(deviation, std::abs(mine[i] - oracle[i]));
    }
    worst = std::max(worst, deviation);
    csv.append_row(std::vector<std::string>{std::to_string(trial), format_double(deviation)});
  }
  csv_files.emplace_back("deviation", csv.str());

  json results;
  results["n_trials"] = cfg.n_trials;
  results["samples_per_trial"] = cfg.n_fine;
  results["max_abs_deviation"] = worst;
  results["tolerance"] = hvs_regression_tolerance;
  results["matches_classical_hvs"] = worst <= hvs_regression_tolerance;
  return results;
}

}  // namespace detail

//! Run a validated experiment: dispatch by name, write
//! `<out>/<experiment>.report.json` and `<out>/<experiment>.<curve>.csv`
//! files, and return the report. Identical config and seed produce
//! byte-identical files.
inline ExperimentReport run(const ExperimentConfig& cfg)
{
  std::vector<std::pair<std::string, std::string>> csv_files;
  json results;
  if (cfg.experiment == "bias-curves" || cfg.experiment == "integral-curves") {
    results = detail::run_curves(cfg, csv_files);
  } else if (cfg.experiment == "concentration") {
    results = detail::run_concentration(cfg, csv_files);
  } else if (cfg.experiment == "ablation") {
    results = detail::run_ablation(cfg, csv_files);
  } else if (cfg.experiment == "distribution-audit") {
    results = detail::run_distribution_audit(cfg, csv_files);
  } else if (cfg.experiment == "hvs-regression") {
    results = detail::run_hvs_regression(cfg, csv_files);
  } else {
    throw ConfigError("experiment: unknown name '" + cfg.experiment + "' (see --list)");
  }

  ExperimentReport report;
  report.document["library"] = {{"name", "l0s"}, {"version", version()}};
  report.document["experiment"] = cfg.experiment;
  report.document["config"] = cfg.echo();
  report.document["results"] = results;

  const std::filesystem::path out_dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw ConfigError("out: cannot create directory '" + cfg.out_dir + "': " + ec.message());
  }
  const std::filesystem::path report_path = out_dir / (cfg.experiment + ".report.json");
  detail::write_file(report_path, report.document.dump(2) + "\n");
  report.files.push_back(report_path);
  for (const auto& [curve, bytes] : csv_files) {
    const std::filesystem::path csv_path = out_dir / (cfg.experiment + "." + curve + ".csv");
    detail::write_file(csv_path, bytes);
    report.files.push_back(csv_path);
  }
  return report;
}

}  // namespace l0s
