#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evodyn/analysis.hpp"
#include "evodyn/cli/config.hpp"

namespace evodyn::cli {

inline constexpr const char* kToolName = "evodyn";
inline constexpr const char* kToolVersion = "0.1.0";

struct Options {
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  /// Progress and summaries; null for silence.
  std::ostream* log = nullptr;
};

/// Outcome of a bundle-producing command. `manifest` lists every written
/// file with its SHA-256; `ok` is false when a built-in check failed.
struct BundleResult {
  nlohmann::json manifest;
  bool ok = true;
};

/// One CSV per initial condition (`<name>_ic<k>.csv`, k from 1),
/// analysis.json and manifest.json in `opts.out`.
BundleResult cmd_simulate(const nlohmann::json& config, const Options& opts);

struct SweepParams {
  std::vector<int> m = {2, 3, 4, 6, 10};
  std::vector<double> ratios;  // default: 0.01, 0.02, ..., 1
  /// Cross-check points per m: ratio = 1/m + (1 - 1/m) * fraction.
  std::vector<double> fractions = {0.25, 0.5, 0.75};
  double horizon = 2000.0;
  double tolerance = 0.01;

  static SweepParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// figA_curve.csv (m, ratio, x2_star) and figA_crosscheck.csv; ok iff
/// every cross-check lies within tolerance.
BundleResult cmd_sweep_figA(const SweepParams& params, const Options& opts, const std::string& command = "sweep");

enum class Figure { A, B, C, hypnodisk };
Figure parse_figure(const std::string& s);
std::string to_string(Figure f);

/// Scenario documents behind a figure bundle (not used for A).
std::vector<nlohmann::json> figure_scenarios(Figure f);

BundleResult cmd_reproduce(Figure figure, const Options& opts);

/// Re-executes the command recorded in a manifest into `opts.out` and
/// compares checksums file by file; ok iff all match.
BundleResult cmd_rerun(const nlohmann::json& manifest, const Options& opts);

struct VerifyCheck {
  std::string condition;  // monotone | pc | ar | af | im
  std::string game;       // key of the built-in game table
  std::optional<Verdict> expected;
};

struct VerifyRow {
  std::string label;
  nlohmann::json protocol;
  std::vector<VerifyCheck> checks;
};

/// The shipped protocol combinations with their expected verdicts.
std::vector<VerifyRow> verify_table();

struct VerifyResult {
  nlohmann::json report;
  /// Expectations matched (table) or requested conditions held (config).
  bool ok = true;
  /// Every `fails` verdict was confirmed by re-evaluating its witness.
  bool witnesses_confirmed = true;
};

/// Without a config runs the shipped table. A config document
/// {"game", "protocol", "conditions", "states": {"count", "seed", "floor"}}
/// checks one combination; ok iff all requested conditions hold.
VerifyResult cmd_verify(const std::optional<nlohmann::json>& config, const Options& opts);

/// Re-evaluates a failing report's witness from scratch.
bool confirm_witness(const ConditionReport& report, const VectorField& field, const PayoffFunction& f);

}  // namespace evodyn::cli
