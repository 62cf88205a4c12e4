#include "evodyn/cli/commands.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "evodyn/cli/io.hpp"
#include "evodyn/cli/runner.hpp"
#include "evodyn/dynamics.hpp"
#include "evodyn/integrate.hpp"
#include "evodyn/numeric.hpp"

namespace evodyn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void log(const Options& opts, const std::string& line) {
  if (opts.log) *opts.log << line << '\n';
}

json tolerances() {
  return {{"simplex", kSimplexTol},       {"drift", kDriftTol}, {"equilibrium", kEquilibriumTol},
          {"strict", kStrictTol},         {"tie", kTieTol},     {"switch_time", kSwitchTimeTol},
          {"min_tail_samples", kMinTailSamples}};
}

json projection_for(std::size_t arity) {
  if (arity == 4) return {{"kind", "aggregate_34"}, {"groups", {{1}, {2}, {3, 4}}}};
  return {{"kind", "identity"}};
}

json file_entry(const std::string& name, const std::string& content, json meta) {
  meta["path"] = name;
  meta["sha256"] = sha256_hex(content);
  meta["bytes"] = content.size();
  return meta;
}

void finish_manifest(json& manifest, const Options& opts) {
  write_file_atomic(opts.out / "manifest.json", manifest.dump(2) + "\n");
}

json base_manifest(const std::string& command, json config) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"command", command},
          {"config", std::move(config)},
          {"tolerances", tolerances()},
          {"files", json::array()}};
}

/// Runs scenarios cell by cell, writing each CSV as soon as it exists.
BundleResult scenario_bundle(const std::string& command, json config, const std::vector<ScenarioConfig>& scenarios,
                             const Options& opts) {
  fs::create_directories(opts.out);
  std::map<std::string, int> seen;
  for (const auto& s : scenarios) {
    if (seen[s.name]++) throw ConfigError("/name", "duplicate scenario name '" + s.name + "'");
  }

  struct Cell {
    std::size_t s, k;
    std::string file;
    json entry;
    json analysis;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    for (std::size_t k = 0; k < scenarios[s].initial.size(); ++k) {
      cells.push_back({s, k, scenarios[s].name + "_ic" + std::to_string(k + 1) + ".csv", {}, {}});
    }
  }
  parallel_for(cells.size(), opts.threads, [&](std::size_t c) {
    auto& cell = cells[c];
    const auto& cfg = scenarios[cell.s];
    const auto traj = run_cell(cfg, cell.k);
    const auto csv = to_csv(traj);
    write_file_atomic(opts.out / cell.file, csv);
    cell.entry = file_entry(cell.file, csv,
                            {{"role", "trajectory"},
                             {"scenario", cfg.name},
                             {"ic", cell.k + 1},
                             {"x0", cfg.initial[cell.k].vec()},
                             {"rows", traj.size()}});
    cell.analysis = analyze_trajectory(cfg, traj);
    cell.analysis["file"] = cell.file;
  });

  json manifest = base_manifest(command, std::move(config));
  json analysis = json::array();
  json seeds = json::object();
  json meta = json::array();
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto& cfg = scenarios[s];
    json runs = json::array();
    for (const auto& cell : cells) {
      if (cell.s != s) continue;
      runs.push_back(cell.analysis);
      manifest["files"].push_back(cell.entry);
    }
    analysis.push_back({{"scenario", cfg.name}, {"runs", std::move(runs)}});
    seeds[cfg.name] = cfg.seed;
    meta.push_back({{"name", cfg.name},
                    {"arity", cfg.arity()},
                    {"field", cfg.field},
                    {"integrator", to_json(cfg.integrator)},
                    {"window_fraction", cfg.window_fraction},
                    {"projection", projection_for(cfg.arity())}});
    log(opts, cfg.name + ": " + std::to_string(cfg.initial.size()) + " trajectories");
  }
  const auto analysis_text = analysis.dump(2) + "\n";
  write_file_atomic(opts.out / "analysis.json", analysis_text);
  manifest["files"].push_back(file_entry("analysis.json", analysis_text, {{"role", "analysis"}}));
  manifest["seeds"] = seeds;
  manifest["scenarios"] = meta;
  finish_manifest(manifest, opts);
  return {manifest, true};
}

/// Scenario documents recorded with their effective seed.
std::vector<ScenarioConfig> parse_all(std::vector<json>& docs, std::optional<std::uint64_t> seed) {
  std::vector<ScenarioConfig> out;
  for (std::size_t k = 0; k < docs.size(); ++k) {
    try {
      out.push_back(parse_scenario(docs[k], seed));
    } catch (const ConfigError& e) {
      throw ConfigError("/scenarios/" + std::to_string(k) + e.pointer(), std::string(e.what()));
    }
    docs[k]["seed"] = out.back().seed;
  }
  return out;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

BundleResult cmd_simulate(const json& config, const Options& opts) {
  auto cfg = parse_scenario(config, opts.seed);
  json stored = config;
  stored["seed"] = cfg.seed;
  return scenario_bundle("simulate", stored, {cfg}, opts);
}

// ---------------------------------------------------------------------------

SweepParams SweepParams::from_json(const json& j) {
  const Node n(j);
  n.only_keys({"m", "ratios", "fractions", "horizon", "tolerance"});
  SweepParams p;
  if (n.has("m")) {
    const Node m = n.at("m");
    p.m.clear();
    for (std::size_t k = 0; k < m.size(); ++k) p.m.push_back(static_cast<int>(m.at(k).integer(1, 1000)));
    if (p.m.empty()) m.fail("need at least one m");
  }
  if (n.has("ratios")) {
    const Node r = n.at("ratios");
    for (std::size_t k = 0; k < r.size(); ++k) p.ratios.push_back(r.at(k).number(1e-12, 1.0));
  }
  if (n.has("fractions")) {
    const Node f = n.at("fractions");
    p.fractions.clear();
    for (std::size_t k = 0; k < f.size(); ++k) p.fractions.push_back(f.at(k).number(0.0, 1.0));
  }
  if (n.has("horizon")) p.horizon = n.at("horizon").number(1.0, 1e7);
  if (n.has("tolerance")) p.tolerance = n.at("tolerance").number(0.0, 1.0);
  return p;
}

json SweepParams::to_json() const {
  return {{"m", m}, {"ratios", ratios}, {"fractions", fractions}, {"horizon", horizon}, {"tolerance", tolerance}};
}

BundleResult cmd_sweep_figA(const SweepParams& params_in, const Options& opts, const std::string& command) {
  SweepParams params = params_in;
  if (params.ratios.empty()) {
    for (int k = 1; k <= 100; ++k) params.ratios.push_back(k / 100.0);
  }
  fs::create_directories(opts.out);

  std::ostringstream curve;
  curve << "m,ratio,x2_star\n";
  for (int m : params.m) {
    for (double r : params.ratios) curve << m << ',' << fmt(r) << ',' << fmt(asymptotic_share(m, r)) << '\n';
  }

  struct Cell {
    int m;
    double ratio, star, mean = 0.0;
  };
  std::vector<Cell> cells;
  for (int m : params.m) {
    for (double f : params.fractions) {
      const double r = 1.0 / m + (1.0 - 1.0 / m) * f;
      cells.push_back({m, r, asymptotic_share(m, r)});
    }
  }
  IntegratorConfig ic;
  ic.horizon = params.horizon;
  ic.sample_stride = 0.1;
  parallel_for(cells.size(), opts.threads, [&](std::size_t c) {
    auto& cell = cells[c];
    const auto game = constant_two_strategy(1.0, cell.ratio);
    const RevisionProtocol proto{SelectionRule::retry_other(MDistribution::fixed(cell.m)), AdoptionRule::success(0.0)};
    const auto traj = integrate(mother_field(proto, game), game, PopulationState{0.5, 0.5}, ic);
    cell.mean = tail_stats(traj, 0.25).mean[1];
  });

  bool ok = true;
  double max_err = 0.0;
  std::ostringstream check;
  check << "m,ratio,x2_star,tail_mean,abs_error,pass\n";
  for (const auto& c : cells) {
    const double err = std::abs(c.mean - c.star);
    const bool pass = err < params.tolerance;
    ok = ok && pass;
    max_err = std::max(max_err, err);
    check << c.m << ',' << fmt(c.ratio) << ',' << fmt(c.star) << ',' << fmt(c.mean) << ',' << fmt(err) << ','
          << (pass ? "true" : "false") << '\n';
  }

  json manifest = base_manifest(command, params.to_json());
  for (const auto& [name, text, role] :
       {std::tuple{"figA_curve.csv", curve.str(), "share_curve"}, {"figA_crosscheck.csv", check.str(), "crosscheck"}}) {
    write_file_atomic(opts.out / name, text);
    manifest["files"].push_back(file_entry(name, text, {{"role", role}}));
  }
  manifest["seeds"] = json::object();
  manifest["tolerances"]["crosscheck"] = params.tolerance;
  manifest["m_values"] = {{"values", params.m}, {"declared_default", params_in.m == SweepParams{}.m}};
  manifest["crosscheck"] = {{"protocol", "retry_other(m)+success(K=0)"},
                            {"game", "constant (1, ratio)"},
                            {"x0", {0.5, 0.5}},
                            {"integrator", to_json(ic)},
                            {"window_fraction", 0.25},
                            {"max_abs_error", max_err},
                            {"passed", ok}};
  finish_manifest(manifest, opts);
  log(opts, std::string("figure A cross-check: ") + (ok ? "all within tolerance" : "FAILED"));
  return {manifest, ok};
}

// ---------------------------------------------------------------------------

Figure parse_figure(const std::string& s) {
  if (s == "A") return Figure::A;
  if (s == "B") return Figure::B;
  if (s == "C") return Figure::C;
  if (s == "hypnodisk") return Figure::hypnodisk;
  throw std::invalid_argument("unknown figure '" + s + "' (A, B, C, hypnodisk)");
}

std::string to_string(Figure f) {
  switch (f) {
    case Figure::A: return "A";
    case Figure::B: return "B";
    case Figure::C: return "C";
    case Figure::hypnodisk: return "hypnodisk";
  }
  return "?";
}

std::vector<json> figure_scenarios(Figure f) {
  const json pairwise = {{"kind", "pairwise"}};
  std::vector<json> out;
  switch (f) {
    case Figure::A:
      break;
    case Figure::B:
      for (double eps : {0.05, 0.1}) {
        out.push_back({{"name", "B_eps" + fmt(eps)},
                       {"unilateral",
                        {{"eps", eps},
                         {"controller", {{"kind", "smooth"}}},
                         {"protocol", {{"selection", {{"kind", "retry_other"}, {"m", 4}}}, {"adoption", pairwise}}}}},
                       {"integrator", {{"method", "rk45"}, {"horizon", 400.0}, {"sample_stride", 0.01}}},
                       {"initial", {{1.0 / 3, 1.0 / 6, 1.0 / 2}, {1.0 / 6, 2.0 / 3, 1.0 / 6}}},
                       {"window_fraction", 0.5}});
      }
      break;
    case Figure::C:
      for (double d : {0.04, 0.08}) {
        out.push_back({{"name", "C_d" + fmt(d)},
                       {"game", {{"kind", "rps_feeble_twin"}, {"d", d}}},
                       {"protocol", {{"selection", {{"kind", "retry_other"}, {"m", 4}}}, {"adoption", pairwise}}},
                       {"integrator", {{"method", "rk45"}, {"horizon", 2000.0}, {"sample_stride", 0.1}}},
                       {"initial", {{1.0 / 7, 2.0 / 7, 1.0 / 7, 3.0 / 7}, {1.0 / 7, 1.0 / 7, 4.0 / 7, 1.0 / 7}}}});
      }
      break;
    case Figure::hypnodisk:
      out.push_back(
          {{"name", "hypnodisk_eps0.005"},
           {"game", {{"kind", "hypnodisk_feeble_twin"}, {"eps", 0.005}, {"inner_radius", 0.05}, {"outer_radius", 0.1}}},
           {"protocol", {{"selection", {{"kind", "list_sample"}, {"m", 3}}}, {"adoption", pairwise}}},
           {"integrator", {{"method", "rk45"}, {"horizon", 2000.0}, {"sample_stride", 0.1}}},
           {"initial", {{"sampler", "interior"}, {"count", 20}, {"floor", 0.02}}},
           {"seed", 20}});
      break;
  }
  return out;
}

namespace {

BundleResult run_figure(const std::string& figure, std::vector<json> docs, const Options& opts,
                        std::optional<std::uint64_t> seed) {
  const auto scenarios = parse_all(docs, seed);
  return scenario_bundle("reproduce", {{"figure", figure}, {"scenarios", docs}}, scenarios, opts);
}

}  // namespace

BundleResult cmd_reproduce(Figure figure, const Options& opts) {
  if (figure == Figure::A) {
    auto r = cmd_sweep_figA(SweepParams{}, opts, "reproduce");
    r.manifest["config"] = {{"figure", "A"}, {"sweep", r.manifest["config"]}};
    finish_manifest(r.manifest, opts);
    return r;
  }
  return run_figure(to_string(figure), figure_scenarios(figure), opts, opts.seed);
}

BundleResult cmd_rerun(const json& manifest, const Options& opts) {
  const Node m(manifest);
  const std::string command = m.at("command").string();
  const Node config = m.at("config");
  BundleResult fresh;
  if (command == "simulate") {
    fresh = cmd_simulate(config.json(), {opts.out, std::nullopt, opts.threads, opts.log});
  } else if (command == "sweep") {
    fresh = cmd_sweep_figA(SweepParams::from_json(config.json()), opts, "sweep");
  } else if (command == "reproduce") {
    const std::string figure = config.at("figure").string();
    if (figure == "A") {
      fresh = cmd_sweep_figA(SweepParams::from_json(config.at("sweep").json()), opts, "reproduce");
      fresh.manifest["config"] = config.json();
      finish_manifest(fresh.manifest, opts);
    } else {
      std::vector<json> docs;
      const Node list = config.at("scenarios");
      for (std::size_t k = 0; k < list.size(); ++k) docs.push_back(list.at(k).json());
      fresh = run_figure(figure, docs, opts, std::nullopt);
    }
  } else {
    m.at("command").fail("cannot re-run command '" + command + "'");
  }

  std::map<std::string, std::string> now;
  for (const auto& f : fresh.manifest["files"]) now[f["path"].get<std::string>()] = f["sha256"].get<std::string>();
  json matched = json::array(), mismatched = json::array();
  const Node files = m.at("files");
  for (std::size_t k = 0; k < files.size(); ++k) {
    const auto path = files.at(k).at("path").string();
    const auto want = files.at(k).at("sha256").string();
    const auto it = now.find(path);
    (it != now.end() && it->second == want ? matched : mismatched).push_back(path);
  }
  log(opts, "rerun: " + std::to_string(matched.size()) + " files match, " + std::to_string(mismatched.size()) +
                " differ");
  for (const auto& p : mismatched) log(opts, "  differs: " + p.get<std::string>());
  return {{{"matched", matched}, {"mismatched", mismatched}, {"manifest", fresh.manifest}}, mismatched.empty()};
}

}  // namespace evodyn::cli
