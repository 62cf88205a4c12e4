#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "evodyn/cli/commands.hpp"
#include "evodyn/cli/config.hpp"
#include "evodyn/integrate.hpp"

namespace {

// 0 success, 1 a check did not hold, 2 bad input, 3 runtime failure.
int run(int argc, char** argv) {
  using namespace evodyn::cli;
  CLI::App app{"Evolutionary dynamics from two-step revision protocols"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config_path, manifest_path, figure, out = ".";
  std::uint64_t seed = 0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config_path, "scenario or parameter JSON")->check(CLI::ExistingFile);
    if (needs_config) c->required();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  };
  auto* simulate = app.add_subcommand("simulate", "integrate a scenario config");
  common(simulate, true);
  auto* sweep = app.add_subcommand("sweep", "asymptotic share curve with simulation cross-check");
  common(sweep, false);
  auto* verify = app.add_subcommand("verify", "structural condition checks");
  common(verify, false);
  auto* reproduce = app.add_subcommand("reproduce", "figure bundles, or a re-run from a manifest");
  common(reproduce, false);
  auto* fig = reproduce->add_option("--figure", figure, "A, B, C or hypnodisk")
                  ->check(CLI::IsMember({"A", "B", "C", "hypnodisk"}));
  auto* man = reproduce->add_option("--manifest", manifest_path, "manifest.json to re-run")->check(CLI::ExistingFile);
  fig->excludes(man);
  man->excludes(fig);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  Options opts;
  opts.out = out;
  opts.threads = threads;
  opts.log = &std::cerr;
  for (auto* sub : {simulate, sweep, verify, reproduce}) {
    if (*sub && sub->count("--seed")) opts.seed = seed;
  }

  try {
    if (*simulate) return cmd_simulate(load_json_file(config_path), opts).ok ? 0 : 1;
    if (*sweep) {
      const auto params = config_path.empty() ? SweepParams{} : SweepParams::from_json(load_json_file(config_path));
      return cmd_sweep_figA(params, opts).ok ? 0 : 1;
    }
    if (*verify) {
      std::optional<nlohmann::json> cfg;
      if (!config_path.empty()) cfg = load_json_file(config_path);
      const auto r = cmd_verify(cfg, opts);
      return r.ok && r.witnesses_confirmed ? 0 : 1;
    }
    if (!manifest_path.empty()) return cmd_rerun(load_json_file(manifest_path), opts).ok ? 0 : 1;
    if (figure.empty()) {
      std::cerr << "reproduce: give --figure or --manifest\n";
      return 2;
    }
    return cmd_reproduce(parse_figure(figure), opts).ok ? 0 : 1;
  } catch (const evodyn::IntegrationError& e) {
    std::cerr << "integration failed at t=" << e.time() << ": " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
