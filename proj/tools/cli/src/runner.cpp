#include "evodyn/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "evodyn/analysis.hpp"
#include "evodyn/dynamics.hpp"
#include "evodyn/integrate.hpp"
#include "evodyn/unilateral.hpp"

namespace evodyn::cli {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        task(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const auto n = std::min<std::size_t>(std::max(1u, threads), count);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

VectorField make_field(const ScenarioConfig& cfg) {
  if (cfg.field == "replicator") return replicator_field();
  if (cfg.field == "smith") return smith_field();
  if (cfg.field == "bnn") return bnn_field();
  return mother_field(*cfg.protocol, cfg.game->payoff);
}

}  // namespace

Trajectory run_cell(const ScenarioConfig& cfg, std::size_t k) {
  const auto& x0 = cfg.initial.at(k);
  if (cfg.unilateral) {
    const auto& u = *cfg.unilateral;
    return run_unilateral(u.protocol, u.eps, u.controller, x0, cfg.integrator);
  }
  return integrate(make_field(cfg), cfg.game->payoff, x0, cfg.integrator);
}

std::vector<std::vector<Trajectory>> run_scenarios(const std::vector<ScenarioConfig>& scenarios, unsigned threads) {
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  std::vector<std::vector<Trajectory>> out(scenarios.size());
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    out[s].resize(scenarios[s].initial.size());
    for (std::size_t k = 0; k < scenarios[s].initial.size(); ++k) cells.emplace_back(s, k);
  }
  parallel_for(cells.size(), threads, [&](std::size_t c) {
    const auto [s, k] = cells[c];
    out[s][k] = run_cell(scenarios[s], k);
  });
  return out;
}

nlohmann::json analyze_trajectory(const ScenarioConfig& cfg, const Trajectory& traj) {
  nlohmann::json j;
  j["rows"] = traj.size();
  j["t_final"] = traj.times().back();
  j["x0"] = traj.state(0).vec();
  j["x_final"] = traj.back().vec();
  const double wf = cfg.window_fraction;

  std::optional<std::vector<double>> w;
  if (cfg.game && cfg.game->hypnodisk) {
    w.emplace();
    for (const auto& x : traj.states()) w->push_back(lyapunov_distance(x, *cfg.game->hypnodisk));
  }

  try {
    j["tail"] = to_json(tail_stats(traj, wf));
  } catch (const AnalysisError& e) {
    j["tail"] = nullptr;
    j["tail_error"] = e.what();
    return j;
  }

  auto& lim = j["liminf"];
  lim = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.arity(); ++i) {
    const auto est = liminf_estimate(traj, i, wf, w ? &*w : nullptr);
    nlohmann::json e{{"strategy", i + 1}, {"value", est.value}, {"t_start", est.t_start}};
    e["period"] = est.period ? nlohmann::json(*est.period) : nlohmann::json(nullptr);
    lim.push_back(e);
  }

  const double t_start = traj.times().back() * (1.0 - wf);
  if (w) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      if (traj.time(k) < t_start) continue;
      lo = std::min(lo, (*w)[k]);
      hi = std::max(hi, (*w)[k]);
    }
    const auto& p = *cfg.game->hypnodisk;
    j["W"] = {{"tail_min", lo},
              {"tail_max", hi},
              {"inner_radius", p.inner_radius},
              {"outer_radius", p.outer_radius},
              {"final_region", to_string(classify_region(w->back(), p))}};
  }

  if (traj.arity() == 4) {
    const auto v = twin_ratio_series(traj, 3, 2);
    double dev = 0.0;
    for (std::size_t k = 0; k < v.times.size(); ++k) {
      if (v.times[k] >= t_start && v.valid[k]) dev = std::max(dev, std::abs(v.ratio[k] - 1.0));
    }
    j["twin_ratio"] = {{"pair", {4, 3}},
                       {"terminal_distance", v.terminal_distance},
                       {"tail_max_distance", dev},
                       {"monotone_toward_one", v.monotone_toward_one}};
  }

  if (cfg.unilateral) {
    std::size_t switches = 0;
    for (const auto& e : traj.events()) switches += e.empty() ? 0 : 1;
    j["switches"] = switches;
  }
  return j;
}

}  // namespace evodyn::cli
