#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "evodyn/cli/config.hpp"
#include "evodyn/trajectory.hpp"

namespace evodyn::cli {

/// Runs task(0..count-1) on up to `threads` workers. The first failure by
/// index is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

/// One trajectory for initial condition k of the scenario.
Trajectory run_cell(const ScenarioConfig& cfg, std::size_t k);

/// All initial conditions of all scenarios; result[s][k].
std::vector<std::vector<Trajectory>> run_scenarios(const std::vector<ScenarioConfig>& scenarios, unsigned threads);

/// Long-run statistics of one trajectory: tail stats, liminf of every
/// strategy, W(x) for hypnodisk games, twin ratio x4/x3 for 4-strategy
/// games, switch counts for controlled runs.
nlohmann::json analyze_trajectory(const ScenarioConfig& cfg, const Trajectory& traj);

}  // namespace evodyn::cli
