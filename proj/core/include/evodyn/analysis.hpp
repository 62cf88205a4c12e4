#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "evodyn/dynamics.hpp"
#include "evodyn/games.hpp"
#include "evodyn/protocols.hpp"
#include "evodyn/simplex.hpp"
#include "evodyn/trajectory.hpp"

namespace evodyn {

class AnalysisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// `neutral`: the compared quantities are equal at every sampled state.
enum class Verdict { holds, fails, inconclusive, neutral };
std::string to_string(Verdict v);

struct ConditionReport {
  std::string condition;
  Verdict verdict = Verdict::inconclusive;
  std::size_t samples = 0;
  std::optional<PopulationState> witness;
  /// Numbers that make the witness a counterexample.
  std::vector<double> witness_values;
  std::string detail;
  /// Strictness readings satisfied at every state where they apply
  /// ("AR1", "AR2" or the frequency analogues).
  std::vector<std::string> strict_readings;

  static ConditionReport named(std::string condition, Verdict verdict = Verdict::inconclusive) {
    ConditionReport r;
    r.condition = std::move(condition);
    r.verdict = verdict;
    return r;
  }
  bool ok() const { return verdict == Verdict::holds || verdict == Verdict::neutral; }
};

nlohmann::json to_json(const ConditionReport& report);

inline constexpr double kEquilibriumTol = 1e-9;
inline constexpr double kStrictTol = 1e-12;
inline constexpr double kTieTol = 1e-10;

/// All strategies in use earn the same payoff (within kEquilibriumTol).
bool is_population_equilibrium(std::span<const double> x, std::span<const double> payoffs);

/// sum_i dx_i F_i > 0 away from population equilibria, and = 0 at them.
ConditionReport check_positive_correlation(const VectorField& field, const PayoffFunction& f,
                                           const std::vector<PopulationState>& states);

/// Per-capita growth rates dx_i / x_i ordered as payoffs at interior states.
ConditionReport check_monotone(const VectorField& field, const PayoffFunction& f,
                               const std::vector<PopulationState>& states);

enum class AdvantageMode { rarity, frequency };
std::string to_string(AdvantageMode m);

/// Compares per-capita growth of the declared twins of `f`. Strictness is
/// judged against the field's revision protocol: reading 1 applies where a
/// twin imitates others, reading 2 where a twin is imitated.
ConditionReport check_advantage(const VectorField& field, const PayoffFunction& f,
                                const std::vector<PopulationState>& states, AdvantageMode mode);

using RateFunction = std::function<std::vector<double>(const PopulationState& x)>;

/// At interior non-equilibrium states every strategy imitates or is imitated.
ConditionReport check_imitation_condition(const RevisionProtocol& proto, const PayoffFunction& f,
                                          const std::vector<PopulationState>& states);
ConditionReport check_imitation_condition(const RateFunction& rates, const PayoffFunction& f,
                                          const std::vector<PopulationState>& states);

enum class DiskRegion { inner, annulus, outer };
std::string to_string(DiskRegion r);

/// Distance W from the (aggregated) state to the hypnodisk center. A
/// 4-strategy state is aggregated over the twin pair (strategies 3 and 4).
double lyapunov_distance(const PopulationState& x, const HypnodiskParams& params);
DiskRegion classify_region(double w, const HypnodiskParams& params);

struct TwinRatioSeries {
  std::vector<double> times;
  std::vector<double> ratio;
  /// false where the denominator fell below 1e-13.
  std::vector<bool> valid;
  /// |V - 1| never increases by more than 1e-6 between valid samples.
  bool monotone_toward_one = false;
  double terminal_distance = 0.0;
};

TwinRatioSeries twin_ratio_series(const Trajectory& traj, std::size_t i, std::size_t j);

struct TailStats {
  double window_fraction = 0.25;
  double t_start = 0.0;
  std::size_t samples = 0;
  std::vector<double> min;
  /// Time average by the trapezoid rule.
  std::vector<double> mean;
  std::vector<double> max;
};

inline constexpr std::size_t kMinTailSamples = 100;

TailStats tail_stats(const Trajectory& traj, double window_fraction = 0.25);
nlohmann::json to_json(const TailStats& s);

struct LiminfEstimate {
  double value = 0.0;
  double t_start = 0.0;
  std::optional<double> period;
};

/// Tail minimum of component i. When `signal` (one value per row, default
/// x_i) recurs periodically the window is widened to cover two periods.
LiminfEstimate liminf_estimate(const Trajectory& traj, std::size_t i, double window_fraction = 0.25,
                               const std::vector<double>* signal = nullptr);

/// Mean spacing of upward crossings of the tail mean, if at least three occur.
std::optional<double> detect_period(std::span<const double> times, std::span<const double> values,
                                    double window_fraction = 0.5);

}  // namespace evodyn
