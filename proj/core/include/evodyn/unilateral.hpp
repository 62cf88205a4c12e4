#pragma once

#include <vector>

#include "evodyn/analysis.hpp"
#include "evodyn/integrate.hpp"
#include "evodyn/protocols.hpp"

namespace evodyn {

/// Focal 3-strategy population facing an opponent who plays L with
/// probability y. Rows (1, 0), (0, 1), (-eps, 1 - eps) against (L, R).
class UnilateralGame {
 public:
  explicit UnilateralGame(double eps);

  double eps() const { return eps_; }
  /// F(y) = (y, 1 - y, 1 - y - eps).
  std::vector<double> payoffs(double y) const;
  /// The constant game faced when the opponent mixes with weight y.
  PayoffFunction at(double y) const;

 private:
  double eps_;
};

/// Mother field of `proto` with payoffs driven by the opponent mixture.
/// A missing baseline K is resolved against both pure opponent actions.
ControlledField unilateral_field(const RevisionProtocol& proto, const UnilateralGame& game);

Trajectory run_unilateral(const RevisionProtocol& proto, double eps, const Controller& controller,
                          const PopulationState& x0, const IntegratorConfig& cfg);

struct AssumptionReport {
  ConditionReport a2;
  ConditionReport a3;
  ConditionReport a3_prime;
  bool ok() const { return a2.ok() && (a3.ok() || a3_prime.ok()); }
};

/// Evaluates per-capita growth under fixed L and R at eps = 0 over states
/// with x_1 in (0, 1) (for A2) and x_3 < x_2 (for A3, A3').
AssumptionReport verify_A_assumptions(const RevisionProtocol& proto, const std::vector<PopulationState>& states);

nlohmann::json to_json(const AssumptionReport& r);

}  // namespace evodyn
