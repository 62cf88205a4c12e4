#include "evodyn/unilateral.hpp"

#include <array>
#include <cmath>

#include <nlohmann/json.hpp>

#include "evodyn/dynamics.hpp"

namespace evodyn {

UnilateralGame::UnilateralGame(double eps) : eps_(eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw GameError("unilateral game margin eps must be finite and >= 0");
}

std::vector<double> UnilateralGame::payoffs(double y) const { return {y, 1.0 - y, 1.0 - y - eps_}; }

PayoffFunction UnilateralGame::at(double y) const {
  const auto u = payoffs(y);
  PayoffFunction f(
      3, PayoffKind::constant,
      [u](std::span<const double>, std::span<double> out) { std::copy(u.begin(), u.end(), out.begin()); },
      "unilateral(eps=" + format_double(eps_) + ",y=" + format_double(y) + ")");
  return eps_ == 0.0 ? f.with_twin_pair(1, 2) : f;
}

ControlledField unilateral_field(const RevisionProtocol& proto, const UnilateralGame& game) {
  RevisionProtocol resolved = proto;
  if (proto.adoption.needs_baseline()) {
    const double k = std::max(default_baseline(game.at(0.0)), default_baseline(game.at(1.0)));
    resolved.adoption = proto.adoption.with_baseline(k);
  }
  const double eps = game.eps();
  return [resolved, eps](double y, std::span<const double> x, std::span<double> dx) {
    const double payoffs[3] = {y, 1.0 - y, 1.0 - y - eps};
    mother_velocity(resolved, x, payoffs, dx);
  };
}

Trajectory run_unilateral(const RevisionProtocol& proto, double eps, const Controller& controller,
                          const PopulationState& x0, const IntegratorConfig& cfg) {
  if (x0.size() != 3) throw std::invalid_argument("run_unilateral needs a 3-strategy initial state");
  return integrate_controlled(unilateral_field(proto, UnilateralGame(eps)), controller, x0, cfg);
}

namespace {

struct Growth {
  std::array<double, 3> l;
  std::array<double, 3> r;
};

Growth growth_rates(const ControlledField& field, const PopulationState& x) {
  Growth g{};
  std::array<double, 3> dx{};
  field(1.0, x.weights(), dx);
  for (std::size_t i = 0; i < 3; ++i) g.l[i] = dx[i] / x[i];
  field(0.0, x.weights(), dx);
  for (std::size_t i = 0; i < 3; ++i) g.r[i] = dx[i] / x[i];
  return g;
}

bool strictly_greater(double a, double b) { return a - b > kStrictTol * std::max(std::abs(a), std::abs(b)) && a > b; }
bool weakly_greater(double a, double b) { return a - b >= -kStrictTol * std::max(std::abs(a), std::abs(b)); }

}  // namespace

AssumptionReport verify_A_assumptions(const RevisionProtocol& proto, const std::vector<PopulationState>& states) {
  const auto field = unilateral_field(proto, UnilateralGame(0.0));
  AssumptionReport out;
  out.a2 = ConditionReport::named("A2", Verdict::holds);
  out.a3 = ConditionReport::named("A3", Verdict::holds);
  out.a3_prime = ConditionReport::named("A3'", Verdict::holds);
  auto fail = [](ConditionReport& r, const PopulationState& x, std::vector<double> v, std::string why) {
    if (r.verdict == Verdict::fails) return;
    r.verdict = Verdict::fails;
    r.witness = x;
    r.witness_values = std::move(v);
    r.detail = std::move(why);
  };
  for (const auto& x : states) {
    if (x.size() != 3) throw AnalysisError("verify_A_assumptions needs 3-strategy states");
    if (!x.interior()) continue;
    const auto g = growth_rates(field, x);
    ++out.a2.samples;
    if (!(g.l[0] > 0.0 && g.r[0] < 0.0)) fail(out.a2, x, {g.l[0], g.r[0]}, "g1 under L not > 0 or under R not < 0");
    if (!(x[2] < x[1])) continue;
    ++out.a3.samples;
    ++out.a3_prime.samples;
    if (!(weakly_greater(g.l[2], g.l[1]) && strictly_greater(g.r[2], g.r[1]))) {
      fail(out.a3, x, {g.l[1], g.l[2], g.r[1], g.r[2]}, "needs g3 >= g2 under L and g3 > g2 under R");
    }
    if (!(strictly_greater(g.l[2], g.l[1]) && weakly_greater(g.r[2], g.r[1]))) {
      fail(out.a3_prime, x, {g.l[1], g.l[2], g.r[1], g.r[2]}, "needs g3 > g2 under L and g3 >= g2 under R");
    }
  }
  return out;
}

nlohmann::json to_json(const AssumptionReport& r) {
  return {{"A2", to_json(r.a2)}, {"A3", to_json(r.a3)}, {"A3'", to_json(r.a3_prime)}, {"ok", r.ok()}};
}

}  // namespace evodyn
