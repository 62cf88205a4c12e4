#include <cmath>
#include <map>
#include <ostream>

#include "evodyn/cli/commands.hpp"
#include "evodyn/cli/io.hpp"
#include "evodyn/dynamics.hpp"

namespace evodyn::cli {

using nlohmann::json;

namespace {

constexpr std::size_t kVerifyStates = 200;
constexpr std::uint64_t kVerifySeed = 7;

PayoffFunction builtin_game(const std::string& key) {
  if (key == "hypnodisk_twin") return add_twin(hypnodisk_game(HypnodiskParams{}));
  if (key == "gamma_0") return constant_two_strategy(1.0, 1.0).with_twin_pair(0, 1);
  if (key == "gamma_0.01") return constant_two_strategy(1.0, 0.99);
  if (key == "gamma_0.1") return constant_two_strategy(1.0, 0.9);
  if (key == "rps") return MatrixGame(Matrix({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}}), "rps").payoff();
  throw std::invalid_argument("unknown built-in game '" + key + "'");
}

json protocol_json(const std::string& sel, int m, const json& adoption) {
  json s = {{"kind", sel}};
  if (m > 0) s["m"] = m;
  return {{"selection", s}, {"adoption", adoption}};
}

std::vector<PopulationState> sample_states(std::size_t n, std::size_t count, std::uint64_t seed, double floor) {
  Rng rng(seed);
  std::vector<PopulationState> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(interior_state(n, rng, floor));
  return out;
}

ConditionReport run_check(const std::string& condition, const RevisionProtocol& proto, const PayoffFunction& f,
                          const std::vector<PopulationState>& states) {
  const auto field = mother_field(proto, f);
  if (condition == "monotone") return check_monotone(field, f, states);
  if (condition == "pc") return check_positive_correlation(field, f, states);
  if (condition == "ar") return check_advantage(field, f, states, AdvantageMode::rarity);
  if (condition == "af") return check_advantage(field, f, states, AdvantageMode::frequency);
  if (condition == "im") return check_imitation_condition(proto, f, states);
  throw std::invalid_argument("unknown condition '" + condition + "' (monotone, pc, ar, af, im)");
}

}  // namespace

std::vector<VerifyRow> verify_table() {
  const json pairwise = {{"kind", "pairwise"}};
  const auto H = "hypnodisk_twin";
  using V = Verdict;
  return {
      {"fair+pairwise",
       protocol_json("fair", 0, pairwise),
       {{"monotone", H, V::holds}, {"pc", H, V::holds}, {"ar", H, V::neutral}}},
      {"list_sample(3)+pairwise",
       protocol_json("list_sample", 3, pairwise),
       {{"pc", H, V::holds}, {"ar", H, V::holds}, {"monotone", H, V::fails}}},
      {"retry_other(4)+pairwise",
       protocol_json("retry_other", 4, pairwise),
       {{"pc", H, V::holds}, {"ar", H, V::holds}, {"monotone", H, V::fails}}},
      {"majority(3)+pairwise",
       protocol_json("majority", 3, pairwise),
       {{"pc", H, V::holds}, {"af", H, V::holds}, {"monotone", H, V::fails}}},
      {"confirmation(3)+pairwise",
       protocol_json("confirmation", 3, pairwise),
       {{"pc", H, V::holds}, {"af", H, V::holds}, {"monotone", H, V::fails}}},
      {"list_sample(3)+above_average",
       protocol_json("list_sample", 3, {{"kind", "above_average"}}),
       {{"pc", H, V::holds}, {"pc", "rps", V::holds}, {"ar", H, V::holds}}},
      {"retry_other(4)+below_average",
       protocol_json("retry_other", 4, {{"kind", "below_average"}}),
       {{"pc", H, V::holds}, {"pc", "rps", V::holds}, {"ar", H, V::holds}}},
      {"retry_other(4)+success",
       protocol_json("retry_other", 4, {{"kind", "success"}}),
       {{"pc", "gamma_0.1", V::fails}, {"monotone", "gamma_0.01", V::fails}, {"ar", "gamma_0", V::holds}}},
  };
}

bool confirm_witness(const ConditionReport& report, const VectorField& field, const PayoffFunction& f) {
  if (report.verdict != Verdict::fails || !report.witness) return false;
  const auto& x = *report.witness;
  const auto payoffs = f(x);
  const auto dx = field(f, x);
  const std::size_t n = x.size();

  if (report.condition == "positive_correlation") {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += dx[i] * payoffs[i];
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] > 1e-9) lo = std::min(lo, payoffs[i]), hi = std::max(hi, payoffs[i]);
    }
    return hi - lo <= 1e-9 ? std::abs(v) > 1e-9 : v < -1e-12;
  }
  if (report.condition == "monotone") {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (payoffs[i] > payoffs[j] + 1e-10 && dx[i] / x[i] <= dx[j] / x[j]) return true;
        if (std::abs(payoffs[i] - payoffs[j]) <= 1e-10 && std::abs(dx[i] / x[i] - dx[j] / x[j]) > 1e-10) return true;
      }
    }
    return false;
  }
  if (report.condition == "advantage_rarity" || report.condition == "advantage_frequency") {
    const auto [i, j] = f.twin_pair().value();
    const std::size_t rare = x[i] < x[j] ? i : j, freq = rare == i ? j : i;
    const double d = dx[rare] / x[rare] - dx[freq] / x[freq];
    return report.condition == "advantage_rarity" ? d < 0.0 : d > 0.0;
  }
  if (report.condition == "imitation") {
    const auto* proto = field.protocol();
    if (!proto) return false;
    const auto rho = switch_rates(*proto, f, x);
    for (std::size_t i = 0; i < n; ++i) {
      bool linked = false;
      for (std::size_t j = 0; j < n; ++j) linked = linked || (j != i && (rho[i * n + j] > 0 || rho[j * n + i] > 0));
      if (!linked) return true;
    }
    return false;
  }
  return false;
}

namespace {

json evaluate(const std::string& condition, const RevisionProtocol& proto, const PayoffFunction& f,
              const std::vector<PopulationState>& states, bool& confirmed) {
  const auto report = run_check(condition, proto, f, states);
  json j = to_json(report);
  if (report.verdict == Verdict::fails) {
    const bool ok = confirm_witness(report, mother_field(proto, f), f);
    j["witness_confirmed"] = ok;
    confirmed = confirmed && ok;
  }
  j["verdict"] = to_string(report.verdict);
  return j;
}

}  // namespace

VerifyResult cmd_verify(const std::optional<json>& config, const Options& opts) {
  VerifyResult result;
  if (!config) {
    json rows = json::array();
    for (const auto& row : verify_table()) {
      const auto proto = parse_protocol(Node(row.protocol));
      json checks = json::array();
      for (const auto& c : row.checks) {
        const auto f = builtin_game(c.game);
        const auto states = sample_states(f.arity(), kVerifyStates, kVerifySeed, 1e-3);
        json j = evaluate(c.condition, proto, f, states, result.witnesses_confirmed);
        j["game"] = c.game;
        j["check"] = c.condition;
        j["expected"] = to_string(*c.expected);
        const bool match = j["verdict"] == j["expected"];
        j["match"] = match;
        result.ok = result.ok && match;
        if (opts.log) {
          *opts.log << (match ? "ok   " : "FAIL ") << row.label << "  " << c.condition << " on " << c.game << ": "
                    << j["verdict"].get<std::string>() << " (expected " << j["expected"].get<std::string>() << ")\n";
        }
        checks.push_back(std::move(j));
      }
      rows.push_back({{"protocol", row.label}, {"definition", row.protocol}, {"checks", std::move(checks)}});
    }
    result.report = {{"table", std::move(rows)},
                     {"states", {{"count", kVerifyStates}, {"seed", kVerifySeed}, {"floor", 1e-3}}},
                     {"all_match", result.ok},
                     {"witnesses_confirmed", result.witnesses_confirmed}};
  } else {
    const Node root(*config);
    root.only_keys({"game", "protocol", "conditions", "states"});
    const auto game = parse_game(root.at("game"));
    const auto proto = parse_protocol(root.at("protocol"));
    std::size_t count = kVerifyStates;
    std::uint64_t seed = opts.seed.value_or(kVerifySeed);
    double floor = 1e-3;
    if (root.has("states")) {
      const Node s = root.at("states");
      s.only_keys({"count", "seed", "floor"});
      if (s.has("count")) count = static_cast<std::size_t>(s.at("count").integer(1, 1000000));
      if (s.has("seed") && !opts.seed) seed = static_cast<std::uint64_t>(s.at("seed").integer(0, INT64_MAX));
      if (s.has("floor")) floor = s.at("floor").number(0.0, 0.9 / static_cast<double>(game.payoff.arity()));
    }
    std::vector<std::string> conditions = {"monotone", "pc", "im"};
    if (game.payoff.twin_pair()) conditions.insert(conditions.end(), {"ar", "af"});
    if (root.has("conditions")) {
      const Node c = root.at("conditions");
      conditions.clear();
      for (std::size_t k = 0; k < c.size(); ++k) {
        const auto name = c.at(k).string();
        if (name != "monotone" && name != "pc" && name != "ar" && name != "af" && name != "im") {
          c.at(k).fail("unknown condition '" + name + "'");
        }
        if ((name == "ar" || name == "af") && !game.payoff.twin_pair()) c.at(k).fail("game declares no twin pair");
        conditions.push_back(name);
      }
    }
    const auto states = sample_states(game.payoff.arity(), count, seed, floor);
    json reports = json::array();
    for (const auto& c : conditions) {
      json j = evaluate(c, proto, game.payoff, states, result.witnesses_confirmed);
      j["check"] = c;
      const bool held = j["verdict"] == "holds" || j["verdict"] == "neutral";
      result.ok = result.ok && held;
      if (opts.log) *opts.log << (held ? "ok   " : "FAIL ") << c << ": " << j["verdict"].get<std::string>() << '\n';
      reports.push_back(std::move(j));
    }
    result.report = {{"config", *config},
                     {"states", {{"count", count}, {"seed", seed}, {"floor", floor}}},
                     {"reports", std::move(reports)},
                     {"all_hold", result.ok}};
  }
  std::filesystem::create_directories(opts.out);
  write_file_atomic(opts.out / "verify.json", result.report.dump(2) + "\n");
  return result;
}

}  // namespace evodyn::cli
