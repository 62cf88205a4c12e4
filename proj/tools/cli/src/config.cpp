#include "evodyn/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace evodyn::cli {

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

// Library errors become config errors at the node that produced them.
template <typename F>
auto located(const Node& n, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
}

}  // namespace

Node Node::at(const std::string& key) const {
  expect_object();
  const std::string p = pointer_ + "/" + escape_token(key);
  if (!j_->contains(key)) throw ConfigError(p, "missing required key");
  return Node(j_->at(key), p);
}

Node Node::at(std::size_t index) const {
  expect_array();
  const std::string p = pointer_ + "/" + std::to_string(index);
  if (index >= j_->size()) throw ConfigError(p, "index out of range");
  return Node((*j_)[index], p);
}

std::size_t Node::size() const {
  expect_array();
  return j_->size();
}

double Node::number() const {
  if (!j_->is_number()) fail("expected a number");
  const double v = j_->get<double>();
  if (!std::isfinite(v)) fail("expected a finite number");
  return v;
}

double Node::number(double lo, double hi) const {
  const double v = number();
  if (v < lo || v > hi) {
    fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return v;
}

std::int64_t Node::integer(std::int64_t lo, std::int64_t hi) const {
  if (!j_->is_number_integer()) fail("expected an integer");
  const auto v = j_->get<std::int64_t>();
  if (v < lo || v > hi) fail("integer " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

std::string Node::string() const {
  if (!j_->is_string()) fail("expected a string");
  return j_->get<std::string>();
}

bool Node::boolean() const {
  if (!j_->is_boolean()) fail("expected true or false");
  return j_->get<bool>();
}

std::vector<double> Node::numbers() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < size(); ++k) out.push_back(at(k).number());
  return out;
}

double Node::number_or(const std::string& key, double fallback) const {
  return has(key) ? at(key).number() : fallback;
}

std::string Node::string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? at(key).string() : fallback;
}

void Node::expect_object() const {
  if (!j_->is_object()) fail("expected an object");
}

void Node::expect_array() const {
  if (!j_->is_array()) fail("expected an array");
}

void Node::only_keys(std::initializer_list<const char*> allowed) const {
  expect_object();
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j_->items()) {
    if (!ok.contains(key)) throw ConfigError(pointer_ + "/" + escape_token(key), "unknown key");
  }
}

// ---------------------------------------------------------------------------

ParsedGame parse_game(const Node& n) {
  const std::string kind = n.at("kind").string();
  if (kind == "matrix") {
    n.only_keys({"kind", "matrix", "label"});
    const Node rows = n.at("matrix");
    std::vector<std::vector<double>> m;
    for (std::size_t i = 0; i < rows.size(); ++i) m.push_back(rows.at(i).numbers());
    const std::string label = n.string_or("label", "matrix");
    return {located(rows, [&] { return MatrixGame(Matrix(m), label).payoff(); }), std::nullopt};
  }
  if (kind == "rps_feeble_twin") {
    n.only_keys({"kind", "d"});
    const double d = n.at("d").number(0.0, std::numeric_limits<double>::max());
    return {rps_feeble_twin(d).payoff(), std::nullopt};
  }
  if (kind == "constant") {
    n.only_keys({"kind", "payoffs"});
    const Node u = n.at("payoffs");
    if (u.size() != 2) u.fail("constant games take exactly two payoffs");
    return {constant_two_strategy(u.at(0).number(), u.at(1).number()), std::nullopt};
  }
  if (kind == "hypnodisk" || kind == "hypnodisk_feeble_twin") {
    n.only_keys({"kind", "inner_radius", "outer_radius", "center", "eps"});
    HypnodiskParams p;
    p.inner_radius = n.number_or("inner_radius", p.inner_radius);
    p.outer_radius = n.number_or("outer_radius", p.outer_radius);
    if (n.has("center")) p.center = parse_state(n.at("center"), 3);
    located(n, [&] { p.validate(); });
    if (kind == "hypnodisk") {
      if (n.has("eps")) n.at("eps").fail("eps applies to hypnodisk_feeble_twin only");
      return {hypnodisk_game(p), p};
    }
    const double eps = n.has("eps") ? n.at("eps").number(0.0, 1.0) : 0.0;
    return {penalize(add_twin(hypnodisk_game(p)), 3, eps), p};
  }
  if (kind == "twin") {
    n.only_keys({"kind", "base"});
    const Node b = n.at("base");
    auto base = parse_game(b);
    if (base.payoff.arity() != 3) b.fail("twin needs a 3-strategy base game");
    return {add_twin(base.payoff), base.hypnodisk};
  }
  if (kind == "penalize") {
    n.only_keys({"kind", "base", "strategy", "eps"});
    auto base = parse_game(n.at("base"));
    const auto s = n.at("strategy").integer(1, static_cast<std::int64_t>(base.payoff.arity()));
    const double eps = n.at("eps").number(0.0, std::numeric_limits<double>::max());
    return {penalize(base.payoff, static_cast<std::size_t>(s - 1), eps), base.hypnodisk};
  }
  n.at("kind").fail("unknown game kind '" + kind + "'");
}

namespace {

MDistribution parse_m(const Node& n) {
  if (n.has("m") && n.has("m_dist")) n.fail("give either m or m_dist, not both");
  if (n.has("m_dist")) {
    const Node d = n.at("m_dist");
    return located(d, [&] { return MDistribution::table(d.numbers()); });
  }
  return MDistribution::fixed(static_cast<int>(n.at("m").integer(1, 1000)));
}

ScalarMap parse_map(const Node& n) {
  n.only_keys({"kind", "a", "b"});
  ScalarMap s;
  const std::string kind = n.string_or("kind", "constant");
  if (kind == "constant") {
    s.kind = ScalarMap::Kind::constant;
  } else if (kind == "affine") {
    s.kind = ScalarMap::Kind::affine;
  } else if (kind == "exponential") {
    s.kind = ScalarMap::Kind::exponential;
  } else {
    n.at("kind").fail("unknown map kind '" + kind + "'");
  }
  s.a = n.number_or("a", 1.0);
  s.b = n.number_or("b", 0.0);
  return s;
}

}  // namespace

SelectionRule parse_selection(const Node& n) {
  const std::string kind = n.at("kind").string();
  if (kind == "fair") {
    n.only_keys({"kind"});
    return SelectionRule::fair();
  }
  if (kind == "uniform_over_strategies") {
    n.only_keys({"kind"});
    return SelectionRule::uniform_over_strategies();
  }
  if (kind == "mixture") {
    n.only_keys({"kind", "weight", "base"});
    const auto base = parse_selection(n.at("base"));
    const double w = n.at("weight").number(0.0, 1.0);
    return located(n, [&] { return SelectionRule::mixture(base, w); });
  }
  n.only_keys({"kind", "m", "m_dist"});
  if (kind == "list_sample") return SelectionRule::list_sample(parse_m(n));
  if (kind == "majority") return SelectionRule::majority(parse_m(n));
  if (kind == "retry_other") return SelectionRule::retry_other(parse_m(n));
  if (kind == "confirmation") return SelectionRule::confirmation(parse_m(n));
  n.at("kind").fail("unknown selection kind '" + kind + "'");
}

AdoptionRule parse_adoption(const Node& n) {
  const std::string kind = n.at("kind").string();
  if (kind == "success" || kind == "dissatisfaction") {
    n.only_keys({"kind", "K"});
    std::optional<double> k;
    if (n.has("K")) k = n.at("K").number();
    return kind == "success" ? AdoptionRule::success(k) : AdoptionRule::dissatisfaction(k);
  }
  if (kind == "pairwise") {
    n.only_keys({"kind"});
    return AdoptionRule::pairwise();
  }
  if (kind == "above_average") {
    n.only_keys({"kind", "f"});
    return AdoptionRule::above_average(n.has("f") ? parse_map(n.at("f")) : ScalarMap{});
  }
  if (kind == "below_average") {
    n.only_keys({"kind", "g"});
    return AdoptionRule::below_average(n.has("g") ? parse_map(n.at("g")) : ScalarMap{});
  }
  if (kind == "product") {
    n.only_keys({"kind", "f", "g"});
    return AdoptionRule::product(parse_map(n.at("f")), parse_map(n.at("g")));
  }
  n.at("kind").fail("unknown adoption kind '" + kind + "'");
}

RevisionProtocol parse_protocol(const Node& n) {
  n.only_keys({"selection", "adoption"});
  return {parse_selection(n.at("selection")), parse_adoption(n.at("adoption"))};
}

IntegratorConfig parse_integrator(const Node& n) {
  n.only_keys({"method", "h", "rtol", "atol", "h_min", "h_max", "horizon", "sample_stride", "renormalize"});
  IntegratorConfig cfg;
  const std::string method = n.string_or("method", "rk45");
  if (method == "rk4") {
    for (const char* k : {"rtol", "atol", "h_min", "h_max"}) {
      if (n.has(k)) n.at(k).fail("not an rk4 option");
    }
    cfg.method = Rk4Fixed{n.number_or("h", Rk4Fixed{}.h)};
  } else if (method == "rk45") {
    if (n.has("h")) n.at("h").fail("not an rk45 option (use h_min/h_max)");
    Rk45Adaptive a;
    a.rtol = n.number_or("rtol", a.rtol);
    a.atol = n.number_or("atol", a.atol);
    a.h_min = n.number_or("h_min", a.h_min);
    a.h_max = n.number_or("h_max", a.h_max);
    cfg.method = a;
  } else {
    n.at("method").fail("unknown method '" + method + "' (rk4 or rk45)");
  }
  cfg.horizon = n.number_or("horizon", cfg.horizon);
  cfg.sample_stride = n.number_or("sample_stride", cfg.sample_stride);
  if (n.has("renormalize")) cfg.renormalize = n.at("renormalize").boolean();
  located(n, [&] { cfg.validate(); });
  return cfg;
}

Controller parse_controller(const Node& n) {
  const std::string kind = n.at("kind").string();
  if (kind == "threshold") {
    n.only_keys({"kind", "x_min", "x_max", "coordinate", "initial"});
    ThresholdControl t;
    t.x_min = n.at("x_min").number(0.0, 1.0);
    t.x_max = n.at("x_max").number(0.0, 1.0);
    if (!(t.x_min < t.x_max)) n.at("x_max").fail("x_max must exceed x_min");
    if (n.has("coordinate")) t.coordinate = static_cast<std::size_t>(n.at("coordinate").integer(1, 3) - 1);
    if (n.has("initial")) {
      const auto s = n.at("initial").string();
      if (s != "L" && s != "R") n.at("initial").fail("initial action must be L or R");
      t.initial = s == "L" ? Action::L : Action::R;
    }
    return t;
  }
  if (kind == "smooth") {
    n.only_keys({"kind", "exponent"});
    SmoothPeriodicControl s;
    if (n.has("exponent")) s.exponent = n.at("exponent").number(1e-6, 1e6);
    return s;
  }
  if (kind == "constant") {
    n.only_keys({"kind", "y"});
    return ConstantControl{n.at("y").number(0.0, 1.0)};
  }
  n.at("kind").fail("unknown controller kind '" + kind + "'");
}

PopulationState parse_state(const Node& n, std::optional<std::size_t> arity) {
  const auto v = n.numbers();
  if (arity && v.size() != *arity) {
    n.fail("state has " + std::to_string(v.size()) + " entries, expected " + std::to_string(*arity));
  }
  if (v.size() < 2) n.fail("a state needs at least two strategies");
  return located(n, [&] { return validate_state(v); });
}

std::size_t ScenarioConfig::arity() const { return unilateral ? 3 : game->payoff.arity(); }

ScenarioConfig parse_scenario(const nlohmann::json& j, std::optional<std::uint64_t> seed_override) {
  const Node root(j);
  root.only_keys({"name", "game", "protocol", "field", "integrator", "initial", "seed", "window_fraction",
                  "unilateral"});
  ScenarioConfig cfg;
  cfg.raw = j;
  cfg.name = root.string_or("name", cfg.name);
  if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos) {
    root.at("name").fail("name must be non-empty and free of path separators");
  }
  if (root.has("seed")) cfg.seed = static_cast<std::uint64_t>(root.at("seed").integer(0, std::numeric_limits<std::int64_t>::max()));
  if (seed_override) cfg.seed = *seed_override;
  cfg.window_fraction = root.has("window_fraction") ? root.at("window_fraction").number(1e-6, 1.0 - 1e-6) : 0.25;
  if (root.has("integrator")) cfg.integrator = parse_integrator(root.at("integrator"));
  cfg.field = root.string_or("field", "mother");
  if (cfg.field != "mother" && cfg.field != "replicator" && cfg.field != "smith" && cfg.field != "bnn") {
    root.at("field").fail("unknown field '" + cfg.field + "' (mother, replicator, smith, bnn)");
  }

  if (root.has("unilateral")) {
    const Node u = root.at("unilateral");
    u.only_keys({"eps", "controller", "protocol"});
    if (root.has("game")) root.at("game").fail("a unilateral scenario defines its own game");
    if (root.has("protocol")) root.at("protocol").fail("give the protocol inside /unilateral");
    if (cfg.field != "mother") root.at("field").fail("unilateral scenarios use the mother field");
    UnilateralSpec spec{.eps = u.at("eps").number(0.0, 1.0),
                        .controller = parse_controller(u.at("controller")),
                        .protocol = parse_protocol(u.at("protocol"))};
    cfg.unilateral = spec;
  } else {
    cfg.game = parse_game(root.at("game"));
    if (cfg.field == "mother") {
      cfg.protocol = parse_protocol(root.at("protocol"));
    } else if (root.has("protocol")) {
      root.at("protocol").fail("protocol given but field is '" + cfg.field + "'");
    }
  }

  const std::size_t n = cfg.arity();
  const Node init = root.at("initial");
  if (init.json().is_array()) {
    if (init.size() == 0) init.fail("need at least one initial state");
    for (std::size_t k = 0; k < init.size(); ++k) cfg.initial.push_back(parse_state(init.at(k), n));
  } else {
    init.only_keys({"sampler", "count", "floor"});
    if (init.at("sampler").string() != "interior") init.at("sampler").fail("only the 'interior' sampler exists");
    const auto count = init.at("count").integer(1, 100000);
    const double floor = init.has("floor") ? init.at("floor").number(0.0, 1.0 / static_cast<double>(n) - 1e-9) : 1e-3;
    Rng rng(cfg.seed);
    for (std::int64_t k = 0; k < count; ++k) cfg.initial.push_back(interior_state(n, rng, floor));
  }
  return cfg;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace evodyn::cli
