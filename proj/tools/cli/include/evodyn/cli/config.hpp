#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evodyn/games.hpp"
#include "evodyn/integrate.hpp"
#include "evodyn/protocols.hpp"
#include "evodyn/simplex.hpp"

namespace evodyn::cli {

/// A config problem located by a JSON pointer into the document.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string pointer, const std::string& message)
      : std::invalid_argument("config error at " + (pointer.empty() ? std::string("/") : pointer) + ": " + message),
        pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Read-only view of a JSON node that remembers where it came from.
class Node {
 public:
  Node(const nlohmann::json& j, std::string pointer = "") : j_(&j), pointer_(std::move(pointer)) {}

  const nlohmann::json& json() const { return *j_; }
  const std::string& pointer() const { return pointer_; }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }
  Node at(const std::string& key) const;
  Node at(std::size_t index) const;
  std::size_t size() const;

  double number() const;
  double number(double lo, double hi) const;
  std::int64_t integer(std::int64_t lo, std::int64_t hi) const;
  std::string string() const;
  bool boolean() const;
  std::vector<double> numbers() const;

  double number_or(const std::string& key, double fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(pointer_, message); }
  void expect_object() const;
  void expect_array() const;
  /// Rejects keys outside `allowed`.
  void only_keys(std::initializer_list<const char*> allowed) const;

 private:
  const nlohmann::json* j_;
  std::string pointer_;
};

struct ParsedGame {
  PayoffFunction payoff;
  /// Present for hypnodisk-based games (enables W instrumentation).
  std::optional<HypnodiskParams> hypnodisk;
};

ParsedGame parse_game(const Node& n);
SelectionRule parse_selection(const Node& n);
AdoptionRule parse_adoption(const Node& n);
RevisionProtocol parse_protocol(const Node& n);
IntegratorConfig parse_integrator(const Node& n);
Controller parse_controller(const Node& n);
PopulationState parse_state(const Node& n, std::optional<std::size_t> arity = std::nullopt);

struct UnilateralSpec {
  double eps = 0.0;
  Controller controller = SmoothPeriodicControl{};
  RevisionProtocol protocol;
};

struct ScenarioConfig {
  std::string name = "scenario";
  nlohmann::json raw;
  std::optional<ParsedGame> game;
  std::optional<RevisionProtocol> protocol;
  /// mother | replicator | smith | bnn
  std::string field = "mother";
  IntegratorConfig integrator;
  std::vector<PopulationState> initial;
  std::uint64_t seed = 1;
  double window_fraction = 0.25;
  std::optional<UnilateralSpec> unilateral;

  std::size_t arity() const;
};

/// Validates a scenario document. Initial conditions may be an explicit
/// list of states or {"sampler": "interior", "count", "floor"} drawn from
/// `seed` (the override replaces the document's seed).
ScenarioConfig parse_scenario(const nlohmann::json& j, std::optional<std::uint64_t> seed_override = std::nullopt);

nlohmann::json load_json_file(const std::string& path);

}  // namespace evodyn::cli
