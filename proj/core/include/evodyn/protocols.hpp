#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "evodyn/games.hpp"
#include "evodyn/simplex.hpp"

namespace evodyn {

class ProtocolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when exact enumeration would be too large; use the Monte-Carlo
/// estimator instead.
class EnumerationLimitError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

inline constexpr int kMaxEnumeratedSample = 12;
inline constexpr std::size_t kMaxEnumeratedStrategies = 8;

/// Law of the (bounded) number m of agents met: prob[k] = P(m = k + 1).
class MDistribution {
 public:
  static MDistribution fixed(int m);
  static MDistribution table(std::vector<double> prob);

  int max() const { return static_cast<int>(prob_.size()); }
  double probability(int m) const { return m >= 1 && m <= max() ? prob_[static_cast<std::size_t>(m - 1)] : 0.0; }
  const std::vector<double>& probabilities() const { return prob_; }
  bool is_fixed() const;

  friend bool operator==(const MDistribution&, const MDistribution&) = default;

 private:
  explicit MDistribution(std::vector<double> prob) : prob_(std::move(prob)) {}
  std::vector<double> prob_;
};

enum class SelectionKind {
  fair,
  list_sample,
  majority,
  retry_other,
  confirmation,
  uniform_over_strategies,
  mixture,
};

std::string to_string(SelectionKind kind);

/// Step 1 of a two-step protocol: the probability p_ij that a revising
/// i-strategist considers strategy j.
class SelectionRule {
 public:
  static SelectionRule fair();
  /// Meet m agents, list their distinct strategies, pick one uniformly.
  static SelectionRule list_sample(MDistribution m);
  /// Meet m agents, pick the most common strategy (ties uniformly).
  static SelectionRule majority(MDistribution m);
  /// Redraw up to m times until meeting another strategy.
  static SelectionRule retry_other(MDistribution m);
  /// Meet m agents; keep own strategy if any of them shares it.
  static SelectionRule confirmation(MDistribution m);
  static SelectionRule uniform_over_strategies();
  /// w * base + (1 - w) * fair.
  static SelectionRule mixture(const SelectionRule& base, double weight);

  SelectionKind kind() const { return kind_; }
  const MDistribution& m() const { return m_; }
  double weight() const { return weight_; }
  const SelectionRule* base() const { return base_.get(); }

  /// p_ij vanishes whenever x_j = 0.
  bool imitative() const;
  /// p_ij = lambda_j(x) x_j with lambda independent of the revising strategy.
  bool target_form() const;
  /// p_ij = lambda_i(x) x_j with lambda depending on the revising strategy only.
  bool source_form() const;

  std::string describe() const;

 private:
  SelectionRule(SelectionKind kind, MDistribution m) : kind_(kind), m_(std::move(m)) {}

  SelectionKind kind_;
  MDistribution m_;
  double weight_ = 1.0;
  std::shared_ptr<const SelectionRule> base_;
};

/// A positive scalar map used by product adoption rules.
struct ScalarMap {
  enum class Kind { constant, affine, exponential };
  Kind kind = Kind::constant;
  double a = 1.0;
  double b = 0.0;

  /// constant: a; affine: a + b u; exponential: a exp(b u).
  double operator()(double u) const;
  /// +1 nondecreasing, -1 nonincreasing, 0 constant.
  int monotonicity() const;
  std::string describe() const;
};

enum class AdoptionKind {
  success,
  dissatisfaction,
  pairwise_proportional,
  above_average,
  below_average,
  product,
};

std::string to_string(AdoptionKind kind);

/// Step 2: the adoption rate r_ij.
class AdoptionRule {
 public:
  static AdoptionRule success(std::optional<double> baseline = std::nullopt);
  static AdoptionRule dissatisfaction(std::optional<double> baseline = std::nullopt);
  static AdoptionRule pairwise();
  /// [F_j - Fbar]_+ scaled by f(F_i).
  static AdoptionRule above_average(ScalarMap f = {});
  /// [Fbar - F_i]_+ scaled by g(F_j).
  static AdoptionRule below_average(ScalarMap g = {});
  /// f(F_i) g(F_j).
  static AdoptionRule product(ScalarMap f, ScalarMap g);

  AdoptionKind kind() const { return kind_; }
  std::optional<double> baseline() const { return baseline_; }
  const ScalarMap& f() const { return f_; }
  const ScalarMap& g() const { return g_; }

  bool needs_baseline() const {
    return (kind_ == AdoptionKind::success || kind_ == AdoptionKind::dissatisfaction) && !baseline_;
  }
  AdoptionRule with_baseline(double k) const;
  /// Whether r_ij carries the sign of [F_j - F_i]_+.
  bool pairwise_signed() const { return kind_ == AdoptionKind::pairwise_proportional; }

  std::string describe() const;

 private:
  explicit AdoptionRule(AdoptionKind kind) : kind_(kind) {}

  AdoptionKind kind_;
  std::optional<double> baseline_;
  ScalarMap f_;
  ScalarMap g_;
};

/// rho_ij = p_ij * r_ij.
struct RevisionProtocol {
  SelectionRule selection;
  AdoptionRule adoption;

  std::string describe() const;
};

/// Selection probabilities of a revising i-strategist, indexed by target
/// strategy; entry i is 0 and 1 - sum is the probability of keeping i.
std::vector<double> selection_prob(const SelectionRule& rule, std::size_t i, const PopulationState& x);

/// Row i of the matrix is selection_prob(rule, i, x). Enumerates once for
/// rules whose selection does not depend on the revising strategy.
std::vector<double> selection_matrix(const SelectionRule& rule, std::span<const double> x);

struct McEstimate {
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::uint64_t samples = 0;
};

/// Monte-Carlo estimate of selection_prob obtained by simulating the
/// meeting process agent by agent.
McEstimate selection_prob_mc(const SelectionRule& rule, std::size_t i, const PopulationState& x,
                             std::uint64_t samples, std::uint64_t seed);

/// Probability that strategy i is picked from the list given that l of the
/// m agents met play neither i nor j, those l agents show q distinct
/// strategies, and m_tilde = m - l agents play i or j; y_i = x_i/(x_i+x_j).
double conditional_selection_given_event(int l, int q, int m_tilde, double y_i);

/// lambda_ij = p_ij / x_j, or nullopt where x_j = 0 (and for j = i).
std::vector<std::optional<double>> lambda_factors(const SelectionRule& rule, std::size_t i,
                                                  const PopulationState& x);

/// r_ij given payoffs F_vals at state x.
double adoption_rate(const AdoptionRule& rule, std::size_t i, std::size_t j, std::span<const double> payoffs,
                     std::span<const double> x);

/// 1 + max |F_i(x)| over a deterministic 10^3-point sample.
double default_baseline(const PayoffFunction& f);

/// Fills in a missing baseline K from the game.
RevisionProtocol resolve_baseline(RevisionProtocol proto, const PayoffFunction& f);

/// Row-major N x N matrix of switch rates with zero diagonal.
std::vector<double> switch_rates(const RevisionProtocol& proto, const PayoffFunction& f, const PopulationState& x);
/// Raw variant used in hot loops; payoffs already evaluated, baseline resolved.
void switch_rates_into(const RevisionProtocol& proto, std::span<const double> x, std::span<const double> payoffs,
                       std::span<double> rho);

nlohmann::json to_json(const RevisionProtocol& proto);
nlohmann::json to_json(const SelectionRule& rule);
nlohmann::json to_json(const AdoptionRule& rule);

}  // namespace evodyn
