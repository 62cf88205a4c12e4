#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evodyn {

// Tolerance for accepting user-supplied states.
inline constexpr double kSimplexTol = 1e-9;
// Tolerance for renormalizing integrator output.
inline constexpr double kDriftTol = 1e-7;

class SimplexError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point x on the standard simplex: non-negative strategy frequencies
/// summing to one. Instances can only be obtained through validation, so
/// holding a PopulationState means the invariant holds.
class PopulationState {
 public:
  static PopulationState validate(std::span<const double> v, double tol = kSimplexTol);
  static PopulationState barycenter(std::size_t n);
  static PopulationState vertex(std::size_t n, std::size_t i);

  PopulationState(std::initializer_list<double> v);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const { return w_; }
  const std::vector<double>& vec() const { return w_; }

  bool interior(double floor = 0.0) const;

  friend bool operator==(const PopulationState&, const PopulationState&) = default;

 private:
  explicit PopulationState(std::vector<double> w) : w_(std::move(w)) {}
  friend PopulationState validate_state(std::span<const double>, double);
  friend PopulationState project_to_simplex(std::span<const double>, double);

  std::vector<double> w_;
};

/// Checks v against the simplex. Entries in [-tol, 0) are clamped to zero
/// and the vector renormalized; a vector with no negative entries is kept
/// bit-for-bit.
PopulationState validate_state(std::span<const double> v, double tol = kSimplexTol);

/// Always clamps negatives and renormalizes; throws if the drift (most
/// negative entry or |sum - 1|) exceeds `drift_tol`.
PopulationState project_to_simplex(std::span<const double> v, double drift_tol = kDriftTol);

/// v - mean(v) * 1.
std::vector<double> tangent_projection(std::span<const double> v);

/// A partition of strategy indices; aggregation sums each group.
using StrategyGroups = std::vector<std::vector<std::size_t>>;

/// Partition of {0..n-1} where strategies i and j share a group and every
/// other strategy is a singleton. Groups are ordered by their smallest index.
StrategyGroups merge_pair(std::size_t n, std::size_t i, std::size_t j);

std::vector<double> aggregate(std::span<const double> x, const StrategyGroups& groups);

/// Euclidean distance between x (optionally aggregated by `groups`) and p.
double distance_to_center(const PopulationState& x, const PopulationState& p,
                          const std::optional<StrategyGroups>& groups = std::nullopt);

std::string to_string(std::span<const double> v);

}  // namespace evodyn
