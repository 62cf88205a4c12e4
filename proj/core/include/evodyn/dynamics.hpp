#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evodyn/games.hpp"
#include "evodyn/protocols.hpp"
#include "evodyn/simplex.hpp"

namespace evodyn {

class DynamicsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A vector field V^F on the simplex, evaluated as dx = V^F(x).
class VectorField {
 public:
  using Eval = std::function<void(const PayoffFunction& f, std::span<const double> x, std::span<double> dx)>;

  VectorField(std::string name, Eval eval, std::optional<RevisionProtocol> protocol = std::nullopt);

  const std::string& name() const { return name_; }
  /// The revision protocol behind a mother field (baseline resolved).
  const RevisionProtocol* protocol() const { return protocol_ ? &*protocol_ : nullptr; }

  void eval(const PayoffFunction& f, std::span<const double> x, std::span<double> dx) const { (*eval_)(f, x, dx); }
  std::vector<double> operator()(const PayoffFunction& f, const PopulationState& x) const;

 private:
  std::string name_;
  std::shared_ptr<const Eval> eval_;
  std::optional<RevisionProtocol> protocol_;
};

/// dx_i = sum_j x_j rho_ji - x_i sum_j rho_ij with payoffs already evaluated.
/// Accumulates the net flow of each pair once so the output sums to zero.
void mother_velocity(const RevisionProtocol& proto, std::span<const double> x, std::span<const double> payoffs,
                     std::span<double> dx);

/// The baseline K of success/dissatisfaction rules is resolved against `f`.
VectorField mother_field(const RevisionProtocol& proto, const PayoffFunction& f);
VectorField replicator_field();
VectorField smith_field();
VectorField bnn_field();

/// h with dx_1 = x_1 (1 - x_1) h for a 2-strategy two-step protocol. On the
/// boundary the selection factor is its one-sided limit.
double two_strategy_h(const RevisionProtocol& proto, const PayoffFunction& f, const PopulationState& x);

/// Long-run share of the weaker strategy in a 2-strategy constant game
/// under retry_other(m) + success with K = 0: the root x2 in (0, 1/2] of
/// ratio = x2 (1 - x2^m) / (x1 (1 - x1^m)), or 0 when ratio <= 1/m.
double asymptotic_share(int m, double ratio);

}  // namespace evodyn
