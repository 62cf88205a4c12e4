#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "evodyn/numeric.hpp"
#include "evodyn/simplex.hpp"

namespace evodyn {

class GameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major square matrix.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> data;

  Matrix() = default;
  explicit Matrix(std::vector<std::vector<double>> rows);
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  std::vector<double> row(std::size_t i) const;
};

enum class PayoffKind { matrix, constant, hypnodisk, derived };
std::string to_string(PayoffKind kind);

/// A game's payoff function F: X -> R^N. Cheap to copy; evaluation is pure.
///
/// When F is affine (F(x) = A x + b) the coefficients are kept alongside the
/// callable so linear-only shortcuts (vertex domination checks) apply. A
/// declared twin pair records strategies built to have identical payoffs.
class PayoffFunction {
 public:
  using Eval = std::function<void(std::span<const double> x, std::span<double> out)>;

  struct Affine {
    Matrix a;
    std::vector<double> b;
  };

  PayoffFunction(std::size_t arity, PayoffKind kind, Eval eval, std::string label,
                 std::optional<Affine> affine = std::nullopt);

  std::size_t arity() const { return arity_; }
  PayoffKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  /// Null unless F is affine in x.
  const Affine* affine() const { return affine_.get(); }

  std::optional<std::pair<std::size_t, std::size_t>> twin_pair() const { return twin_; }
  PayoffFunction with_twin_pair(std::size_t i, std::size_t j) const;

  std::vector<double> operator()(const PopulationState& x) const;
  /// Unchecked evaluation on a raw vector of the right length.
  void eval(std::span<const double> x, std::span<double> out) const { (*eval_)(x, out); }

 private:
  std::size_t arity_;
  PayoffKind kind_;
  std::shared_ptr<const Eval> eval_;
  std::string label_;
  std::shared_ptr<const Affine> affine_;
  std::optional<std::pair<std::size_t, std::size_t>> twin_;
};

double average_payoff(std::span<const double> x, std::span<const double> payoffs);

class MatrixGame {
 public:
  explicit MatrixGame(Matrix a, std::string label = "matrix");

  const Matrix& matrix() const { return a_; }
  std::size_t arity() const { return a_.n; }
  /// F_i(x) = (A x)_i
  PayoffFunction payoff() const;

  static MatrixGame from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  Matrix a_;
  std::string label_;
};

/// Rock-Paper-Scissors with a fourth strategy that copies Scissors minus d.
MatrixGame rps_feeble_twin(double d);

/// F(x) = (u1, u2) everywhere.
PayoffFunction constant_two_strategy(double u1, double u2);

struct HypnodiskParams {
  PopulationState center = PopulationState::barycenter(3);
  double inner_radius = 0.05;
  double outer_radius = 0.1;

  /// Throws unless 0 < r < R, the center is interior, and the outer disk
  /// fits inside the simplex (R < 1/sqrt(6) for the barycenter).
  void validate() const;
};

/// Payoff of the hypnodisk game at a 3-strategy state. Inside the inner
/// disk the payoff is x - p, outside the outer disk p - x; in the annulus
/// the vector x - p is rotated in the tangent plane by
/// pi * (d - r) / (R - r), keeping its length.
std::vector<double> hypnodisk_payoff(const HypnodiskParams& params, std::span<const double> x);
PayoffFunction hypnodisk_game(const HypnodiskParams& params);

/// 4-strategy game F_i(x) = F3_i(x1, x2, x3 + x4), F_4 = F_3.
PayoffFunction add_twin(const PayoffFunction& base);

/// Subtracts eps from the payoff of `strategy`.
PayoffFunction penalize(const PayoffFunction& f, std::size_t strategy, double eps);

struct DominationVerdict {
  bool dominated = false;
  std::optional<PopulationState> witness;
  std::size_t points_checked = 0;
};

struct DominationCheck {
  std::size_t grid_steps = 20;  // 21 points per barycentric coordinate
  std::size_t random_samples = 1000;
  std::uint64_t seed = 12345;
};

/// Whether F_i(x) < F_j(x) on every tested state (vertices only for
/// affine games, grid plus random samples otherwise).
DominationVerdict is_strictly_dominated(const PayoffFunction& f, std::size_t i, std::size_t j,
                                        const DominationCheck& check = {});

/// All points of the simplex with coordinates k / steps.
std::vector<PopulationState> barycentric_grid(std::size_t n, std::size_t steps);
/// Uniform (flat Dirichlet) sample of the simplex.
PopulationState uniform_state(std::size_t n, Rng& rng);
/// Uniform sample conditioned on every coordinate exceeding `floor`.
PopulationState interior_state(std::size_t n, Rng& rng, double floor = 1e-3);

}  // namespace evodyn
