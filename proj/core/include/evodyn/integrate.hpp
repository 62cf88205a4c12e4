#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "evodyn/dynamics.hpp"
#include "evodyn/games.hpp"
#include "evodyn/simplex.hpp"
#include "evodyn/trajectory.hpp"

namespace evodyn {

/// Classic fourth-order Runge-Kutta with a fixed step.
struct Rk4Fixed {
  double h = 0.01;
};

/// Dormand-Prince 5(4) with per-step error control.
struct Rk45Adaptive {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_min = 1e-12;
  double h_max = 0.1;
};

struct IntegratorConfig {
  std::variant<Rk4Fixed, Rk45Adaptive> method = Rk45Adaptive{};
  double horizon = 100.0;
  /// Spacing of stored samples; the final time is always stored.
  double sample_stride = 0.1;
  /// Clamp and renormalize the running state after every step.
  bool renormalize = true;

  /// Throws std::invalid_argument unless steps and tolerances are positive
  /// and the horizon is non-negative.
  void validate() const;
};

nlohmann::json to_json(const IntegratorConfig& cfg);

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t, std::vector<double> state)
      : std::runtime_error(what), t_(t), state_(std::move(state)) {}
  double time() const { return t_; }
  const std::vector<double>& state() const { return state_; }

 private:
  double t_;
  std::vector<double> state_;
};

/// dx = V(t, x).
using TimeField = std::function<void(double t, std::span<const double> x, std::span<double> dx)>;

Trajectory integrate(const TimeField& field, const PopulationState& x0, const IntegratorConfig& cfg);
Trajectory integrate(const VectorField& field, const PayoffFunction& f, const PopulationState& x0,
                     const IntegratorConfig& cfg);

/// Opponent action as the probability y of playing L (L: y = 1, R: y = 0).
enum class Action { L, R };
inline double action_weight(Action a) { return a == Action::L ? 1.0 : 0.0; }

struct ConstantControl {
  double y = 1.0;
};

/// Plays L until x[coordinate] >= x_max, then R until x[coordinate] <= x_min,
/// and so on.
struct ThresholdControl {
  double x_min = 0.3;
  double x_max = 0.7;
  std::size_t coordinate = 0;
  Action initial = Action::L;
};

/// y(t) = (1 + sign(s) |s|^exponent) / 2 with s = sin(pi t).
struct SmoothPeriodicControl {
  double exponent = 1.0 / 9.0;
};

using Controller = std::variant<ConstantControl, ThresholdControl, SmoothPeriodicControl>;

double smooth_opponent(double t, double exponent = 1.0 / 9.0);

/// dx = V(y, x) for opponent mixture y.
using ControlledField = std::function<void(double y, std::span<const double> x, std::span<double> dx)>;

inline constexpr std::size_t kMaxSwitches = 1000000;
inline constexpr double kSwitchTimeTol = 1e-9;

/// Integrates the forced system. Threshold switches are located by bisection
/// on the step length and stored as rows tagged "L->R" or "R->L".
Trajectory integrate_controlled(const ControlledField& field, const Controller& controller, const PopulationState& x0,
                                const IntegratorConfig& cfg);

}  // namespace evodyn
