#include "evodyn/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <nlohmann/json.hpp>

#include "evodyn/numeric.hpp"

namespace evodyn {

void IntegratorConfig::validate() const {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be finite and >= 0");
  if (!(sample_stride > 0.0)) throw std::invalid_argument("sample_stride must be > 0");
  if (const auto* rk4 = std::get_if<Rk4Fixed>(&method)) {
    if (!(rk4->h > 0.0)) throw std::invalid_argument("rk4 step h must be > 0");
  } else {
    const auto& a = std::get<Rk45Adaptive>(method);
    if (!(a.rtol > 0.0) || !(a.atol > 0.0)) throw std::invalid_argument("rtol and atol must be > 0");
    if (!(a.h_min > 0.0) || !(a.h_max >= a.h_min)) throw std::invalid_argument("need 0 < h_min <= h_max");
  }
}

nlohmann::json to_json(const IntegratorConfig& cfg) {
  nlohmann::json j;
  if (const auto* rk4 = std::get_if<Rk4Fixed>(&cfg.method)) {
    j["method"] = {{"kind", "rk4"}, {"h", rk4->h}};
  } else {
    const auto& a = std::get<Rk45Adaptive>(cfg.method);
    j["method"] = {{"kind", "rk45"}, {"rtol", a.rtol}, {"atol", a.atol}, {"h_min", a.h_min}, {"h_max", a.h_max}};
  }
  j["horizon"] = cfg.horizon;
  j["sample_stride"] = cfg.sample_stride;
  j["renormalize"] = cfg.renormalize;
  return j;
}

double smooth_opponent(double t, double exponent) {
  // Reduced to [0, 2) so that zeros of sin are exact.
  double r = std::fmod(t, 2.0);
  if (r < 0.0) r += 2.0;
  const double s = r < 1.0 ? std::sin(std::numbers::pi * r) : -std::sin(std::numbers::pi * (r - 1.0));
  return 0.5 * (1.0 + std::copysign(std::pow(std::abs(s), exponent), s));
}

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

class Stepper {
 public:
  Stepper(const TimeField& field, std::size_t n, const IntegratorConfig& cfg)
      : field_(field), cfg_(cfg), n_(n), k_(7, std::vector<double>(n)), tmp_(n) {}

  /// One step of length h from (t, x) into out; returns the scaled error
  /// estimate (0 for the fixed-step method).
  double attempt(double t, std::span<const double> x, double h, std::span<double> out) {
    if (std::holds_alternative<Rk4Fixed>(cfg_.method)) return rk4(t, x, h, out);
    return dopri(t, x, h, out);
  }

 private:
  void stage(double t, std::span<const double> x, double h, std::initializer_list<std::pair<int, double>> terms,
             std::vector<double>& k) {
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (const auto& [s, a] : terms) acc += a * k_[static_cast<std::size_t>(s)][i];
      tmp_[i] = x[i] + h * acc;
    }
    field_(t, tmp_, k);
  }

  double rk4(double t, std::span<const double> x, double h, std::span<double> out) {
    auto& k1 = k_[0];
    field_(t, x, k1);
    stage(t + h / 2, x, h, {{0, 0.5}}, k_[1]);
    stage(t + h / 2, x, h, {{1, 0.5}}, k_[2]);
    stage(t + h, x, h, {{2, 1.0}}, k_[3]);
    for (std::size_t i = 0; i < n_; ++i) {
      out[i] = x[i] + h / 6.0 * (k_[0][i] + 2.0 * k_[1][i] + 2.0 * k_[2][i] + k_[3][i]);
    }
    return 0.0;
  }

  double dopri(double t, std::span<const double> x, double h, std::span<double> out) {
    const auto& a = std::get<Rk45Adaptive>(cfg_.method);
    field_(t, x, k_[0]);
    stage(t + c2 * h, x, h, {{0, a21}}, k_[1]);
    stage(t + c3 * h, x, h, {{0, a31}, {1, a32}}, k_[2]);
    stage(t + c4 * h, x, h, {{0, a41}, {1, a42}, {2, a43}}, k_[3]);
    stage(t + c5 * h, x, h, {{0, a51}, {1, a52}, {2, a53}, {3, a54}}, k_[4]);
    stage(t + h, x, h, {{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}}, k_[5]);
    for (std::size_t i = 0; i < n_; ++i) {
      out[i] = x[i] + h * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] + b5 * k_[4][i] + b6 * k_[5][i]);
    }
    field_(t + h, out, k_[6]);
    double err = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double e = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] + e6 * k_[5][i] +
                            e7 * k_[6][i]);
      const double scale = a.atol + a.rtol * std::max(std::abs(x[i]), std::abs(out[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    return std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  }

  const TimeField& field_;
  const IntegratorConfig& cfg_;
  std::size_t n_;
  std::vector<std::vector<double>> k_;
  std::vector<double> tmp_;
};

struct SwitchRule {
  const ThresholdControl* threshold = nullptr;
  Action* current = nullptr;

  bool triggered(std::span<const double> x) const {
    const double v = x[threshold->coordinate];
    return *current == Action::L ? v >= threshold->x_max : v <= threshold->x_min;
  }
  std::string label() const { return *current == Action::L ? "L->R" : "R->L"; }
  void flip() const { *current = *current == Action::L ? Action::R : Action::L; }
};

class Driver {
 public:
  Driver(const TimeField& field, const PopulationState& x0, const IntegratorConfig& cfg,
         std::optional<SwitchRule> rule = std::nullopt)
      : cfg_(cfg), stepper_(field, x0.size(), cfg), x_(x0.vec()), xn_(x0.size()), rule_(rule) {
    cfg.validate();
    if (const auto* a = std::get_if<Rk45Adaptive>(&cfg.method)) {
      h_ = std::min(a->h_max, 1e-2);
    } else {
      h_ = std::get<Rk4Fixed>(cfg.method).h;
    }
  }

  Trajectory run() {
    traj_.append(0.0, PopulationState::validate(x_, kDriftTol));
    if (rule_ && rule_->triggered(x_)) record_switch();
    const double horizon = cfg_.horizon;
    for (std::size_t k = 1; t_ < horizon; ++k) {
      double target = std::min(static_cast<double>(k) * cfg_.sample_stride, horizon);
      if (horizon - target <= 1e-12 * std::max(1.0, horizon)) target = horizon;
      advance(target);
      emit(target, {});
    }
    return std::move(traj_);
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::span<const double> x) const {
    throw IntegrationError(what + " at t=" + format_double(t_) + ", x=" + to_string(x), t_,
                           std::vector<double>(x.begin(), x.end()));
  }

  void emit(double t, const std::string& event) {
    PopulationState s = [&] {
      try {
        return project_to_simplex(x_, kDriftTol);
      } catch (const SimplexError& e) {
        fail(std::string("simplex drift: ") + e.what(), x_);
      }
    }();
    if (!traj_.empty() && t <= traj_.times().back()) {
      if (!event.empty()) traj_.tag_last(event);
      return;
    }
    traj_.append(t, std::move(s), event);
  }

  void accept(std::span<const double> xn) {
    for (double v : xn) {
      if (!std::isfinite(v)) fail("non-finite state", xn);
    }
    if (cfg_.renormalize) {
      try {
        const auto s = project_to_simplex(xn, kDriftTol);
        std::copy(s.weights().begin(), s.weights().end(), x_.begin());
      } catch (const SimplexError& e) {
        fail(std::string("simplex drift: ") + e.what(), xn);
      }
    } else {
      std::copy(xn.begin(), xn.end(), x_.begin());
    }
  }

  void record_switch() {
    if (++switches_ > kMaxSwitches) fail("chattering: more than " + std::to_string(kMaxSwitches) + " switches", x_);
    const std::string label = rule_->label();
    rule_->flip();
    emit(t_, label);
  }

  // Narrows a triggered step [t_, t_ + h] to the first state past the threshold.
  void locate_switch(double h) {
    double lo = 0.0, hi = h;
    std::vector<double> x_hi(xn_), xm(xn_.size());
    while (hi - lo > kSwitchTimeTol) {
      const double mid = 0.5 * (lo + hi);
      stepper_.attempt(t_, x_, mid, xm);
      if (rule_->triggered(xm)) {
        hi = mid;
        x_hi = xm;
      } else {
        lo = mid;
      }
    }
    t_ += hi;
    accept(x_hi);
    record_switch();
  }

  void advance(double target) {
    const auto* adaptive = std::get_if<Rk45Adaptive>(&cfg_.method);
    while (t_ < target) {
      double h = std::min(h_, target - t_);
      const bool last = target - (t_ + h) <= 1e-12 * std::max(1.0, target);
      if (last) h = target - t_;
      const double err = stepper_.attempt(t_, x_, h, xn_);
      if (adaptive) {
        if (err > 1.0) {
          h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
          if (h_ < adaptive->h_min) fail("step size underflow (h=" + format_double(h_) + ")", x_);
          continue;
        }
        const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        const double proposal = std::min(adaptive->h_max, h * grow);
        h_ = last ? std::max(h_, proposal) : proposal;
        h_ = std::min(h_, adaptive->h_max);
      }
      if (rule_ && rule_->triggered(xn_)) {
        locate_switch(h);
        continue;
      }
      t_ = last ? target : t_ + h;
      accept(xn_);
    }
  }

  const IntegratorConfig& cfg_;
  Stepper stepper_;
  std::vector<double> x_;
  std::vector<double> xn_;
  std::optional<SwitchRule> rule_;
  double t_ = 0.0;
  double h_ = 0.0;
  std::size_t switches_ = 0;
  Trajectory traj_;
};

}  // namespace

Trajectory integrate(const TimeField& field, const PopulationState& x0, const IntegratorConfig& cfg) {
  Driver driver(field, x0, cfg);
  return driver.run();
}

Trajectory integrate(const VectorField& field, const PayoffFunction& f, const PopulationState& x0,
                     const IntegratorConfig& cfg) {
  if (f.arity() != x0.size()) {
    throw std::invalid_argument("integrate: game has " + std::to_string(f.arity()) + " strategies, state has " +
                                std::to_string(x0.size()));
  }
  TimeField tf = [&field, &f](double, std::span<const double> x, std::span<double> dx) { field.eval(f, x, dx); };
  return integrate(tf, x0, cfg);
}

Trajectory integrate_controlled(const ControlledField& field, const Controller& controller, const PopulationState& x0,
                                const IntegratorConfig& cfg) {
  if (const auto* c = std::get_if<ConstantControl>(&controller)) {
    if (!(c->y >= 0.0 && c->y <= 1.0)) throw std::invalid_argument("constant control y must lie in [0, 1]");
    const double y = c->y;
    return integrate([&field, y](double, std::span<const double> x, std::span<double> dx) { field(y, x, dx); }, x0,
                     cfg);
  }
  if (const auto* s = std::get_if<SmoothPeriodicControl>(&controller)) {
    if (!(s->exponent > 0.0)) throw std::invalid_argument("smooth control exponent must be > 0");
    const double e = s->exponent;
    return integrate(
        [&field, e](double t, std::span<const double> x, std::span<double> dx) { field(smooth_opponent(t, e), x, dx); },
        x0, cfg);
  }
  const auto& th = std::get<ThresholdControl>(controller);
  if (!(th.x_min < th.x_max)) throw std::invalid_argument("threshold control needs x_min < x_max");
  if (th.coordinate >= x0.size()) throw std::invalid_argument("threshold control coordinate out of range");
  Action current = th.initial;
  TimeField tf = [&field, &current](double, std::span<const double> x, std::span<double> dx) {
    field(action_weight(current), x, dx);
  };
  Driver driver(tf, x0, cfg, SwitchRule{&th, &current});
  return driver.run();
}

}  // namespace evodyn
