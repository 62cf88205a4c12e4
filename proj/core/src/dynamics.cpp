#include "evodyn/dynamics.hpp"

#include <cmath>

#include "evodyn/numeric.hpp"

namespace evodyn {

VectorField::VectorField(std::string name, Eval eval, std::optional<RevisionProtocol> protocol)
    : name_(std::move(name)), eval_(std::make_shared<const Eval>(std::move(eval))), protocol_(std::move(protocol)) {}

std::vector<double> VectorField::operator()(const PayoffFunction& f, const PopulationState& x) const {
  if (f.arity() != x.size()) {
    throw DynamicsError("field " + name_ + ": game has " + std::to_string(f.arity()) + " strategies, state has " +
                        std::to_string(x.size()));
  }
  std::vector<double> dx(x.size());
  eval(f, x.weights(), dx);
  return dx;
}

void mother_velocity(const RevisionProtocol& proto, std::span<const double> x, std::span<const double> payoffs,
                     std::span<double> dx) {
  const std::size_t n = x.size();
  thread_local std::vector<double> rho;
  rho.resize(n * n);
  switch_rates_into(proto, x, payoffs, rho);
  std::fill(dx.begin(), dx.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double net = x[j] * rho[j * n + i] - x[i] * rho[i * n + j];
      dx[i] += net;
      dx[j] -= net;
    }
  }
}

VectorField mother_field(const RevisionProtocol& proto, const PayoffFunction& f) {
  RevisionProtocol resolved = resolve_baseline(proto, f);
  auto eval = [resolved](const PayoffFunction& g, std::span<const double> x, std::span<double> dx) {
    thread_local std::vector<double> payoffs;
    payoffs.resize(x.size());
    g.eval(x, payoffs);
    mother_velocity(resolved, x, payoffs, dx);
  };
  return VectorField("mother[" + resolved.describe() + "]", eval, resolved);
}

VectorField replicator_field() {
  return VectorField("replicator", [](const PayoffFunction& g, std::span<const double> x, std::span<double> dx) {
    g.eval(x, dx);
    const double avg = average_payoff(x, dx);
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] * (dx[i] - avg);
  });
}

VectorField smith_field() {
  return VectorField("smith", [](const PayoffFunction& g, std::span<const double> x, std::span<double> dx) {
    const std::size_t n = x.size();
    thread_local std::vector<double> payoffs;
    payoffs.resize(n);
    g.eval(x, payoffs);
    std::fill(dx.begin(), dx.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double net = x[j] * positive_part(payoffs[i] - payoffs[j]) - x[i] * positive_part(payoffs[j] - payoffs[i]);
        dx[i] += net;
        dx[j] -= net;
      }
    }
  });
}

VectorField bnn_field() {
  return VectorField("bnn", [](const PayoffFunction& g, std::span<const double> x, std::span<double> dx) {
    const std::size_t n = x.size();
    thread_local std::vector<double> payoffs;
    payoffs.resize(n);
    g.eval(x, payoffs);
    const double avg = average_payoff(x, payoffs);
    double excess = 0.0;
    for (std::size_t k = 0; k < n; ++k) excess += positive_part(payoffs[k] - avg);
    for (std::size_t i = 0; i < n; ++i) dx[i] = positive_part(payoffs[i] - avg) - x[i] * excess;
  });
}

namespace {

// p_ij / x_j, taking the one-sided limit where x_j vanishes.
double selection_factor(const SelectionRule& rule, std::size_t i, std::size_t j, const PopulationState& x) {
  const auto lam = lambda_factors(rule, i, x);
  if (lam[j]) return *lam[j];
  constexpr double kNudge = 1e-9;
  std::vector<double> y(x.vec());
  y[j] = kNudge;
  y[i] = 1.0 - kNudge;
  const auto p = selection_prob(rule, i, validate_state(y));
  return p[j] / kNudge;
}

}  // namespace

double two_strategy_h(const RevisionProtocol& proto, const PayoffFunction& f, const PopulationState& x) {
  if (x.size() != 2 || f.arity() != 2) throw DynamicsError("two_strategy_h needs a 2-strategy game");
  if (!proto.selection.imitative()) throw DynamicsError("two_strategy_h needs an imitative selection rule");
  const auto resolved = resolve_baseline(proto, f);
  const auto payoffs = f(x);
  const double r12 = adoption_rate(resolved.adoption, 0, 1, payoffs, x.weights());
  const double r21 = adoption_rate(resolved.adoption, 1, 0, payoffs, x.weights());
  const double l12 = selection_factor(resolved.selection, 0, 1, x);
  const double l21 = selection_factor(resolved.selection, 1, 0, x);
  return l21 * r21 - l12 * r12;
}

namespace {

// 1 - (1 - s)^m without cancellation for small s.
double one_minus_pow_complement(double s, int m) { return -std::expm1(m * std::log1p(-s)); }

double share_ratio(double x2, int m) {
  const double num = x2 * (1.0 - std::pow(x2, m));
  const double den = (1.0 - x2) * one_minus_pow_complement(x2, m);
  return num / den;
}

}  // namespace

double asymptotic_share(int m, double ratio) {
  if (m < 1) throw DynamicsError("asymptotic_share: m must be >= 1");
  if (!(ratio > 0.0) || ratio > 1.0) throw DynamicsError("asymptotic_share: ratio must lie in (0, 1]");
  if (ratio == 1.0) return 0.5;
  if (ratio <= 1.0 / m) return 0.0;

  constexpr double lo0 = 1e-15, hi0 = 0.5;
  // The bracket map must be increasing for the root to be unique.
  constexpr int kProbe = 1000;
  double prev = share_ratio(lo0, m);
  for (int k = 1; k <= kProbe; ++k) {
    const double v = share_ratio(lo0 + (hi0 - lo0) * k / kProbe, m);
    if (v < prev - 1e-15) throw DynamicsError("asymptotic_share: ratio map not monotone for m=" + std::to_string(m));
    prev = v;
  }

  double lo = lo0, hi = hi0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (share_ratio(mid, m) < ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace evodyn
