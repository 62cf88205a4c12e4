#include "evodyn/games.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "evodyn/numeric.hpp"

namespace evodyn {

Matrix::Matrix(std::vector<std::vector<double>> rows) : n(rows.size()) {
  data.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw GameError("payoff matrix must be square: row " + std::to_string(i) + " has " +
                      std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n));
    }
    for (double v : rows[i]) {
      if (!std::isfinite(v)) throw GameError("payoff matrix entries must be finite");
      data.push_back(v);
    }
  }
}

std::vector<double> Matrix::row(std::size_t i) const {
  return {data.begin() + static_cast<std::ptrdiff_t>(i * n), data.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)};
}

std::string to_string(PayoffKind kind) {
  switch (kind) {
    case PayoffKind::matrix: return "matrix";
    case PayoffKind::constant: return "constant";
    case PayoffKind::hypnodisk: return "hypnodisk";
    case PayoffKind::derived: return "derived";
  }
  return "unknown";
}

PayoffFunction::PayoffFunction(std::size_t arity, PayoffKind kind, Eval eval, std::string label,
                               std::optional<Affine> affine)
    : arity_(arity),
      kind_(kind),
      eval_(std::make_shared<const Eval>(std::move(eval))),
      label_(std::move(label)),
      affine_(affine ? std::make_shared<const Affine>(std::move(*affine)) : nullptr) {
  if (arity_ < 1) throw GameError("payoff function needs at least one strategy");
}

PayoffFunction PayoffFunction::with_twin_pair(std::size_t i, std::size_t j) const {
  if (i >= arity_ || j >= arity_ || i == j) throw GameError("invalid twin pair");
  PayoffFunction out = *this;
  out.twin_ = std::make_pair(std::min(i, j), std::max(i, j));
  return out;
}

std::vector<double> PayoffFunction::operator()(const PopulationState& x) const {
  if (x.size() != arity_) {
    throw GameError("game " + label_ + " has " + std::to_string(arity_) + " strategies, state has " +
                    std::to_string(x.size()));
  }
  std::vector<double> out(arity_);
  eval(x.weights(), out);
  return out;
}

double average_payoff(std::span<const double> x, std::span<const double> payoffs) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * payoffs[i];
  return s;
}

namespace {

PayoffFunction affine_payoff(PayoffFunction::Affine aff, PayoffKind kind, std::string label) {
  const std::size_t n = aff.a.n;
  auto shared = std::make_shared<const PayoffFunction::Affine>(aff);
  auto eval = [shared](std::span<const double> x, std::span<double> out) {
    const auto& a = shared->a;
    for (std::size_t i = 0; i < a.n; ++i) {
      double s = shared->b[i];
      for (std::size_t j = 0; j < a.n; ++j) s += a(i, j) * x[j];
      out[i] = s;
    }
  };
  return PayoffFunction(n, kind, std::move(eval), std::move(label), std::move(aff));
}

}  // namespace

MatrixGame::MatrixGame(Matrix a, std::string label) : a_(std::move(a)), label_(std::move(label)) {
  if (a_.n < 1) throw GameError("matrix game needs at least one strategy");
}

PayoffFunction MatrixGame::payoff() const {
  return affine_payoff({a_, std::vector<double>(a_.n, 0.0)}, PayoffKind::matrix, label_);
}

MatrixGame MatrixGame::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("matrix")) throw GameError("matrix game JSON needs a \"matrix\" key");
  const auto& m = j.at("matrix");
  if (!m.is_array() || m.empty()) throw GameError("\"matrix\" must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : m) {
    if (!r.is_array()) throw GameError("\"matrix\" rows must be arrays");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw GameError("\"matrix\" entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return MatrixGame(Matrix(std::move(rows)), j.value("label", std::string("matrix")));
}

nlohmann::json MatrixGame::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < a_.n; ++i) rows.push_back(a_.row(i));
  return {{"matrix", rows}, {"label", label_}};
}

MatrixGame rps_feeble_twin(double d) {
  if (!(d >= 0.0)) throw GameError("domination margin d must be >= 0");
  return MatrixGame(Matrix({{0, -2, 1, 1},
                            {1, 0, -2, -2},
                            {-2, 1, 0, 0},
                            {-2 - d, 1 - d, -d, -d}}),
                    "rps_feeble_twin(" + format_double(d) + ")");
}

PayoffFunction constant_two_strategy(double u1, double u2) {
  PayoffFunction::Affine aff{Matrix({{0, 0}, {0, 0}}), {u1, u2}};
  auto f = affine_payoff(std::move(aff), PayoffKind::constant,
                         "constant(" + format_double(u1) + "," + format_double(u2) + ")");
  return u1 == u2 ? f.with_twin_pair(0, 1) : f;
}

void HypnodiskParams::validate() const {
  if (center.size() != 3) throw GameError("hypnodisk center must be a 3-strategy state");
  if (!(inner_radius > 0.0 && inner_radius < outer_radius)) {
    throw GameError("hypnodisk radii must satisfy 0 < r < R");
  }
  // Distance from p to the face x_i = 0, measured inside the simplex plane.
  double room = std::numeric_limits<double>::infinity();
  for (double pi : center.weights()) room = std::min(room, pi * std::sqrt(1.5));
  if (!(room > 0.0)) throw GameError("hypnodisk center must be interior");
  if (!(outer_radius < room)) {
    throw GameError("hypnodisk outer radius " + format_double(outer_radius) +
                    " does not fit inside the simplex around the center (limit " + format_double(room) + ")");
  }
}

std::vector<double> hypnodisk_payoff(const HypnodiskParams& params, std::span<const double> x) {
  if (x.size() != 3) throw GameError("hypnodisk payoff needs a 3-strategy state");
  static const double s2 = std::sqrt(2.0), s6 = std::sqrt(6.0);
  const std::array<double, 3> e1{1 / s2, -1 / s2, 0};
  const std::array<double, 3> e2{1 / s6, 1 / s6, -2 / s6};

  std::array<double, 3> v{};
  for (int i = 0; i < 3; ++i) v[i] = x[i] - params.center[i];
  const auto proj = tangent_projection(v);
  double a = 0, b = 0, d2 = 0;
  for (int i = 0; i < 3; ++i) {
    a += proj[i] * e1[i];
    b += proj[i] * e2[i];
    d2 += v[i] * v[i];
  }
  const double d = std::sqrt(d2);
  const double r = params.inner_radius, big_r = params.outer_radius;
  double theta = 0.0;
  if (d > big_r) {
    theta = std::numbers::pi;
  } else if (d >= r) {
    theta = std::numbers::pi * (d - r) / (big_r - r);
  }
  std::vector<double> h(3);
  if (theta == 0.0) {
    for (int i = 0; i < 3; ++i) h[i] = v[i];
  } else if (theta == std::numbers::pi) {
    for (int i = 0; i < 3; ++i) h[i] = -v[i];
  } else {
    const double c = std::cos(theta), s = std::sin(theta);
    const double a2 = a * c - b * s, b2 = a * s + b * c;
    for (int i = 0; i < 3; ++i) h[i] = a2 * e1[i] + b2 * e2[i];
  }
  return h;
}

PayoffFunction hypnodisk_game(const HypnodiskParams& params) {
  params.validate();
  auto eval = [params](std::span<const double> x, std::span<double> out) {
    const auto h = hypnodisk_payoff(params, x);
    std::copy(h.begin(), h.end(), out.begin());
  };
  return PayoffFunction(3, PayoffKind::hypnodisk, std::move(eval),
                        "hypnodisk(r=" + format_double(params.inner_radius) +
                            ",R=" + format_double(params.outer_radius) + ")");
}

PayoffFunction add_twin(const PayoffFunction& base) {
  if (base.arity() != 3) {
    throw GameError("add_twin needs a 3-strategy game, got " + std::to_string(base.arity()));
  }
  auto eval = [base](std::span<const double> x, std::span<double> out) {
    const std::array<double, 3> merged{x[0], x[1], x[2] + x[3]};
    base.eval(merged, out.first(3));
    out[3] = out[2];
  };
  std::optional<PayoffFunction::Affine> aff;
  if (const auto* src = base.affine()) {
    PayoffFunction::Affine t{Matrix(std::vector<std::vector<double>>(4, std::vector<double>(4, 0.0))),
                             std::vector<double>(4, 0.0)};
    for (std::size_t i = 0; i < 4; ++i) {
      const std::size_t si = std::min<std::size_t>(i, 2);
      for (std::size_t j = 0; j < 4; ++j) t.a(i, j) = src->a(si, std::min<std::size_t>(j, 2));
      t.b[i] = src->b[si];
    }
    aff = std::move(t);
  }
  return PayoffFunction(4, PayoffKind::derived, std::move(eval), base.label() + "+twin", std::move(aff))
      .with_twin_pair(2, 3);
}

PayoffFunction penalize(const PayoffFunction& f, std::size_t strategy, double eps) {
  if (strategy >= f.arity()) throw GameError("penalize: strategy index out of range");
  if (!(eps >= 0.0)) throw GameError("penalize: eps must be >= 0");
  if (eps == 0.0) return f;
  auto eval = [f, strategy, eps](std::span<const double> x, std::span<double> out) {
    f.eval(x, out);
    out[strategy] -= eps;
  };
  std::optional<PayoffFunction::Affine> aff;
  if (const auto* src = f.affine()) {
    aff = *src;
    aff->b[strategy] -= eps;
  }
  // Penalizing one member of a twin pair breaks the exact twin relation.
  return PayoffFunction(f.arity(), PayoffKind::derived, std::move(eval),
                        f.label() + "-" + format_double(eps) + "@" + std::to_string(strategy + 1), std::move(aff));
}

std::vector<PopulationState> barycentric_grid(std::size_t n, std::size_t steps) {
  std::vector<PopulationState> out;
  std::vector<std::size_t> counts(n, 0);
  // Enumerate compositions of `steps` into n parts in lexicographic order.
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
    if (pos + 1 == n) {
      counts[pos] = left;
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(counts[i]) / static_cast<double>(steps);
      out.push_back(project_to_simplex(x));
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[pos] = c;
      rec(pos + 1, left - c);
    }
  };
  rec(0, steps);
  return out;
}

PopulationState uniform_state(std::size_t n, Rng& rng) {
  std::vector<double> e(n);
  double s = 0.0;
  for (double& ei : e) {
    ei = -std::log1p(-rng.uniform());
    s += ei;
  }
  for (double& ei : e) ei /= s;
  return project_to_simplex(e);
}

PopulationState interior_state(std::size_t n, Rng& rng, double floor) {
  if (floor * static_cast<double>(n) >= 1.0) throw SimplexError("interior_state floor too large");
  for (;;) {
    auto x = uniform_state(n, rng);
    if (x.interior(floor)) return x;
  }
}

DominationVerdict is_strictly_dominated(const PayoffFunction& f, std::size_t i, std::size_t j,
                                        const DominationCheck& check) {
  const std::size_t n = f.arity();
  if (i >= n || j >= n || i == j) throw GameError("is_strictly_dominated needs two distinct valid indices");
  DominationVerdict verdict;
  std::vector<double> payoff(n);
  auto test = [&](const PopulationState& x) {
    ++verdict.points_checked;
    f.eval(x.weights(), payoff);
    if (!(payoff[i] < payoff[j])) {
      verdict.witness = x;
      return false;
    }
    return true;
  };
  if (f.affine()) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!test(PopulationState::vertex(n, k))) return verdict;
    }
    verdict.dominated = true;
    return verdict;
  }
  for (const auto& x : barycentric_grid(n, check.grid_steps)) {
    if (!test(x)) return verdict;
  }
  Rng rng(check.seed);
  for (std::size_t s = 0; s < check.random_samples; ++s) {
    if (!test(uniform_state(n, rng))) return verdict;
  }
  verdict.dominated = true;
  return verdict;
}

}  // namespace evodyn
