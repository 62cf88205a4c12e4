#include "evodyn/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "evodyn/numeric.hpp"

namespace evodyn {

PopulationState PopulationState::validate(std::span<const double> v, double tol) {
  return validate_state(v, tol);
}

PopulationState PopulationState::barycenter(std::size_t n) {
  if (n < 2) throw SimplexError("simplex needs at least 2 strategies");
  return PopulationState(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

PopulationState PopulationState::vertex(std::size_t n, std::size_t i) {
  if (n < 2 || i >= n) throw SimplexError("vertex index out of range");
  std::vector<double> w(n, 0.0);
  w[i] = 1.0;
  return PopulationState(std::move(w));
}

PopulationState::PopulationState(std::initializer_list<double> v)
    : PopulationState(validate_state(std::vector<double>(v))) {}

bool PopulationState::interior(double floor) const {
  return std::all_of(w_.begin(), w_.end(), [floor](double xi) { return xi > floor; });
}

PopulationState validate_state(std::span<const double> v, double tol) {
  if (v.size() < 2) throw SimplexError("state needs at least 2 entries, got " + std::to_string(v.size()));
  bool any_negative = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw SimplexError("state entry " + std::to_string(i) + " is not finite");
    if (v[i] < -tol) {
      throw SimplexError("state entry " + std::to_string(i) + " = " + format_double(v[i]) + " is negative");
    }
    any_negative = any_negative || v[i] < 0.0;
  }
  const double s = kahan_sum(v);
  if (std::abs(s - 1.0) > tol) {
    throw SimplexError("state entries sum to " + format_double(s) + ", not 1: " + to_string(v));
  }
  if (!any_negative) return PopulationState(std::vector<double>(v.begin(), v.end()));
  return project_to_simplex(v, tol);
}

PopulationState project_to_simplex(std::span<const double> v, double drift_tol) {
  if (v.size() < 2) throw SimplexError("state needs at least 2 entries");
  std::vector<double> w(v.begin(), v.end());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i])) throw SimplexError("state entry " + std::to_string(i) + " is not finite");
    if (w[i] < -drift_tol) {
      throw SimplexError("state entry " + std::to_string(i) + " drifted to " + format_double(w[i]));
    }
    w[i] = std::max(w[i], 0.0);
  }
  const double s = kahan_sum(w);
  if (std::abs(s - 1.0) > drift_tol) {
    throw SimplexError("state sum drifted to " + format_double(s));
  }
  for (double& wi : w) wi /= s;
  return PopulationState(std::move(w));
}

std::vector<double> tangent_projection(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  if (out.empty()) return out;
  const double mean = kahan_sum(v) / static_cast<double>(v.size());
  for (double& o : out) o -= mean;
  return out;
}

StrategyGroups merge_pair(std::size_t n, std::size_t i, std::size_t j) {
  if (i >= n || j >= n) throw SimplexError("merge_pair index out of range");
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  StrategyGroups groups;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == hi && hi != lo) continue;
    if (k == lo && hi != lo) {
      groups.push_back({lo, hi});
    } else {
      groups.push_back({k});
    }
  }
  return groups;
}

std::vector<double> aggregate(std::span<const double> x, const StrategyGroups& groups) {
  std::vector<double> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    double s = 0.0;
    for (std::size_t k : g) {
      if (k >= x.size()) throw SimplexError("aggregation group index out of range");
      s += x[k];
    }
    out.push_back(s);
  }
  return out;
}

double distance_to_center(const PopulationState& x, const PopulationState& p,
                          const std::optional<StrategyGroups>& groups) {
  const std::vector<double> xa = groups ? aggregate(x.weights(), *groups) : x.vec();
  if (xa.size() != p.size()) {
    throw SimplexError("distance_to_center: aggregated state has " + std::to_string(xa.size()) +
                       " entries but center has " + std::to_string(p.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    const double d = xa[i] - p[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::string to_string(std::span<const double> v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << format_double(v[i]);
  }
  os << ')';
  return os.str();
}

}  // namespace evodyn
