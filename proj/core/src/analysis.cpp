#include "evodyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "evodyn/numeric.hpp"

namespace evodyn {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::neutral: return "neutral";
  }
  return "unknown";
}

std::string to_string(AdvantageMode m) { return m == AdvantageMode::rarity ? "rarity" : "frequency"; }

std::string to_string(DiskRegion r) {
  switch (r) {
    case DiskRegion::inner: return "inner";
    case DiskRegion::annulus: return "annulus";
    case DiskRegion::outer: return "outer";
  }
  return "unknown";
}

nlohmann::json to_json(const ConditionReport& report) {
  nlohmann::json j{{"condition", report.condition},
                   {"verdict", to_string(report.verdict)},
                   {"samples", report.samples},
                   {"detail", report.detail}};
  j["witness"] = report.witness ? nlohmann::json(report.witness->vec()) : nlohmann::json(nullptr);
  j["witness_values"] = report.witness_values;
  if (!report.strict_readings.empty()) j["strict_readings"] = report.strict_readings;
  return j;
}

bool is_population_equilibrium(std::span<const double> x, std::span<const double> payoffs) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 1e-9) continue;
    lo = std::min(lo, payoffs[i]);
    hi = std::max(hi, payoffs[i]);
  }
  return hi - lo <= kEquilibriumTol;
}

namespace {

void check_arity(const PayoffFunction& f, const PopulationState& x) {
  if (f.arity() != x.size()) throw AnalysisError("state arity does not match the game");
}

ConditionReport failure(ConditionReport r, const PopulationState& x, std::vector<double> values, std::string detail) {
  r.verdict = Verdict::fails;
  r.witness = x;
  r.witness_values = std::move(values);
  r.detail = std::move(detail);
  return r;
}

}  // namespace

ConditionReport check_positive_correlation(const VectorField& field, const PayoffFunction& f,
                                           const std::vector<PopulationState>& states) {
  auto report = ConditionReport::named("positive_correlation");
  std::optional<PopulationState> unresolved;
  double unresolved_value = 0.0;
  for (const auto& x : states) {
    check_arity(f, x);
    const auto payoffs = f(x);
    const auto dx = field(f, x);
    KahanSum acc;
    for (std::size_t i = 0; i < x.size(); ++i) acc.add(dx[i] * payoffs[i]);
    const double v = acc.value();
    ++report.samples;
    if (is_population_equilibrium(x.weights(), payoffs)) {
      if (std::abs(v) > kEquilibriumTol) {
        return failure(report, x, {v}, "nonzero sum dx_i F_i at a population equilibrium");
      }
      continue;
    }
    if (v < -kStrictTol) return failure(report, x, {v}, "sum dx_i F_i < 0 away from equilibrium");
    if (v <= kStrictTol && !unresolved) {
      unresolved = x;
      unresolved_value = v;
    }
  }
  if (unresolved) {
    report.verdict = Verdict::inconclusive;
    report.witness = unresolved;
    report.witness_values = {unresolved_value};
    report.detail = "sum dx_i F_i indistinguishable from 0 away from equilibrium";
  } else {
    report.verdict = Verdict::holds;
  }
  return report;
}

ConditionReport check_monotone(const VectorField& field, const PayoffFunction& f,
                               const std::vector<PopulationState>& states) {
  auto report = ConditionReport::named("monotone");
  report.verdict = Verdict::holds;
  if (f.arity() < 2) {
    report.detail = "vacuous: fewer than two strategies";
    return report;
  }
  for (const auto& x : states) {
    check_arity(f, x);
    if (!x.interior()) continue;
    const auto payoffs = f(x);
    const auto dx = field(f, x);
    const std::size_t n = x.size();
    ++report.samples;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double df = payoffs[j] - payoffs[i];
        const double dg = dx[j] / x[j] - dx[i] / x[i];
        const bool ok = std::abs(df) <= kTieTol ? std::abs(dg) <= kTieTol : (df > 0 ? dg > 0 : dg < 0);
        if (!ok) {
          return failure(report, x, {static_cast<double>(i), static_cast<double>(j), df, dg},
                         "growth-rate order of strategies " + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                             " disagrees with payoff order");
        }
      }
    }
  }
  return report;
}

ConditionReport check_advantage(const VectorField& field, const PayoffFunction& f,
                                const std::vector<PopulationState>& states, AdvantageMode mode) {
  const auto twins = f.twin_pair();
  if (!twins) throw AnalysisError("check_advantage: game declares no twin pair");
  const auto [ti, tj] = *twins;
  const std::string base = mode == AdvantageMode::rarity ? "AR" : "AF";
  auto report = ConditionReport::named("advantage_" + to_string(mode));
  const RevisionProtocol* proto = field.protocol();

  bool strict1 = proto != nullptr, strict2 = proto != nullptr;
  bool all_equal = true;
  std::optional<PopulationState> strict_witness;
  std::vector<double> strict_values;
  std::vector<double> rho;

  for (const auto& x : states) {
    check_arity(f, x);
    const auto payoffs = f(x);
    if (std::abs(payoffs[ti] - payoffs[tj]) > 1e-12) {
      throw AnalysisError("check_advantage: strategies " + std::to_string(ti + 1) + " and " + std::to_string(tj + 1) +
                          " are not exact twins at " + to_string(x.weights()));
    }
    if (!x.interior() || std::abs(x[ti] - x[tj]) <= 1e-12) continue;
    ++report.samples;
    const std::size_t rare = x[ti] < x[tj] ? ti : tj;
    const std::size_t freq = rare == ti ? tj : ti;
    const auto dx = field(f, x);
    const double g_rare = dx[rare] / x[rare], g_freq = dx[freq] / x[freq];
    const double d = mode == AdvantageMode::rarity ? g_rare - g_freq : g_freq - g_rare;

    const std::size_t n = x.size();
    bool imitates = false, imitated = false;
    double max_rho = 0.0;
    if (proto) {
      rho.resize(n * n);
      switch_rates_into(*proto, x.weights(), payoffs, rho);
      for (std::size_t k = 0; k < n; ++k) {
        for (const std::size_t t : {rare, freq}) {
          if (k == t) continue;
          imitates = imitates || rho[t * n + k] > 0.0;
          imitated = imitated || rho[k * n + t] > 0.0;
        }
      }
      max_rho = *std::max_element(rho.begin(), rho.end());
    } else {
      for (double v : dx) max_rho = std::max(max_rho, std::abs(v));
    }
    const double thr = kStrictTol * max_rho;
    if (d < -thr) {
      return failure(report, x, {g_rare, g_freq, d},
                     "twin with the " + std::string(mode == AdvantageMode::rarity ? "lower" : "higher") +
                         " share grows slower");
    }
    if (std::abs(d) > thr) all_equal = false;
    const bool strict = d > thr;
    if (imitates && !strict && strict1) {
      strict1 = false;
      if (!strict_witness) strict_witness = x, strict_values = {g_rare, g_freq, d};
    }
    if (imitated && !strict && strict2) {
      strict2 = false;
      if (!strict_witness) strict_witness = x, strict_values = {g_rare, g_freq, d};
    }
  }

  if (strict1) report.strict_readings.push_back(base + "1");
  if (strict2) report.strict_readings.push_back(base + "2");
  if (all_equal) {
    report.verdict = Verdict::neutral;
    report.detail = "twins grow at equal per-capita rates";
    report.strict_readings.clear();
  } else if (!report.strict_readings.empty()) {
    report.verdict = Verdict::holds;
  } else {
    report.verdict = Verdict::inconclusive;
    report.witness = strict_witness;
    report.witness_values = strict_values;
    report.detail = "weak inequality holds but no strictness reading holds everywhere";
  }
  return report;
}

ConditionReport check_imitation_condition(const RateFunction& rates, const PayoffFunction& f,
                                          const std::vector<PopulationState>& states) {
  auto report = ConditionReport::named("imitation");
  for (const auto& x : states) {
    check_arity(f, x);
    if (!x.interior()) continue;
    const auto payoffs = f(x);
    if (is_population_equilibrium(x.weights(), payoffs)) continue;
    ++report.samples;
    const auto rho = rates(x);
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
      bool linked = false;
      for (std::size_t j = 0; j < n && !linked; ++j) {
        if (j != i) linked = rho[i * n + j] > 0.0 || rho[j * n + i] > 0.0;
      }
      if (!linked) {
        return failure(report, x, {static_cast<double>(i)},
                       "strategy " + std::to_string(i + 1) + " neither imitates nor is imitated");
      }
    }
  }
  report.verdict = Verdict::holds;
  return report;
}

ConditionReport check_imitation_condition(const RevisionProtocol& proto, const PayoffFunction& f,
                                          const std::vector<PopulationState>& states) {
  const auto resolved = resolve_baseline(proto, f);
  return check_imitation_condition([&](const PopulationState& x) { return switch_rates(resolved, f, x); }, f,
                                   states);
}

double lyapunov_distance(const PopulationState& x, const HypnodiskParams& params) {
  if (x.size() == 3) return distance_to_center(x, params.center);
  if (x.size() == 4) return distance_to_center(x, params.center, merge_pair(4, 2, 3));
  throw AnalysisError("lyapunov_distance needs 3 or 4 strategies");
}

DiskRegion classify_region(double w, const HypnodiskParams& params) {
  if (w < params.inner_radius) return DiskRegion::inner;
  if (w > params.outer_radius) return DiskRegion::outer;
  return DiskRegion::annulus;
}

TwinRatioSeries twin_ratio_series(const Trajectory& traj, std::size_t i, std::size_t j) {
  if (traj.empty()) throw AnalysisError("twin_ratio_series: empty trajectory");
  if (i >= traj.arity() || j >= traj.arity()) throw AnalysisError("twin_ratio_series: index out of range");
  TwinRatioSeries out;
  out.times = traj.times();
  out.monotone_toward_one = true;
  std::optional<double> prev;
  for (const auto& s : traj.states()) {
    const bool valid = i == j || s[j] >= 1e-13;
    const double v = i == j ? 1.0 : (valid ? s[i] / s[j] : std::numeric_limits<double>::quiet_NaN());
    out.ratio.push_back(v);
    out.valid.push_back(valid);
    if (!valid) continue;
    const double dist = std::abs(v - 1.0);
    if (prev && dist > *prev + 1e-6) out.monotone_toward_one = false;
    prev = dist;
  }
  out.terminal_distance = prev ? *prev : std::numeric_limits<double>::infinity();
  return out;
}

TailStats tail_stats(const Trajectory& traj, double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction < 1.0)) throw AnalysisError("window fraction must lie in (0, 1)");
  if (traj.empty()) throw AnalysisError("tail_stats: empty trajectory");
  const auto& t = traj.times();
  const double t_end = t.back();
  const double t_start = t_end - window_fraction * (t_end - t.front());
  const auto first = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), t_start) - t.begin());
  const std::size_t count = t.size() - first;
  if (count < kMinTailSamples) {
    throw AnalysisError("tail window holds " + std::to_string(count) + " samples, need " +
                        std::to_string(kMinTailSamples));
  }
  const std::size_t n = traj.arity();
  TailStats s;
  s.window_fraction = window_fraction;
  s.t_start = t[first];
  s.samples = count;
  s.min.assign(n, std::numeric_limits<double>::infinity());
  s.max.assign(n, -std::numeric_limits<double>::infinity());
  s.mean.assign(n, 0.0);
  std::vector<KahanSum> area(n);
  for (std::size_t k = first; k < t.size(); ++k) {
    const auto& x = traj.state(k);
    for (std::size_t i = 0; i < n; ++i) {
      s.min[i] = std::min(s.min[i], x[i]);
      s.max[i] = std::max(s.max[i], x[i]);
      if (k > first) area[i].add(0.5 * (t[k] - t[k - 1]) * (x[i] + traj.state(k - 1)[i]));
    }
  }
  const double span = t.back() - t[first];
  for (std::size_t i = 0; i < n; ++i) {
    s.mean[i] = span > 0.0 ? area[i].value() / span : traj.state(first)[i];
    s.mean[i] = std::clamp(s.mean[i], s.min[i], s.max[i]);
  }
  return s;
}

nlohmann::json to_json(const TailStats& s) {
  return {{"window_fraction", s.window_fraction}, {"t_start", s.t_start}, {"samples", s.samples},
          {"min", s.min},
          {"mean", s.mean},
          {"max", s.max}};
}

std::optional<double> detect_period(std::span<const double> times, std::span<const double> values,
                                    double window_fraction) {
  if (times.size() != values.size() || times.size() < 4) return std::nullopt;
  const double t_start = times.back() - window_fraction * (times.back() - times.front());
  const auto first = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t_start) - times.begin());
  if (times.size() - first < 4) return std::nullopt;
  const auto tail = values.subspan(first);
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  const double amp = *hi - *lo;
  if (amp < 1e-9) return std::nullopt;
  const double mean = kahan_sum(tail) / static_cast<double>(tail.size());
  // Hysteresis band so noise near the mean is not counted as a crossing.
  const double band = 0.1 * amp;
  std::vector<double> crossings;
  bool armed = tail[0] < mean - band;
  for (std::size_t k = first + 1; k < values.size(); ++k) {
    if (values[k] < mean - band) armed = true;
    if (armed && values[k - 1] < mean && values[k] >= mean) {
      const double w = (mean - values[k - 1]) / (values[k] - values[k - 1]);
      crossings.push_back(times[k - 1] + w * (times[k] - times[k - 1]));
      armed = false;
    }
  }
  if (crossings.size() < 3) return std::nullopt;
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

LiminfEstimate liminf_estimate(const Trajectory& traj, std::size_t i, double window_fraction,
                               const std::vector<double>* signal) {
  if (!(window_fraction > 0.0 && window_fraction < 1.0)) throw AnalysisError("window fraction must lie in (0, 1)");
  if (traj.empty() || i >= traj.arity()) throw AnalysisError("liminf_estimate: bad trajectory or index");
  const auto series = traj.series(i);
  const auto& sig = signal ? *signal : series;
  if (sig.size() != traj.size()) throw AnalysisError("liminf_estimate: signal length mismatch");
  const auto& t = traj.times();
  LiminfEstimate est;
  est.period = detect_period(t, sig);
  est.t_start = t.back() - window_fraction * (t.back() - t.front());
  if (est.period && t.back() - est.t_start < 2.0 * *est.period) {
    est.t_start = std::max(t.front(), t.back() - 2.0 * *est.period);
  }
  const auto first = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), est.t_start) - t.begin());
  est.value = *std::min_element(series.begin() + static_cast<std::ptrdiff_t>(first), series.end());
  return est;
}

}  // namespace evodyn
