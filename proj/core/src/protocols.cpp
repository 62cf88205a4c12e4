#include "evodyn/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evodyn/numeric.hpp"

namespace evodyn {

// ---------------------------------------------------------------------------
// MDistribution

MDistribution MDistribution::fixed(int m) {
  if (m < 1) throw ProtocolError("number of agents met must be >= 1, got " + std::to_string(m));
  std::vector<double> prob(static_cast<std::size_t>(m), 0.0);
  prob.back() = 1.0;
  return MDistribution(std::move(prob));
}

MDistribution MDistribution::table(std::vector<double> prob) {
  if (prob.empty()) throw ProtocolError("m-distribution table is empty");
  double s = 0.0;
  for (double p : prob) {
    if (!(p >= 0.0)) throw ProtocolError("m-distribution probabilities must be >= 0");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ProtocolError("m-distribution probabilities sum to " + format_double(s));
  while (prob.size() > 1 && prob.back() == 0.0) prob.pop_back();
  return MDistribution(std::move(prob));
}

bool MDistribution::is_fixed() const {
  return std::count_if(prob_.begin(), prob_.end(), [](double p) { return p > 0.0; }) == 1;
}

namespace {

std::string describe_m(const MDistribution& m) {
  if (m.is_fixed()) return "m=" + std::to_string(m.max());
  std::ostringstream os;
  os << "m~{";
  bool first = true;
  for (int k = 1; k <= m.max(); ++k) {
    if (m.probability(k) == 0.0) continue;
    if (!first) os << ",";
    os << k << ":" << format_double(m.probability(k));
    first = false;
  }
  os << "}";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// SelectionRule

std::string to_string(SelectionKind kind) {
  switch (kind) {
    case SelectionKind::fair: return "fair";
    case SelectionKind::list_sample: return "list_sample";
    case SelectionKind::majority: return "majority";
    case SelectionKind::retry_other: return "retry_other";
    case SelectionKind::confirmation: return "confirmation";
    case SelectionKind::uniform_over_strategies: return "uniform_over_strategies";
    case SelectionKind::mixture: return "mixture";
  }
  return "unknown";
}

SelectionRule SelectionRule::fair() { return {SelectionKind::fair, MDistribution::fixed(1)}; }
SelectionRule SelectionRule::list_sample(MDistribution m) { return {SelectionKind::list_sample, std::move(m)}; }
SelectionRule SelectionRule::majority(MDistribution m) { return {SelectionKind::majority, std::move(m)}; }
SelectionRule SelectionRule::retry_other(MDistribution m) { return {SelectionKind::retry_other, std::move(m)}; }
SelectionRule SelectionRule::confirmation(MDistribution m) { return {SelectionKind::confirmation, std::move(m)}; }
SelectionRule SelectionRule::uniform_over_strategies() {
  return {SelectionKind::uniform_over_strategies, MDistribution::fixed(1)};
}

SelectionRule SelectionRule::mixture(const SelectionRule& base, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw ProtocolError("mixture weight must lie in [0, 1]");
  if (base.kind() == SelectionKind::uniform_over_strategies) {
    throw ProtocolError("mixture base must be an imitative selection rule");
  }
  SelectionRule out{SelectionKind::mixture, base.m()};
  out.weight_ = weight;
  out.base_ = std::make_shared<const SelectionRule>(base);
  return out;
}

bool SelectionRule::imitative() const { return kind_ != SelectionKind::uniform_over_strategies; }

bool SelectionRule::target_form() const {
  switch (kind_) {
    case SelectionKind::fair:
    case SelectionKind::list_sample:
    case SelectionKind::majority: return true;
    case SelectionKind::mixture: return base_->target_form();
    default: return false;
  }
}

bool SelectionRule::source_form() const {
  switch (kind_) {
    case SelectionKind::fair:
    case SelectionKind::retry_other:
    case SelectionKind::confirmation: return true;
    case SelectionKind::mixture: return base_->source_form();
    default: return false;
  }
}

std::string SelectionRule::describe() const {
  switch (kind_) {
    case SelectionKind::fair:
    case SelectionKind::uniform_over_strategies: return to_string(kind_);
    case SelectionKind::mixture: return "mixture(" + format_double(weight_) + "*" + base_->describe() + ")";
    default: return to_string(kind_) + "(" + describe_m(m_) + ")";
  }
}

// ---------------------------------------------------------------------------
// Adoption rules

double ScalarMap::operator()(double u) const {
  switch (kind) {
    case Kind::constant: return a;
    case Kind::affine: return a + b * u;
    case Kind::exponential: return a * std::exp(b * u);
  }
  return a;
}

int ScalarMap::monotonicity() const {
  if (kind == Kind::constant || b == 0.0) return 0;
  const int sb = b > 0 ? 1 : -1;
  return kind == Kind::exponential && a < 0 ? -sb : sb;
}

std::string ScalarMap::describe() const {
  switch (kind) {
    case Kind::constant: return format_double(a);
    case Kind::affine: return format_double(a) + "+" + format_double(b) + "*u";
    case Kind::exponential: return format_double(a) + "*exp(" + format_double(b) + "*u)";
  }
  return "?";
}

std::string to_string(AdoptionKind kind) {
  switch (kind) {
    case AdoptionKind::success: return "success";
    case AdoptionKind::dissatisfaction: return "dissatisfaction";
    case AdoptionKind::pairwise_proportional: return "pairwise";
    case AdoptionKind::above_average: return "above_average";
    case AdoptionKind::below_average: return "below_average";
    case AdoptionKind::product: return "product";
  }
  return "unknown";
}

AdoptionRule AdoptionRule::success(std::optional<double> baseline) {
  AdoptionRule r(AdoptionKind::success);
  r.baseline_ = baseline;
  return r;
}

AdoptionRule AdoptionRule::dissatisfaction(std::optional<double> baseline) {
  AdoptionRule r(AdoptionKind::dissatisfaction);
  r.baseline_ = baseline;
  return r;
}

AdoptionRule AdoptionRule::pairwise() { return AdoptionRule(AdoptionKind::pairwise_proportional); }

AdoptionRule AdoptionRule::above_average(ScalarMap f) {
  AdoptionRule r(AdoptionKind::above_average);
  r.f_ = f;
  return r;
}

AdoptionRule AdoptionRule::below_average(ScalarMap g) {
  AdoptionRule r(AdoptionKind::below_average);
  r.g_ = g;
  return r;
}

AdoptionRule AdoptionRule::product(ScalarMap f, ScalarMap g) {
  AdoptionRule r(AdoptionKind::product);
  r.f_ = f;
  r.g_ = g;
  return r;
}

AdoptionRule AdoptionRule::with_baseline(double k) const {
  AdoptionRule r = *this;
  r.baseline_ = k;
  return r;
}

std::string AdoptionRule::describe() const {
  std::string s = to_string(kind_);
  switch (kind_) {
    case AdoptionKind::success:
    case AdoptionKind::dissatisfaction:
      if (baseline_) s += "(K=" + format_double(*baseline_) + ")";
      break;
    case AdoptionKind::above_average:
      if (f_.kind != ScalarMap::Kind::constant || f_.a != 1.0) s += "(f=" + f_.describe() + ")";
      break;
    case AdoptionKind::below_average:
      if (g_.kind != ScalarMap::Kind::constant || g_.a != 1.0) s += "(g=" + g_.describe() + ")";
      break;
    case AdoptionKind::product: s += "(f=" + f_.describe() + ",g=" + g_.describe() + ")"; break;
    default: break;
  }
  return s;
}

std::string RevisionProtocol::describe() const { return selection.describe() + "+" + adoption.describe(); }

// ---------------------------------------------------------------------------
// Exact selection probabilities

namespace {

void check_enumerable(const SelectionRule& rule, std::size_t n) {
  if (rule.m().max() > kMaxEnumeratedSample || n > kMaxEnumeratedStrategies) {
    throw EnumerationLimitError("exact enumeration of " + rule.describe() + " over " + std::to_string(n) +
                                " strategies is refused (limits m <= " + std::to_string(kMaxEnumeratedSample) +
                                ", N <= " + std::to_string(kMaxEnumeratedStrategies) +
                                "); use the Monte-Carlo estimator");
  }
}

/// Probability that each strategy ends up selected from a sample of m
/// agents, for the list and majority rules. Sums over all compositions of m
/// into N counts with multinomial weights.
std::vector<double> enumerate_sample_rule(SelectionKind kind, const MDistribution& mdist, std::span<const double> x) {
  const std::size_t n = x.size();
  const int m_max = mdist.max();
  std::vector<std::vector<double>> pow(n, std::vector<double>(static_cast<std::size_t>(m_max) + 1, 1.0));
  for (std::size_t k = 0; k < n; ++k) {
    for (int c = 1; c <= m_max; ++c) pow[k][static_cast<std::size_t>(c)] = pow[k][static_cast<std::size_t>(c - 1)] * x[k];
  }
  std::vector<double> factorial(static_cast<std::size_t>(m_max) + 1, 1.0);
  for (int c = 1; c <= m_max; ++c) factorial[static_cast<std::size_t>(c)] = factorial[static_cast<std::size_t>(c - 1)] * c;

  std::vector<KahanSum> acc(n);
  std::vector<int> counts(n, 0);
  auto score = [&](int m, double pm) {
    double w = pm * factorial[static_cast<std::size_t>(m)];
    for (std::size_t k = 0; k < n; ++k) {
      const auto c = static_cast<std::size_t>(counts[k]);
      w *= pow[k][c] / factorial[c];
    }
    if (w == 0.0) return;
    int threshold = 1;  // list rule: every strategy present is eligible
    if (kind == SelectionKind::majority) threshold = *std::max_element(counts.begin(), counts.end());
    const auto eligible = std::count_if(counts.begin(), counts.end(), [&](int c) { return c >= threshold; });
    const double share = w / static_cast<double>(eligible);
    for (std::size_t k = 0; k < n; ++k)
      if (counts[k] >= threshold) acc[k].add(share);
  };
  // Compositions of m into n parts: slot k takes 0..remaining, last slot the rest.
  std::function<void(std::size_t, int, int, double)> fill = [&](std::size_t k, int remaining, int m, double pm) {
    if (k + 1 == n) {
      counts[k] = remaining;
      score(m, pm);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[k] = c;
      fill(k + 1, remaining - c, m, pm);
    }
  };
  for (int m = 1; m <= m_max; ++m) {
    const double pm = mdist.probability(m);
    if (pm != 0.0) fill(0, m, m, pm);
  }
  std::vector<double> p(n);
  for (std::size_t k = 0; k < n; ++k) p[k] = acc[k].value();
  return p;
}

double retry_lambda(const MDistribution& mdist, double xi) {
  double lambda = 0.0;
  for (int m = 1; m <= mdist.max(); ++m) {
    const double pm = mdist.probability(m);
    if (pm == 0.0) continue;
    double geo = 0.0, pw = 1.0;
    for (int k = 0; k < m; ++k) {
      geo += pw;
      pw *= xi;
    }
    lambda += pm * geo;
  }
  return lambda;
}

double confirmation_lambda(const MDistribution& mdist, double xi) {
  double lambda = 0.0;
  for (int m = 1; m <= mdist.max(); ++m) {
    const double pm = mdist.probability(m);
    if (pm != 0.0) lambda += pm * std::pow(1.0 - xi, m - 1);
  }
  return lambda;
}

}  // namespace

std::vector<double> selection_matrix(const SelectionRule& rule, std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> p(n * n, 0.0);
  switch (rule.kind()) {
    case SelectionKind::fair:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) p[i * n + j] = x[j];
      break;
    case SelectionKind::uniform_over_strategies:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) p[i * n + j] = 1.0 / static_cast<double>(n);
      break;
    case SelectionKind::list_sample:
    case SelectionKind::majority: {
      check_enumerable(rule, n);
      const auto q = enumerate_sample_rule(rule.kind(), rule.m(), x);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) p[i * n + j] = q[j];
      break;
    }
    case SelectionKind::retry_other:
    case SelectionKind::confirmation:
      for (std::size_t i = 0; i < n; ++i) {
        const double lambda = rule.kind() == SelectionKind::retry_other ? retry_lambda(rule.m(), x[i])
                                                                         : confirmation_lambda(rule.m(), x[i]);
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) p[i * n + j] = lambda * x[j];
      }
      break;
    case SelectionKind::mixture: {
      p = selection_matrix(*rule.base(), x);
      const double w = rule.weight();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) p[i * n + j] = w * p[i * n + j] + (1.0 - w) * x[j];
      break;
    }
  }
  return p;
}

std::vector<double> selection_prob(const SelectionRule& rule, std::size_t i, const PopulationState& x) {
  const std::size_t n = x.size();
  if (i >= n) throw ProtocolError("selection_prob: strategy index out of range");
  const auto p = selection_matrix(rule, x.weights());
  return {p.begin() + static_cast<std::ptrdiff_t>(i * n), p.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)};
}

std::vector<std::optional<double>> lambda_factors(const SelectionRule& rule, std::size_t i, const PopulationState& x) {
  const std::size_t n = x.size();
  if (i >= n) throw ProtocolError("lambda_factors: strategy index out of range");
  std::vector<std::optional<double>> out(n);
  // Closed-form rules have a well-defined factor even where x_j = 0.
  std::optional<double> closed;
  switch (rule.kind()) {
    case SelectionKind::fair: closed = 1.0; break;
    case SelectionKind::retry_other: closed = retry_lambda(rule.m(), x[i]); break;
    case SelectionKind::confirmation: closed = confirmation_lambda(rule.m(), x[i]); break;
    case SelectionKind::mixture: {
      const auto& b = *rule.base();
      if (b.kind() == SelectionKind::fair) closed = 1.0;
      if (b.kind() == SelectionKind::retry_other) closed = rule.weight() * retry_lambda(b.m(), x[i]) + 1.0 - rule.weight();
      if (b.kind() == SelectionKind::confirmation)
        closed = rule.weight() * confirmation_lambda(b.m(), x[i]) + 1.0 - rule.weight();
      break;
    }
    default: break;
  }
  if (closed) {
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) out[j] = closed;
    return out;
  }
  const auto p = selection_prob(rule, i, x);
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i && x[j] > 0.0) out[j] = p[j] / x[j];
  }
  return out;
}

double conditional_selection_given_event(int l, int q, int m_tilde, double y_i) {
  if (!(y_i >= 0.0 && y_i <= 1.0)) throw ProtocolError("y_i must lie in [0, 1]");
  if (q < 0 || l < q) throw ProtocolError("event needs 0 <= q <= l");
  if (l >= 1 && q == 0) throw ProtocolError("l >= 1 agents must show at least one strategy");
  if (m_tilde < 1) throw ProtocolError("m_tilde must be >= 1");
  const double a = std::pow(y_i, m_tilde);
  const double b = std::pow(1.0 - y_i, m_tilde);
  return a / (q + 1) + (1.0 - a - b) / (q + 2);
}

// ---------------------------------------------------------------------------
// Monte-Carlo oracle

namespace {

std::size_t draw_strategy(Rng& rng, std::span<const double> cdf) {
  const double u = rng.uniform();
  for (std::size_t k = 0; k + 1 < cdf.size(); ++k) {
    if (u < cdf[k]) return k;
  }
  return cdf.size() - 1;
}

int draw_m(Rng& rng, const MDistribution& mdist) {
  if (mdist.is_fixed()) return mdist.max();
  const double u = rng.uniform();
  double c = 0.0;
  for (int m = 1; m <= mdist.max(); ++m) {
    c += mdist.probability(m);
    if (u < c) return m;
  }
  return mdist.max();
}

/// One simulated revision; returns the selected strategy (i means keep).
std::size_t simulate_once(const SelectionRule& rule, std::size_t i, std::span<const double> cdf, Rng& rng,
                          std::vector<int>& counts, std::vector<std::size_t>& scratch) {
  const std::size_t n = cdf.size();
  switch (rule.kind()) {
    case SelectionKind::fair: return draw_strategy(rng, cdf);
    case SelectionKind::uniform_over_strategies: return rng.index(n);
    case SelectionKind::list_sample:
    case SelectionKind::majority: {
      const int m = draw_m(rng, rule.m());
      std::fill(counts.begin(), counts.end(), 0);
      for (int a = 0; a < m; ++a) ++counts[draw_strategy(rng, cdf)];
      int threshold = 1;
      if (rule.kind() == SelectionKind::majority) threshold = *std::max_element(counts.begin(), counts.end());
      scratch.clear();
      for (std::size_t k = 0; k < n; ++k)
        if (counts[k] >= threshold) scratch.push_back(k);
      return scratch[rng.index(scratch.size())];
    }
    case SelectionKind::retry_other: {
      const int m = draw_m(rng, rule.m());
      for (int trial = 0; trial < m; ++trial) {
        const std::size_t k = draw_strategy(rng, cdf);
        if (k != i) return k;
      }
      return i;
    }
    case SelectionKind::confirmation: {
      const int m = draw_m(rng, rule.m());
      scratch.clear();
      for (int a = 0; a < m; ++a) scratch.push_back(draw_strategy(rng, cdf));
      if (std::find(scratch.begin(), scratch.end(), i) != scratch.end()) return i;
      return scratch[rng.index(scratch.size())];
    }
    case SelectionKind::mixture:
      if (rng.uniform() < rule.weight()) return simulate_once(*rule.base(), i, cdf, rng, counts, scratch);
      return draw_strategy(rng, cdf);
  }
  return i;
}

}  // namespace

McEstimate selection_prob_mc(const SelectionRule& rule, std::size_t i, const PopulationState& x,
                             std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1) throw ProtocolError("Monte-Carlo estimate needs at least one sample");
  const std::size_t n = x.size();
  if (i >= n) throw ProtocolError("selection_prob_mc: strategy index out of range");
  std::vector<double> cdf(n);
  std::partial_sum(x.weights().begin(), x.weights().end(), cdf.begin());
  Rng rng(seed);
  std::vector<std::uint64_t> hits(n, 0);
  std::vector<int> counts(n);
  std::vector<std::size_t> scratch;
  scratch.reserve(16);
  for (std::uint64_t s = 0; s < samples; ++s) ++hits[simulate_once(rule, i, cdf, rng, counts, scratch)];
  McEstimate est;
  est.samples = samples;
  est.mean.assign(n, 0.0);
  est.stderr_.assign(n, 0.0);
  const double ns = static_cast<double>(samples);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == i) continue;
    const double p = static_cast<double>(hits[k]) / ns;
    est.mean[k] = p;
    est.stderr_[k] = std::sqrt(p * (1.0 - p) / ns);
  }
  return est;
}

// ---------------------------------------------------------------------------
// Adoption and switch rates

double adoption_rate(const AdoptionRule& rule, std::size_t i, std::size_t j, std::span<const double> payoffs,
                     std::span<const double> x) {
  const double fi = payoffs[i], fj = payoffs[j];
  switch (rule.kind()) {
    case AdoptionKind::success: {
      if (!rule.baseline()) throw ProtocolError("success adoption needs a baseline K");
      const double r = *rule.baseline() + fj;
      if (!(r > 0.0)) {
        throw ProtocolError("baseline K = " + format_double(*rule.baseline()) + " too small: K + F_j = " +
                            format_double(r) + " <= 0");
      }
      return r;
    }
    case AdoptionKind::dissatisfaction: {
      if (!rule.baseline()) throw ProtocolError("dissatisfaction adoption needs a baseline K");
      const double r = *rule.baseline() - fi;
      if (!(r > 0.0)) {
        throw ProtocolError("baseline K = " + format_double(*rule.baseline()) + " too small: K - F_i = " +
                            format_double(r) + " <= 0");
      }
      return r;
    }
    case AdoptionKind::pairwise_proportional: return positive_part(fj - fi);
    case AdoptionKind::above_average: {
      const double scale = rule.f()(fi);
      if (!(scale > 0.0)) throw ProtocolError("above_average scale f must be positive");
      return scale * positive_part(fj - average_payoff(x, payoffs));
    }
    case AdoptionKind::below_average: {
      const double scale = rule.g()(fj);
      if (!(scale > 0.0)) throw ProtocolError("below_average scale g must be positive");
      return scale * positive_part(average_payoff(x, payoffs) - fi);
    }
    case AdoptionKind::product: {
      const double r = rule.f()(fi) * rule.g()(fj);
      if (!(r > 0.0)) throw ProtocolError("product adoption maps must be positive");
      return r;
    }
  }
  return 0.0;
}

double default_baseline(const PayoffFunction& f) {
  const std::size_t n = f.arity();
  double worst = 0.0;
  std::vector<double> out(n);
  auto visit = [&](std::span<const double> x) {
    f.eval(x, out);
    for (double v : out) worst = std::max(worst, std::abs(v));
  };
  std::size_t used = 0;
  for (std::size_t k = 0; k < n; ++k, ++used) visit(PopulationState::vertex(n, k).weights());
  visit(PopulationState::barycenter(n).weights());
  ++used;
  Rng rng(0x5eed);
  for (; used < 1000; ++used) visit(uniform_state(n, rng).weights());
  return 1.0 + worst;
}

RevisionProtocol resolve_baseline(RevisionProtocol proto, const PayoffFunction& f) {
  if (proto.adoption.needs_baseline()) proto.adoption = proto.adoption.with_baseline(default_baseline(f));
  return proto;
}

void switch_rates_into(const RevisionProtocol& proto, std::span<const double> x, std::span<const double> payoffs,
                       std::span<double> rho) {
  const std::size_t n = x.size();
  const auto p = selection_matrix(proto.selection, x);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double pij = p[i * n + j];
      rho[i * n + j] = (i == j || pij == 0.0) ? 0.0 : pij * adoption_rate(proto.adoption, i, j, payoffs, x);
    }
  }
}

std::vector<double> switch_rates(const RevisionProtocol& proto, const PayoffFunction& f, const PopulationState& x) {
  const std::size_t n = x.size();
  if (f.arity() != n) throw ProtocolError("switch_rates: game and state arity differ");
  const auto resolved = resolve_baseline(proto, f);
  const auto payoffs = f(x);
  std::vector<double> rho(n * n);
  switch_rates_into(resolved, x.weights(), payoffs, rho);
  return rho;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json m_to_json(const MDistribution& m) {
  if (m.is_fixed()) return m.max();
  nlohmann::json table = nlohmann::json::array();
  for (int k = 1; k <= m.max(); ++k) table.push_back(m.probability(k));
  return table;
}

nlohmann::json map_to_json(const ScalarMap& s) {
  switch (s.kind) {
    case ScalarMap::Kind::constant: return {{"kind", "constant"}, {"a", s.a}};
    case ScalarMap::Kind::affine: return {{"kind", "affine"}, {"a", s.a}, {"b", s.b}};
    case ScalarMap::Kind::exponential: return {{"kind", "exponential"}, {"a", s.a}, {"b", s.b}};
  }
  return {};
}

}  // namespace

nlohmann::json to_json(const SelectionRule& rule) {
  nlohmann::json j{{"kind", to_string(rule.kind())}};
  switch (rule.kind()) {
    case SelectionKind::fair:
    case SelectionKind::uniform_over_strategies: break;
    case SelectionKind::mixture:
      j["weight"] = rule.weight();
      j["base"] = to_json(*rule.base());
      break;
    default:
      if (rule.m().is_fixed()) {
        j["m"] = rule.m().max();
      } else {
        j["m_dist"] = m_to_json(rule.m());
      }
  }
  return j;
}

nlohmann::json to_json(const AdoptionRule& rule) {
  nlohmann::json j{{"kind", to_string(rule.kind())}};
  if (rule.baseline()) j["K"] = *rule.baseline();
  if (rule.kind() == AdoptionKind::above_average || rule.kind() == AdoptionKind::product) j["f"] = map_to_json(rule.f());
  if (rule.kind() == AdoptionKind::below_average || rule.kind() == AdoptionKind::product) j["g"] = map_to_json(rule.g());
  return j;
}

nlohmann::json to_json(const RevisionProtocol& proto) {
  return {{"selection", to_json(proto.selection)}, {"adoption", to_json(proto.adoption)}};
}

}  // namespace evodyn
