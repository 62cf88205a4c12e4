#pragma once

// Independent reference computations. Nothing here calls the library's
// enumeration or field code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <set>
#include <vector>

namespace oracle {

/// Visits every ordered sequence of m strategies with its probability.
inline void for_each_sequence(const std::vector<double>& x, int m,
                              const std::function<void(const std::vector<std::size_t>&, double)>& visit) {
  const std::size_t n = x.size();
  std::vector<std::size_t> seq(static_cast<std::size_t>(m), 0);
  while (true) {
    double p = 1.0;
    for (auto s : seq) p *= x[s];
    visit(seq, p);
    std::size_t k = 0;
    while (k < seq.size() && ++seq[k] == n) seq[k++] = 0;
    if (k == seq.size()) return;
  }
}

/// Pick uniformly from the distinct strategies met; picking i means keeping.
inline std::vector<double> list_sample(const std::vector<double>& x, std::size_t i, int m) {
  std::vector<double> p(x.size(), 0.0);
  for_each_sequence(x, m, [&](const auto& seq, double w) {
    const std::set<std::size_t> seen(seq.begin(), seq.end());
    for (auto s : seen) p[s] += w / static_cast<double>(seen.size());
  });
  p[i] = 0.0;
  return p;
}

/// Pick the most common strategy met, ties uniformly.
inline std::vector<double> majority(const std::vector<double>& x, std::size_t i, int m) {
  std::vector<double> p(x.size(), 0.0);
  for_each_sequence(x, m, [&](const auto& seq, double w) {
    std::vector<int> c(x.size(), 0);
    for (auto s : seq) ++c[s];
    const int top = *std::max_element(c.begin(), c.end());
    const auto ties = std::count(c.begin(), c.end(), top);
    for (std::size_t s = 0; s < c.size(); ++s) {
      if (c[s] == top) p[s] += w / static_cast<double>(ties);
    }
  });
  p[i] = 0.0;
  return p;
}

inline double mean_payoff(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * f[k];
  return s;
}

inline std::vector<double> replicator(const std::vector<double>& x, const std::vector<double>& f) {
  const double fbar = mean_payoff(x, f);
  std::vector<double> dx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] * (f[i] - fbar);
  return dx;
}

inline std::vector<double> smith(const std::vector<double>& x, const std::vector<double>& f) {
  std::vector<double> dx(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      dx[i] += x[j] * std::max(f[i] - f[j], 0.0) - x[i] * std::max(f[j] - f[i], 0.0);
    }
  }
  return dx;
}

inline std::vector<double> bnn(const std::vector<double>& x, const std::vector<double>& f) {
  const double fbar = mean_payoff(x, f);
  double excess = 0.0;
  for (double v : f) excess += std::max(v - fbar, 0.0);
  std::vector<double> dx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = std::max(f[i] - fbar, 0.0) - x[i] * excess;
  return dx;
}

/// Mother equation from an explicit rate matrix rho[i][j].
inline std::vector<double> mother(const std::vector<double>& x, const std::vector<std::vector<double>>& rho) {
  std::vector<double> dx(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j != i) dx[i] += x[j] * rho[j][i] - x[i] * rho[i][j];
    }
  }
  return dx;
}

inline std::vector<double> matvec(const std::vector<std::vector<double>>& a, const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  }
  return y;
}

/// Logistic solution of x1' = x1 (1 - x1) (u1 - u2).
inline double logistic(double x10, double du, double t) {
  const double e = std::exp(du * t);
  return x10 * e / (x10 * e + (1.0 - x10));
}

/// Flat Dirichlet sample via normalized exponentials (independent of the
/// library sampler).
inline std::vector<double> dirichlet(std::size_t n, std::mt19937_64& rng, double floor = 0.0) {
  std::exponential_distribution<double> e(1.0);
  while (true) {
    std::vector<double> v(n);
    double s = 0.0;
    for (auto& w : v) s += (w = e(rng));
    bool ok = true;
    for (auto& w : v) ok = ok && (w /= s) > floor;
    if (ok) return v;
  }
}

inline std::vector<std::vector<double>> random_matrix(std::size_t n, std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (auto& row : a) {
    for (auto& v : row) v = u(rng);
  }
  return a;
}

}  // namespace oracle
