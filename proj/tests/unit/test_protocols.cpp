#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "evodyn/protocols.hpp"
#include "oracles.hpp"

using namespace evodyn;

namespace {

MDistribution fixed(int m) { return MDistribution::fixed(m); }

PopulationState state(std::vector<double> v) { return validate_state(v); }

}  // namespace

TEST(MDistribution, Validation) {
  EXPECT_THROW(MDistribution::fixed(0), ProtocolError);
  EXPECT_THROW(MDistribution::table({}), ProtocolError);
  EXPECT_THROW(MDistribution::table({0.5, 0.6}), ProtocolError);
  EXPECT_THROW(MDistribution::table({-0.1, 1.1}), ProtocolError);
  const auto t = MDistribution::table({0.25, 0.75, 0.0});
  EXPECT_EQ(t.max(), 2);
  EXPECT_FALSE(t.is_fixed());
  EXPECT_TRUE(fixed(3).is_fixed());
  EXPECT_EQ(fixed(3).probability(3), 1.0);
}

TEST(SelectionProb, ListSampleSmallMIsFair) {
  std::mt19937_64 rng(21);
  for (int m : {1, 2}) {
    for (int k = 0; k < 50; ++k) {
      const auto x = state(oracle::dirichlet(4, rng));
      const auto p = selection_prob(SelectionRule::list_sample(fixed(m)), 1, x);
      for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(p[j], j == 1 ? 0.0 : x[j], 1e-15);
    }
  }
}

TEST(SelectionProb, WorkedExamples) {
  const PopulationState x{0.2, 0.8};
  EXPECT_NEAR(selection_prob(SelectionRule::list_sample(fixed(3)), 1, x)[0], 0.248, 1e-15);
  EXPECT_NEAR(selection_prob(SelectionRule::majority(fixed(3)), 1, x)[0], 0.104, 1e-15);
  const PopulationState y{0.5, 0.3, 0.2};
  const auto r = selection_prob(SelectionRule::retry_other(fixed(4)), 0, y);
  EXPECT_NEAR(r[1], 1.875 * 0.3, 1e-15);
  EXPECT_NEAR(r[2], 1.875 * 0.2, 1e-15);
  const auto c = selection_prob(SelectionRule::confirmation(fixed(1)), 0, y);
  EXPECT_NEAR(c[1], 0.3, 1e-15);
  EXPECT_NEAR(c[2], 0.2, 1e-15);
  const auto u = selection_prob(SelectionRule::uniform_over_strategies(), 0, y);
  EXPECT_NEAR(u[1], 1.0 / 3, 1e-15);
  EXPECT_EQ(u[0], 0.0);
}

class EnumerationOracle : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(EnumerationOracle, MatchesBruteForceOverSequences) {
  const auto [m, n] = GetParam();
  std::mt19937_64 rng(100 * m + n);
  for (int k = 0; k < 10; ++k) {
    const auto v = oracle::dirichlet(static_cast<std::size_t>(n), rng);
    const auto x = state(v);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
      const auto ls = selection_prob(SelectionRule::list_sample(fixed(m)), i, x);
      const auto mj = selection_prob(SelectionRule::majority(fixed(m)), i, x);
      const auto ols = oracle::list_sample(v, i, m);
      const auto omj = oracle::majority(v, i, m);
      for (std::size_t j = 0; j < v.size(); ++j) {
        EXPECT_NEAR(ls[j], ols[j], 1e-14) << "list_sample m=" << m << " i=" << i << " j=" << j;
        EXPECT_NEAR(mj[j], omj[j], 1e-14) << "majority m=" << m << " i=" << i << " j=" << j;
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(SmallCases, EnumerationOracle,
                         ::testing::Combine(::testing::Values(1, 2, 3, 4, 5, 6), ::testing::Values(2, 3, 4)));

TEST(SelectionProb, MixedMDistributionIsMixtureOfFixed) {
  const auto dist = MDistribution::table({0.2, 0.0, 0.5, 0.3});
  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    const auto x = state(oracle::dirichlet(3, rng));
    for (auto make : {&SelectionRule::list_sample, &SelectionRule::majority, &SelectionRule::retry_other,
                      &SelectionRule::confirmation}) {
      const auto mixed = selection_prob(make(dist), 2, x);
      const auto a = selection_prob(make(fixed(1)), 2, x);
      const auto b = selection_prob(make(fixed(3)), 2, x);
      const auto c = selection_prob(make(fixed(4)), 2, x);
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(mixed[j], 0.2 * a[j] + 0.5 * b[j] + 0.3 * c[j], 1e-14);
    }
  }
}

TEST(SelectionProb, ClosedFormsForRetryAndConfirmation) {
  std::mt19937_64 rng(32);
  for (int m = 1; m <= 8; ++m) {
    const auto x = state(oracle::dirichlet(4, rng));
    for (std::size_t i = 0; i < 4; ++i) {
      double geo = 0.0;
      for (int k = 0; k < m; ++k) geo += std::pow(x[i], k);
      const double conf = std::pow(1.0 - x[i], m - 1);
      const auto r = selection_prob(SelectionRule::retry_other(fixed(m)), i, x);
      const auto c = selection_prob(SelectionRule::confirmation(fixed(m)), i, x);
      for (std::size_t j = 0; j < 4; ++j) {
        if (j == i) continue;
        EXPECT_NEAR(r[j], geo * x[j], 1e-14);
        EXPECT_NEAR(c[j], conf * x[j], 1e-14);
      }
    }
  }
}

TEST(SelectionProb, MixtureIsConvexCombinationWithFair) {
  const auto base = SelectionRule::list_sample(fixed(4));
  const auto mix = SelectionRule::mixture(base, 0.3);
  const PopulationState x{0.1, 0.3, 0.6};
  const auto a = selection_prob(base, 0, x), b = selection_prob(mix, 0, x);
  for (std::size_t j = 1; j < 3; ++j) EXPECT_NEAR(b[j], 0.3 * a[j] + 0.7 * x[j], 1e-15);
  EXPECT_THROW(SelectionRule::mixture(base, 1.5), ProtocolError);
}

TEST(SelectionProb, RowsAreSubProbabilitiesAndImitative) {
  std::mt19937_64 rng(33);
  const std::vector<SelectionRule> rules{
      SelectionRule::fair(),           SelectionRule::list_sample(fixed(5)), SelectionRule::majority(fixed(4)),
      SelectionRule::retry_other(fixed(6)), SelectionRule::confirmation(fixed(3)),
      SelectionRule::uniform_over_strategies()};
  for (int k = 0; k < 50; ++k) {
    auto v = oracle::dirichlet(4, rng);
    if (k % 2 == 0) {
      v[1] += v[3];
      v[3] = 0.0;  // one strategy absent
    }
    const auto x = state(v);
    for (const auto& rule : rules) {
      for (std::size_t i = 0; i < 4; ++i) {
        const auto p = selection_prob(rule, i, x);
        double s = 0.0;
        for (double q : p) {
          EXPECT_GE(q, 0.0);
          s += q;
        }
        EXPECT_LE(s, 1.0 + 1e-12);
        EXPECT_EQ(p[i], 0.0);
        if (rule.imitative() && x[3] == 0.0 && i != 3) EXPECT_EQ(p[3], 0.0);
      }
    }
  }
}

TEST(SelectionProb, EnumerationLimits) {
  const auto x = PopulationState::barycenter(3);
  EXPECT_THROW(selection_prob(SelectionRule::list_sample(fixed(13)), 0, x), EnumerationLimitError);
  EXPECT_NO_THROW(selection_prob(SelectionRule::majority(fixed(12)), 0, x));
  EXPECT_THROW(selection_prob(SelectionRule::majority(fixed(3)), 0, PopulationState::barycenter(9)),
               EnumerationLimitError);
  // Closed forms have no limit.
  EXPECT_NO_THROW(selection_prob(SelectionRule::retry_other(fixed(50)), 0, PopulationState::barycenter(20)));
}

TEST(SelectionMatrix, RowsMatchSelectionProb) {
  std::mt19937_64 rng(34);
  const auto x = state(oracle::dirichlet(4, rng));
  for (const auto& rule : {SelectionRule::list_sample(fixed(4)), SelectionRule::majority(fixed(3)),
                           SelectionRule::retry_other(fixed(3))}) {
    const auto mat = selection_matrix(rule, x.weights());
    for (std::size_t i = 0; i < 4; ++i) {
      const auto row = selection_prob(rule, i, x);
      for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(mat[i * 4 + j], row[j], 1e-15);
    }
  }
}

TEST(SelectionMc, AgreesWithExactExamples) {
  const PopulationState x{0.2, 0.8};
  for (const auto& [rule, want] : {std::pair{SelectionRule::fair(), 0.2},
                                   std::pair{SelectionRule::list_sample(fixed(3)), 0.248},
                                   std::pair{SelectionRule::majority(fixed(3)), 0.104}}) {
    const auto est = selection_prob_mc(rule, 1, x, 200000, 17);
    EXPECT_LT(std::abs(est.mean[0] - want), 4 * std::sqrt(want * (1 - want) / 200000.0)) << rule.describe();
  }
}

TEST(SelectionMc, ReproducibleUnderSeed) {
  const auto x = PopulationState{0.1, 0.2, 0.3, 0.4};
  const auto rule = SelectionRule::list_sample(fixed(5));
  const auto a = selection_prob_mc(rule, 2, x, 10000, 5);
  const auto b = selection_prob_mc(rule, 2, x, 10000, 5);
  const auto c = selection_prob_mc(rule, 2, x, 10000, 6);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_NE(a.mean, c.mean);
  EXPECT_THROW(selection_prob_mc(rule, 2, x, 0, 5), ProtocolError);
}

TEST(SelectionMc, AgreesForEveryRuleAndMixedM) {
  std::mt19937_64 rng(35);
  const auto dist = MDistribution::table({0.1, 0.2, 0.3, 0.4});
  const std::vector<SelectionRule> rules{SelectionRule::list_sample(dist), SelectionRule::majority(dist),
                                         SelectionRule::retry_other(dist), SelectionRule::confirmation(dist),
                                         SelectionRule::uniform_over_strategies(), SelectionRule::fair()};
  constexpr std::uint64_t kSamples = 100000;
  for (const auto& rule : rules) {
    const auto x = state(oracle::dirichlet(3, rng));
    const auto exact = selection_prob(rule, 0, x);
    const auto est = selection_prob_mc(rule, 0, x, kSamples, 99);
    for (std::size_t j = 1; j < 3; ++j) {
      const double sigma = std::max(std::sqrt(exact[j] * (1 - exact[j]) / kSamples), 1.0 / kSamples);
      EXPECT_LT(std::abs(est.mean[j] - exact[j]), 4 * sigma) << rule.describe() << " j=" << j;
    }
  }
}

TEST(ConditionalSelection, Examples) {
  EXPECT_DOUBLE_EQ(conditional_selection_given_event(0, 0, 3, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(conditional_selection_given_event(0, 0, 2, 0.5), 0.5);
  EXPECT_THROW(conditional_selection_given_event(2, 3, 1, 0.5), ProtocolError);
  EXPECT_THROW(conditional_selection_given_event(2, 0, 1, 0.5), ProtocolError);
  EXPECT_THROW(conditional_selection_given_event(0, 0, 0, 0.5), ProtocolError);
  EXPECT_THROW(conditional_selection_given_event(0, 0, 1, 1.5), ProtocolError);
}

TEST(ConditionalSelection, MatchesBruteForceOverTwoTypeSequences) {
  for (int mt = 1; mt <= 6; ++mt) {
    for (int q = 0; q <= 3; ++q) {
      for (double y : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
        double p_i = 0.0, p_j = 0.0;
        oracle::for_each_sequence({y, 1.0 - y}, mt, [&](const auto& seq, double w) {
          bool has_i = false, has_j = false;
          for (auto s : seq) (s == 0 ? has_i : has_j) = true;
          const double list = q + (has_i ? 1 : 0) + (has_j ? 1 : 0);
          if (has_i) p_i += w / list;
          if (has_j) p_j += w / list;
        });
        const int l = q;  // q distinct strategies need at least q agents
        EXPECT_NEAR(conditional_selection_given_event(l, q, mt, y), p_i, 1e-14);
        EXPECT_NEAR(conditional_selection_given_event(l, q, mt, 1.0 - y), p_j, 1e-14);
        EXPECT_LE(p_i + p_j, 1.0 + 1e-14);
      }
    }
  }
}

TEST(AdoptionRate, Examples) {
  const std::vector<double> x{0.5, 0.5};
  const auto pw = AdoptionRule::pairwise();
  EXPECT_EQ(adoption_rate(pw, 0, 1, std::vector<double>{1, 1}, x), 0.0);
  EXPECT_EQ(adoption_rate(pw, 1, 0, std::vector<double>{1, 1}, x), 0.0);
  EXPECT_EQ(adoption_rate(pw, 0, 1, std::vector<double>{0, 1}, x), 1.0);
  EXPECT_EQ(adoption_rate(pw, 1, 0, std::vector<double>{0, 1}, x), 0.0);
  const auto above = AdoptionRule::above_average();
  EXPECT_DOUBLE_EQ(adoption_rate(above, 1, 0, std::vector<double>{1, 0}, x), 0.5);
  EXPECT_EQ(adoption_rate(above, 0, 1, std::vector<double>{1, 0}, x), 0.0);
  const auto below = AdoptionRule::below_average();
  EXPECT_DOUBLE_EQ(adoption_rate(below, 1, 0, std::vector<double>{1, 0}, x), 0.5);
  EXPECT_DOUBLE_EQ(adoption_rate(AdoptionRule::success(2.0), 1, 0, std::vector<double>{1, 0}, x), 3.0);
  EXPECT_DOUBLE_EQ(adoption_rate(AdoptionRule::dissatisfaction(2.0), 1, 0, std::vector<double>{1, 0}, x), 2.0);
  ScalarMap f{ScalarMap::Kind::affine, 1.0, 0.5};
  ScalarMap g{ScalarMap::Kind::exponential, 2.0, 1.0};
  EXPECT_DOUBLE_EQ(adoption_rate(AdoptionRule::product(f, g), 1, 0, std::vector<double>{1, 0}, x), 1.0 * 2.0 * M_E);
}

TEST(AdoptionRate, RejectsBaselineViolatingPositivity) {
  const std::vector<double> x{0.5, 0.5};
  EXPECT_THROW(adoption_rate(AdoptionRule::success(-2.0), 0, 1, std::vector<double>{1, 0.9}, x), ProtocolError);
  EXPECT_THROW(adoption_rate(AdoptionRule::dissatisfaction(0.5), 0, 1, std::vector<double>{1, 0.9}, x),
               ProtocolError);
  EXPECT_THROW(adoption_rate(AdoptionRule::success(), 0, 1, std::vector<double>{1, 0.9}, x), ProtocolError);
}

TEST(AdoptionRate, MonotoneKindsOrderNetFlowsAsPayoffs) {
  std::mt19937_64 rng(36);
  std::uniform_real_distribution<double> u(-3, 3);
  const std::vector<double> x{0.25, 0.25, 0.25, 0.25};
  for (const auto& rule : {AdoptionRule::success(10.0), AdoptionRule::dissatisfaction(10.0), AdoptionRule::pairwise()}) {
    for (int k = 0; k < 500; ++k) {
      std::vector<double> f(4);
      for (auto& v : f) v = u(rng);
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
          if (!(f[i] < f[j])) continue;
          for (std::size_t c = 0; c < 4; ++c) {
            const double into_j = adoption_rate(rule, c, j, f, x) - adoption_rate(rule, j, c, f, x);
            const double into_i = adoption_rate(rule, c, i, f, x) - adoption_rate(rule, i, c, f, x);
            EXPECT_GT(into_j, into_i) << rule.describe();
          }
        }
      }
    }
  }
}

TEST(SwitchRates, FairSuccessAndSmithForms) {
  const auto f = MatrixGame(Matrix({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}})).payoff();
  const PopulationState x{0.2, 0.3, 0.5};
  const auto fx = f(x);
  const double K = 3.0;
  const auto rho = switch_rates({SelectionRule::fair(), AdoptionRule::success(K)}, f, x);
  const auto smith = switch_rates({SelectionRule::uniform_over_strategies(), AdoptionRule::pairwise()}, f, x);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rho[i * 3 + i], 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      EXPECT_NEAR(rho[i * 3 + j], x[j] * (K + fx[j]), 1e-15);
      EXPECT_NEAR(smith[i * 3 + j], std::max(fx[j] - fx[i], 0.0) / 3.0, 1e-15);
    }
  }
}

TEST(SwitchRates, VanishAtVerticesForImitativeRules) {
  const auto f = rps_feeble_twin(0.04).payoff();
  for (const auto& sel : {SelectionRule::fair(), SelectionRule::list_sample(fixed(3)),
                          SelectionRule::majority(fixed(3)), SelectionRule::retry_other(fixed(4)),
                          SelectionRule::confirmation(fixed(2))}) {
    for (std::size_t v = 0; v < 4; ++v) {
      const auto rho = switch_rates({sel, AdoptionRule::pairwise()}, f, PopulationState::vertex(4, v));
      for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(rho[v * 4 + j], 0.0);
    }
  }
}

TEST(SwitchRates, DefaultBaselineResolvedFromGame) {
  const auto f = constant_two_strategy(1.0, 0.9);
  EXPECT_DOUBLE_EQ(default_baseline(f), 2.0);
  const auto p = resolve_baseline({SelectionRule::fair(), AdoptionRule::success()}, f);
  EXPECT_EQ(p.adoption.baseline(), 2.0);
  const auto explicit_k = resolve_baseline({SelectionRule::fair(), AdoptionRule::success(5.0)}, f);
  EXPECT_EQ(explicit_k.adoption.baseline(), 5.0);
}

TEST(LambdaFactors, Examples) {
  std::mt19937_64 rng(37);
  const auto x = state(oracle::dirichlet(4, rng));
  for (const auto& l : lambda_factors(SelectionRule::fair(), 0, x)) {
    if (l) EXPECT_NEAR(*l, 1.0, 1e-15);
  }
  const PopulationState y{0.3, 0.2, 0.5};
  const auto lr = lambda_factors(SelectionRule::retry_other(fixed(2)), 0, y);
  EXPECT_FALSE(lr[0].has_value());
  EXPECT_NEAR(*lr[1], 1.3, 1e-15);
  EXPECT_NEAR(*lr[2], 1.3, 1e-15);
  const auto absent = lambda_factors(SelectionRule::list_sample(fixed(3)), 0, PopulationState{0.5, 0.5, 0.0});
  EXPECT_FALSE(absent[2].has_value());
}

TEST(LambdaFactors, RarityAndFrequencyOrdering) {
  std::mt19937_64 rng(38);
  const auto dist = MDistribution::table({0.3, 0.3, 0.4});
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + k % 3;
    const auto x = state(oracle::dirichlet(n + 1, rng, 0.01));
    const auto ls = lambda_factors(SelectionRule::list_sample(dist), n, x);
    const auto mj = lambda_factors(SelectionRule::majority(dist), n, x);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = 0; l < n; ++l) {
        if (x[j] < x[l] - 1e-9) {
          EXPECT_GT(*ls[j], *ls[l]);
          EXPECT_LT(*mj[j], *mj[l]);
        }
      }
    }
  }
}

TEST(ProtocolDescribe, NamesParameters) {
  const RevisionProtocol p{SelectionRule::retry_other(fixed(4)), AdoptionRule::pairwise()};
  EXPECT_NE(p.describe().find("retry_other"), std::string::npos);
  EXPECT_NE(p.describe().find("m=4"), std::string::npos);
}
