#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "evodyn/analysis.hpp"
#include "evodyn/integrate.hpp"
#include "oracles.hpp"

using namespace evodyn;

namespace {

MDistribution fixed(int m) { return MDistribution::fixed(m); }

std::vector<PopulationState> interior(std::size_t n, std::size_t count, std::uint64_t seed, double floor = 1e-3) {
  std::mt19937_64 rng(seed);
  std::vector<PopulationState> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(validate_state(oracle::dirichlet(n, rng, floor)));
  return out;
}

PayoffFunction rps() { return MatrixGame(Matrix({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}})).payoff(); }

PayoffFunction hyp_twin() { return add_twin(hypnodisk_game(HypnodiskParams{})); }

double pc_value(const VectorField& v, const PayoffFunction& f, const PopulationState& x) {
  const auto dx = v(f, x);
  const auto fx = f(x);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += dx[i] * fx[i];
  return s;
}

Trajectory constant_trajectory(double c, std::size_t rows) {
  Trajectory t;
  for (std::size_t k = 0; k < rows; ++k) t.append(static_cast<double>(k), PopulationState{c, 1 - c});
  return t;
}

}  // namespace

TEST(PopulationEquilibrium, Detection) {
  EXPECT_TRUE(is_population_equilibrium(std::vector<double>{0.5, 0.5, 0.0}, std::vector<double>{1, 1, 5}));
  EXPECT_FALSE(is_population_equilibrium(std::vector<double>{0.5, 0.4, 0.1}, std::vector<double>{1, 1, 5}));
  EXPECT_TRUE(is_population_equilibrium(std::vector<double>{1.0, 0.0}, std::vector<double>{0, 3}));
}

TEST(PositiveCorrelation, ReplicatorOnRps) {
  const auto f = rps();
  const auto r = check_positive_correlation(replicator_field(), f, interior(3, 200, 1));
  EXPECT_EQ(r.verdict, Verdict::holds);
  EXPECT_EQ(r.samples, 200u);
}

TEST(PositiveCorrelation, EquilibriumGivesZero) {
  const auto f = hyp_twin();
  const PopulationState x{1.0 / 3, 1.0 / 3, 1.0 / 6, 1.0 / 6};
  for (const auto& proto :
       {RevisionProtocol{SelectionRule::list_sample(fixed(3)), AdoptionRule::pairwise()},
        RevisionProtocol{SelectionRule::retry_other(fixed(4)), AdoptionRule::success()}}) {
    const auto field = mother_field(proto, f);
    EXPECT_NEAR(pc_value(field, f, x), 0.0, 1e-15);
    EXPECT_EQ(check_positive_correlation(field, f, {x}).verdict, Verdict::holds);
  }
}

TEST(PositiveCorrelation, RetryOtherSuccessFailsWithReproducibleWitness) {
  const auto f = constant_two_strategy(1.0, 0.9);
  const auto field = mother_field({SelectionRule::retry_other(fixed(4)), AdoptionRule::success()}, f);
  const auto r = check_positive_correlation(field, f, interior(2, 200, 2));
  ASSERT_EQ(r.verdict, Verdict::fails);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_LT(pc_value(field, f, *r.witness), -1e-12);
  EXPECT_FALSE(nlohmann::json(to_json(r))["witness"].is_null());
}

TEST(PositiveCorrelation, VacuousOnExactTwins) {
  const auto f = constant_two_strategy(1.0, 1.0);
  const auto field = mother_field({SelectionRule::retry_other(fixed(4)), AdoptionRule::success()}, f);
  EXPECT_EQ(check_positive_correlation(field, f, interior(2, 100, 3)).verdict, Verdict::holds);
}

TEST(PositiveCorrelation, HoldsForSufficientProtocolFamilies) {
  std::mt19937_64 rng(61);
  const ScalarMap decreasing{ScalarMap::Kind::exponential, 1.0, -0.5};
  const ScalarMap increasing{ScalarMap::Kind::affine, 10.0, 1.0};
  const auto dist = MDistribution::table({0.2, 0.3, 0.5});
  const std::vector<SelectionRule> all{SelectionRule::fair(),           SelectionRule::list_sample(dist),
                                       SelectionRule::majority(dist),   SelectionRule::retry_other(dist),
                                       SelectionRule::confirmation(dist), SelectionRule::uniform_over_strategies()};
  std::vector<RevisionProtocol> protos;
  for (const auto& s : all) {
    protos.push_back({s, AdoptionRule::pairwise()});
    if (s.target_form()) protos.push_back({s, AdoptionRule::above_average(decreasing)});
    if (s.source_form()) protos.push_back({s, AdoptionRule::below_average(increasing)});
  }
  EXPECT_GE(protos.size(), 10u);
  for (int g = 0; g < 10; ++g) {
    const auto f = MatrixGame(Matrix(oracle::random_matrix(3 + g % 2, rng))).payoff();
    const auto states = interior(f.arity(), 100, 100 + g);
    for (const auto& p : protos) {
      const auto r = check_positive_correlation(mother_field(p, f), f, states);
      EXPECT_EQ(r.verdict, Verdict::holds) << p.describe() << ": " << r.detail;
    }
  }
}

TEST(Monotone, ReplicatorOnRandomGames) {
  std::mt19937_64 rng(62);
  for (int g = 0; g < 50; ++g) {
    const auto f = MatrixGame(Matrix(oracle::random_matrix(3 + g % 2, rng))).payoff();
    const auto r = check_monotone(replicator_field(), f, interior(f.arity(), 100, 200 + g));
    EXPECT_EQ(r.verdict, Verdict::holds);
  }
}

TEST(Monotone, RarityOverturnsPayoffOrder) {
  const auto f = constant_two_strategy(1.0, 0.99);
  const auto field = mother_field({SelectionRule::list_sample(fixed(3)), AdoptionRule::success()}, f);
  const auto r = check_monotone(field, f, interior(2, 200, 4));
  ASSERT_EQ(r.verdict, Verdict::fails);
  const auto& x = *r.witness;
  EXPECT_LT(x[1], x[0]);
  const auto dx = field(f, x);
  EXPECT_GT(dx[1] / x[1], dx[0] / x[0]);
}

TEST(Monotone, TwinsBreakTiesUnderRarityProtocols) {
  const auto f = hyp_twin();
  const auto field = mother_field({SelectionRule::list_sample(fixed(3)), AdoptionRule::pairwise()}, f);
  const auto r = check_monotone(field, f, interior(4, 200, 5));
  ASSERT_EQ(r.verdict, Verdict::fails);
}

TEST(Monotone, SingleStrategyIsVacuous) {
  const PayoffFunction one(1, PayoffKind::constant, [](std::span<const double>, std::span<double> o) { o[0] = 1; },
                           "one");
  EXPECT_EQ(check_monotone(replicator_field(), one, {}).verdict, Verdict::holds);
}

TEST(Advantage, RarityStrictOnHypnodiskTwin) {
  const auto f = hyp_twin();
  const auto field = mother_field({SelectionRule::list_sample(fixed(3)), AdoptionRule::pairwise()}, f);
  std::vector<PopulationState> states;
  for (const auto& x : interior(4, 300, 6)) {
    if (x[3] < x[2]) states.push_back(x);
  }
  const auto r = check_advantage(field, f, states, AdvantageMode::rarity);
  EXPECT_EQ(r.verdict, Verdict::holds);
  EXPECT_FALSE(r.strict_readings.empty());
  for (const auto& x : states) {
    const auto dx = field(f, x);
    EXPECT_GE(dx[3] / x[3], dx[2] / x[2] - 1e-12);
  }
}

TEST(Advantage, FairIsNeutral) {
  const auto f = hyp_twin();
  for (const auto& adopt : {AdoptionRule::pairwise(), AdoptionRule::success()}) {
    const auto field = mother_field({SelectionRule::fair(), adopt}, f);
    EXPECT_EQ(check_advantage(field, f, interior(4, 200, 7), AdvantageMode::rarity).verdict, Verdict::neutral);
  }
}

TEST(Advantage, ShippedRulesFavourTheirSide) {
  const auto pw = AdoptionRule::pairwise();
  const std::vector<PayoffFunction> games{hyp_twin(), constant_two_strategy(1.0, 1.0)};
  for (const auto& f : games) {
    const auto states = interior(f.arity(), 200, 8);
    for (const auto& sel : {SelectionRule::list_sample(fixed(3)), SelectionRule::retry_other(fixed(4))}) {
      const RevisionProtocol p{sel, f.arity() == 2 ? AdoptionRule::success() : pw};
      EXPECT_EQ(check_advantage(mother_field(p, f), f, states, AdvantageMode::rarity).verdict, Verdict::holds)
          << p.describe() << " on " << f.label();
    }
    for (const auto& sel : {SelectionRule::majority(fixed(3)), SelectionRule::confirmation(fixed(3))}) {
      const RevisionProtocol p{sel, f.arity() == 2 ? AdoptionRule::success() : pw};
      EXPECT_EQ(check_advantage(mother_field(p, f), f, states, AdvantageMode::frequency).verdict, Verdict::holds)
          << p.describe() << " on " << f.label();
      EXPECT_EQ(check_advantage(mother_field(p, f), f, states, AdvantageMode::rarity).verdict, Verdict::fails);
    }
  }
}

TEST(Advantage, RejectsGamesWithoutTwins) {
  const auto f = rps();
  EXPECT_THROW(check_advantage(replicator_field(), f, interior(3, 10, 9), AdvantageMode::rarity), AnalysisError);
  // A declared pair that is not an exact twin is rejected too.
  const auto fake = rps().with_twin_pair(0, 1);
  EXPECT_THROW(check_advantage(replicator_field(), fake, interior(3, 10, 9), AdvantageMode::rarity), AnalysisError);
}

TEST(Imitation, PairwiseHoldsAndEquilibriaAreSkipped) {
  const auto f = rps();
  const RevisionProtocol p{SelectionRule::list_sample(fixed(3)), AdoptionRule::pairwise()};
  EXPECT_EQ(check_imitation_condition(p, f, interior(3, 100, 10)).verdict, Verdict::holds);
  const auto at_eq = check_imitation_condition(p, f, {PopulationState::barycenter(3)});
  EXPECT_EQ(at_eq.verdict, Verdict::holds);
  EXPECT_EQ(at_eq.samples, 0u);
}

TEST(Imitation, ZeroRatesFail) {
  const auto f = rps();
  const RateFunction zero = [](const PopulationState& x) { return std::vector<double>(x.size() * x.size(), 0.0); };
  const auto r = check_imitation_condition(zero, f, interior(3, 10, 11));
  EXPECT_EQ(r.verdict, Verdict::fails);
  EXPECT_TRUE(r.witness.has_value());
}

TEST(Lyapunov, DistanceAndRegions) {
  const HypnodiskParams p;
  EXPECT_NEAR(lyapunov_distance(PopulationState{1.0 / 3, 1.0 / 3, 0.2, 1.0 / 3 - 0.2}, p), 0.0, 1e-15);
  const double d = 0.12;
  const double s = d / std::sqrt(2.0);
  const PopulationState x{1.0 / 3 + s, 1.0 / 3 - s, 1.0 / 6, 1.0 / 6};
  EXPECT_NEAR(lyapunov_distance(x, p), 0.12, 1e-15);
  EXPECT_EQ(classify_region(0.12, p), DiskRegion::outer);
  EXPECT_EQ(classify_region(0.05, p), DiskRegion::annulus);
  EXPECT_EQ(classify_region(0.1, p), DiskRegion::annulus);
  EXPECT_EQ(classify_region(0.049, p), DiskRegion::inner);
}

TEST(TwinRatio, IdenticalIndicesAreConstantOne) {
  const auto t = constant_trajectory(0.3, 10);
  const auto v = twin_ratio_series(t, 1, 1);
  for (double r : v.ratio) EXPECT_EQ(r, 1.0);
  EXPECT_TRUE(v.monotone_toward_one);
  EXPECT_EQ(v.terminal_distance, 0.0);
}

TEST(TwinRatio, RarityProtocolEqualizesTwins) {
  const auto f = hyp_twin();
  const auto field = mother_field({SelectionRule::list_sample(fixed(3)), AdoptionRule::pairwise()}, f);
  IntegratorConfig cfg;
  cfg.horizon = 2000;
  cfg.sample_stride = 1.0;
  const auto traj = integrate(field, f, PopulationState{0.3, 0.3, 0.15, 0.25}, cfg);
  const auto v = twin_ratio_series(traj, 3, 2);
  EXPECT_LT(v.terminal_distance, 0.02);
  EXPECT_TRUE(v.monotone_toward_one);
}

TEST(TwinRatio, FrequencyProtocolDiverges) {
  const auto f = hyp_twin();
  const auto field = mother_field({SelectionRule::majority(fixed(3)), AdoptionRule::pairwise()}, f);
  IntegratorConfig cfg;
  cfg.horizon = 1000;
  cfg.sample_stride = 1.0;
  const auto traj = integrate(field, f, PopulationState{0.3, 0.3, 0.15, 0.25}, cfg);
  const auto v = twin_ratio_series(traj, 3, 2);
  EXPECT_FALSE(v.monotone_toward_one);
  EXPECT_GT(v.ratio[500], 5 * v.ratio[0]);
  EXPECT_LT(traj.back()[2], 1e-3);
}

TEST(TailStats, ConstantTrajectory) {
  const auto s = tail_stats(constant_trajectory(0.3, 1000), 0.25);
  EXPECT_EQ(s.min[0], 0.3);
  EXPECT_EQ(s.max[0], 0.3);
  EXPECT_NEAR(s.mean[0], 0.3, 1e-15);
  EXPECT_GE(s.samples, 100u);
}

TEST(TailStats, PeriodicSignal) {
  Trajectory t;
  for (int k = 0; k <= 4000; ++k) {
    const double tt = 0.01 * k;
    const double x4 = 0.15 + 0.05 * std::sin(2 * M_PI * tt / 3.0);
    t.append(tt, validate_state(std::vector<double>{0.3, 0.3, 0.4 - x4, x4}));
  }
  const auto s = tail_stats(t, 0.25);
  EXPECT_NEAR(s.min[3], 0.1, 1e-4);
  EXPECT_NEAR(s.max[3], 0.2, 1e-4);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LE(s.min[i], s.mean[i]);
    EXPECT_LE(s.mean[i], s.max[i]);
  }
  const auto period = detect_period(t.times(), t.series(3));
  ASSERT_TRUE(period.has_value());
  EXPECT_NEAR(*period, 3.0, 0.01);
}

TEST(TailStats, RejectsShortTailAndBadWindow) {
  EXPECT_THROW(tail_stats(constant_trajectory(0.3, 200), 0.25), AnalysisError);
  EXPECT_THROW(tail_stats(constant_trajectory(0.3, 1000), 0.0), AnalysisError);
  EXPECT_THROW(tail_stats(constant_trajectory(0.3, 1000), 1.0), AnalysisError);
}

TEST(Liminf, WindowWidensToTwoPeriods) {
  Trajectory t;
  // Period 20 over a horizon of 200; the deepest dip at t = 175 lies before the default window.
  for (int k = 0; k <= 20000; ++k) {
    const double tt = 0.01 * k;
    const double depth = tt > 165 && tt < 185 ? 0.08 : 0.05;
    const double x = 0.2 + depth * std::sin(2 * M_PI * tt / 20.0);
    t.append(tt, validate_state(std::vector<double>{x, 1 - x}));
  }
  const auto est = liminf_estimate(t, 0, 0.1);
  ASSERT_TRUE(est.period.has_value());
  EXPECT_NEAR(*est.period, 20.0, 0.5);
  EXPECT_NEAR(est.t_start, 200.0 - 2 * *est.period, 1e-9);
  EXPECT_NEAR(est.value, 0.2 - 0.08, 1e-3);
}

TEST(Liminf, NoPeriodKeepsDefaultWindow) {
  const auto est = liminf_estimate(constant_trajectory(0.4, 1000), 0, 0.25);
  EXPECT_FALSE(est.period.has_value());
  EXPECT_NEAR(est.t_start, 999 * 0.75, 1e-9);
  EXPECT_EQ(est.value, 0.4);
}

TEST(GammaZero, RarityTrajectoriesApproachTheMidpoint) {
  const auto f = constant_two_strategy(1.0, 1.0);
  for (const auto& sel : {SelectionRule::list_sample(fixed(3)), SelectionRule::retry_other(fixed(4))}) {
    const auto field = mother_field({sel, AdoptionRule::success()}, f);
    for (double x1 : {0.05, 0.3, 0.7, 0.95}) {
      IntegratorConfig cfg;
      cfg.horizon = 200;
      const auto traj = integrate(field, f, PopulationState{x1, 1 - x1}, cfg);
      EXPECT_LT(std::abs(traj.back()[0] - 0.5), 1e-3) << sel.describe() << " from " << x1;
    }
  }
}

TEST(ConditionReport, JsonCarriesWitness) {
  auto r = ConditionReport::named("monotone", Verdict::fails);
  r.witness = PopulationState{0.2, 0.8};
  r.witness_values = {1, 2};
  const auto j = to_json(r);
  EXPECT_EQ(j["verdict"], "fails");
  EXPECT_EQ(j["witness"].size(), 2u);
  EXPECT_EQ(to_string(Verdict::neutral), "neutral");
}
