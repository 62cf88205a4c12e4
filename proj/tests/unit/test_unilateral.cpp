#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "evodyn/unilateral.hpp"
#include "oracles.hpp"

using namespace evodyn;

namespace {

std::vector<PopulationState> interior3(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PopulationState> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(validate_state(oracle::dirichlet(3, rng, 1e-3)));
  return out;
}

IntegratorConfig cfg(double T) {
  IntegratorConfig c;
  c.horizon = T;
  c.sample_stride = 0.05;
  return c;
}

const RevisionProtocol kRetry{SelectionRule::retry_other(MDistribution::fixed(4)), AdoptionRule::pairwise()};

}  // namespace

TEST(UnilateralGame, Payoffs) {
  const UnilateralGame g(0.1);
  EXPECT_EQ(g.payoffs(1.0), (std::vector<double>{1.0, 0.0, -0.1}));
  EXPECT_EQ(g.payoffs(0.0), (std::vector<double>{0.0, 1.0, 0.9}));
  EXPECT_FALSE(g.at(0.3).twin_pair().has_value());
  EXPECT_TRUE(UnilateralGame(0.0).at(0.3).twin_pair().has_value());
  EXPECT_THROW(UnilateralGame(-0.1), GameError);
}

TEST(UnilateralField, MatchesMotherFieldAtFixedOpponent) {
  const UnilateralGame game(0.05);
  const auto field = unilateral_field(kRetry, game);
  for (const auto& x : interior3(20, 1)) {
    for (double y : {0.0, 0.3, 1.0}) {
      const auto f = game.at(y);
      const auto want = mother_field(kRetry, f)(f, x);
      std::vector<double> got(3);
      field(y, x.weights(), got);
      for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], 1e-15);
    }
  }
}

TEST(Assumptions, RarityProtocolSatisfiesThem) {
  const auto states = interior3(300, 2);
  const auto r = verify_A_assumptions(kRetry, states);
  EXPECT_EQ(r.a2.verdict, Verdict::holds) << r.a2.detail;
  EXPECT_TRUE(r.ok());
  EXPECT_GT(r.a3.samples, 0u);
  const auto j = to_json(r);
  EXPECT_TRUE(j["ok"].get<bool>());
}

TEST(Assumptions, FairProtocolHasNoTwinEdge) {
  const auto r = verify_A_assumptions({SelectionRule::fair(), AdoptionRule::pairwise()}, interior3(300, 3));
  EXPECT_EQ(r.a2.verdict, Verdict::holds);
  EXPECT_EQ(r.a3.verdict, Verdict::fails);
  EXPECT_EQ(r.a3_prime.verdict, Verdict::fails);
  EXPECT_FALSE(r.ok());
}

TEST(Assumptions, RejectsWrongArity) {
  EXPECT_THROW(verify_A_assumptions(kRetry, {PopulationState{0.5, 0.5}}), AnalysisError);
}

TEST(RunUnilateral, ThresholdOpponentEqualizesTwinsWithoutMargin) {
  const auto traj = run_unilateral(kRetry, 0.0, ThresholdControl{0.3, 0.7, 0, Action::L},
                                   PopulationState{0.2, 0.6, 0.2}, cfg(300));
  const auto s = tail_stats(traj, 0.25);
  const double share = s.mean[2] / (s.mean[1] + s.mean[2]);
  EXPECT_NEAR(share, 0.5, 0.05);
  std::string last;
  std::size_t switches = 0;
  for (const auto& e : traj.events()) {
    if (e.empty()) continue;
    EXPECT_NE(e, last);
    last = e;
    ++switches;
  }
  EXPECT_GT(switches, 4u);
}

TEST(RunUnilateral, FrequencyProtocolLetsTheLargerTwinTakeOver) {
  const RevisionProtocol majority{SelectionRule::majority(MDistribution::fixed(3)), AdoptionRule::pairwise()};
  const auto traj = run_unilateral(majority, 0.0, ThresholdControl{0.3, 0.7, 0, Action::L},
                                   PopulationState{0.2, 0.3, 0.5}, cfg(300));
  const auto& x = traj.back();
  EXPECT_GT(x[2] / (x[1] + x[2]), 0.99);
}

TEST(RunUnilateral, RejectsWrongArity) {
  EXPECT_THROW(run_unilateral(kRetry, 0.0, ConstantControl{0.5}, PopulationState{0.5, 0.5}, cfg(1)),
               std::invalid_argument);
}
