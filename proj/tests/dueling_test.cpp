#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "fairbandit/dueling.hpp"
#include "fairbandit/errors.hpp"
#include "oracles.hpp"

namespace fairbandit {
namespace {

PLModel random_pl(int k, Rng& rng, double lo = 0.2, double hi = 5.0) {
  Eigen::VectorXd nu(k);
  for (int a = 0; a < k; ++a) nu(a) = lo + (hi - lo) * rng.uniform();
  return PLModel(nu);
}

PairwiseStats exact_stats(const PLModel& model, int duels) {
  // Counts chosen so that every empirical rate is an exact multiple.
  PairwiseStats s(model.arms());
  for (int i = 0; i < model.arms(); ++i)
    for (int j = i + 1; j < model.arms(); ++j) {
      const int wins = static_cast<int>(std::lround(pl_pair_prob(model, i, j) * duels));
      for (int n = 0; n < duels; ++n) s.update(i, j, n < wins ? 1 : 0);
    }
  return s;
}

TEST(PairProb, Values) {
  const PLModel m(Eigen::Vector2d(2.0, 1.0));
  EXPECT_NEAR(pl_pair_prob(m, 0, 1), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(pl_pair_prob(PLModel(Eigen::Vector2d(3.0, 3.0)), 0, 1), 0.5);
  EXPECT_THROW(pl_pair_prob(m, 1, 1), UsageError);
  Rng rng(50);
  for (int trial = 0; trial < 100; ++trial) {
    const PLModel r = random_pl(4, rng);
    ASSERT_NEAR(pl_pair_prob(r, 1, 3) + pl_pair_prob(r, 3, 1), 1.0, 1e-15);
  }
}

TEST(RankProb, Values) {
  const PLModel m(Eigen::Vector2d(3.0, 1.0));
  EXPECT_NEAR(pl_rank_prob(m, Ranking{{0, 1}}), 0.75, 1e-15);
  EXPECT_THROW(pl_rank_prob(m, Ranking{{0, 0}}), UsageError);
  const Ranking r{{2, 0, 1}};
  const auto pos = r.position_of();
  EXPECT_EQ(pos[2], 0);
  EXPECT_EQ(pos[1], 2);
}

TEST(RankProb, SumsToOneOverAllRankings) {
  Rng rng(51);
  for (int k = 2; k <= 6; ++k) {
    const PLModel m = random_pl(k, rng);
    Ranking r;
    r.order.resize(static_cast<std::size_t>(k));
    std::iota(r.order.begin(), r.order.end(), 0);
    double total = 0.0, first_is_zero = 0.0;
    do {
      const double p = pl_rank_prob(m, r);
      total += p;
      if (r.order[0] == 0) first_is_zero += p;
    } while (std::next_permutation(r.order.begin(), r.order.end()));
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(first_is_zero, pl_rank1_exact(m)(0), 1e-12);
  }
}

TEST(Rank1Exact, Values) {
  const CalibratedTarget t = pl_rank1_exact(PLModel(Eigen::Vector3d(1.0, 1.0, 2.0)));
  EXPECT_EQ(t(0), 0.25);
  EXPECT_EQ(t(2), 0.5);
  const CalibratedTarget u = pl_rank1_exact(PLModel(Eigen::VectorXd::Ones(5)));
  EXPECT_TRUE(u.pstar.isApproxToConstant(0.2));
}

TEST(RankSample, FirstPositionMatchesClosedForm) {
  Rng rng(52);
  constexpr int kDraws = 1'000'000;
  for (int k : {3, 6}) {
    const PLModel m = random_pl(k, rng);
    Eigen::VectorXd first = Eigen::VectorXd::Zero(k);
    for (int n = 0; n < kDraws; ++n) {
      const Ranking r = pl_rank_sample(m, rng);
      ASSERT_TRUE(r.is_permutation(k));
      first(r.order[0]) += 1.0;
    }
    first /= kDraws;
    const CalibratedTarget exact = pl_rank1_exact(m);
    for (int a = 0; a < k; ++a) EXPECT_NEAR(first(a), exact(a), testing::four_sigma(exact(a), kDraws));
  }
}

TEST(RankSample, FullRankingFrequenciesMatchProductFormula) {
  Rng rng(53);
  const PLModel m(Eigen::Vector3d(1.0, 2.0, 4.0));
  constexpr int kDraws = 300'000;
  std::map<std::vector<int>, int> counts;
  for (int n = 0; n < kDraws; ++n) ++counts[pl_rank_sample(m, rng).order];
  EXPECT_EQ(counts.size(), 6u);
  for (const auto& [order, c] : counts) {
    const double p = pl_rank_prob(m, Ranking{order});
    EXPECT_NEAR(c / double(kDraws), p, testing::four_sigma(p, kDraws));
  }
}

TEST(PairwiseStats, CountsAndSymmetry) {
  PairwiseStats s(3);
  EXPECT_THROW(s.ptilde(0, 1), StateError);
  s.update(0, 1, 1);
  s.update(1, 0, 0);
  s.update(0, 1, 1);
  s.update(0, 1, 0);
  EXPECT_EQ(s.count(0, 1), 4);
  EXPECT_EQ(s.count(1, 0), 4);
  EXPECT_DOUBLE_EQ(s.ptilde(0, 1), 0.75);
  EXPECT_DOUBLE_EQ(s.ptilde(1, 0), 0.25);
  EXPECT_EQ(s.wins(0, 1) + s.wins(1, 0), s.count(0, 1));
  EXPECT_EQ(s.min_pair_count(), 0);
  EXPECT_THROW(s.update(2, 2, 1), UsageError);
  EXPECT_THROW(s.update(0, 2, 3), UsageError);
}

TEST(PairwiseStats, EmpiricalRateConverges) {
  Rng rng(54);
  const PLModel m(Eigen::Vector2d(2.0, 1.0));
  PairwiseStats s(2);
  constexpr int kDuels = 100'000;
  for (int n = 0; n < kDuels; ++n) s.update(0, 1, sample_duel(m, 0, 1, rng));
  EXPECT_NEAR(s.ptilde(0, 1), 2.0 / 3.0, 3.0 * std::sqrt((2.0 / 9.0) / kDuels));
}

TEST(EstimateRank1, ExactRatesRecoverClosedForm) {
  const PLModel m(Eigen::Vector3d(1.0, 1.0, 2.0));
  const Eigen::VectorXd r = rank1_from_pairwise(pl_pair_matrix(m));
  EXPECT_NEAR(r(0), 0.25, 1e-12);
  EXPECT_NEAR(r(2), 0.5, 1e-12);

  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const PLModel rm = random_pl(2 + trial % 5, rng);
    ASSERT_LT((rank1_from_pairwise(pl_pair_matrix(rm)) - pl_rank1_exact(rm).pstar).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(EstimateRank1, FromCounts) {
  PairwiseStats s(2);
  for (int n = 0; n < 4; ++n) s.update(0, 1, n < 3 ? 1 : 0);
  const Rank1Estimate e = estimate_rank1(s);
  EXPECT_NEAR(e.target(0), 0.75, 1e-12);
  EXPECT_NEAR(e.target(1), 0.25, 1e-12);
  EXPECT_FALSE(e.clamped);

  PairwiseStats even(2);
  even.update(0, 1, 1);
  even.update(0, 1, 0);
  EXPECT_NEAR(estimate_rank1(even).target(0), 0.5, 1e-15);

  const Rank1Estimate exact = estimate_rank1(exact_stats(PLModel(Eigen::Vector3d(1.0, 1.0, 2.0)), 300));
  EXPECT_NEAR(exact.target(0), 0.25, 1e-12);
  EXPECT_NEAR(exact.target(2), 0.5, 1e-12);
}

TEST(EstimateRank1, ClampsDegenerateRates) {
  PairwiseStats s(3);
  for (int n = 0; n < 8; ++n) {
    s.update(0, 1, 1);
    s.update(0, 2, 1);
    s.update(1, 2, n % 2);
  }
  const Rank1Estimate e = estimate_rank1(s);
  EXPECT_TRUE(e.clamped);
  EXPECT_NEAR(e.target.pstar.sum(), 1.0, 1e-9);
  EXPECT_TRUE((e.target.pstar.array() > 0.0).all());
  EXPECT_GT(e.target(0), e.target(1));

  PairwiseStats missing(3);
  missing.update(0, 1, 1);
  EXPECT_THROW(estimate_rank1(missing), StateError);
}

TEST(EstimateRank1, SumsToOneForNoisyStats) {
  Rng rng(56);
  for (int trial = 0; trial < 50; ++trial) {
    const PLModel m = random_pl(2 + trial % 5, rng);
    PairwiseStats s(m.arms());
    for (int i = 0; i < m.arms(); ++i)
      for (int j = i + 1; j < m.arms(); ++j)
        for (int n = 0; n < 30; ++n) s.update(i, j, sample_duel(m, i, j, rng));
    ASSERT_NEAR(estimate_rank1(s).target.pstar.sum(), 1.0, 1e-9);
  }
}

TEST(FairSDDTSStep, ExplorationIsUniformOverPairs) {
  Rng rng(57);
  FairSDTSConfig c;
  const PairwiseStats fresh(4);
  std::map<std::pair<int, int>, int> counts;
  constexpr int kDraws = 60'000;
  for (int n = 0; n < kDraws; ++n) {
    const DuelStep step = fair_sd_dts_step(fresh, c, rng);
    ASSERT_EQ(step.phase, Phase::Exploration);
    ASSERT_TRUE(step.rule.probs.isApproxToConstant(0.25));
    ASSERT_LT(step.pair.first, step.pair.second);
    ++counts[{step.pair.first, step.pair.second}];
  }
  EXPECT_EQ(counts.size(), 6u);
  for (const auto& [pair, n] : counts) EXPECT_NEAR(n / double(kDraws), 1.0 / 6.0, testing::four_sigma(1.0 / 6.0, kDraws));
}

TEST(FairSDDTSStep, ExploitsWithEstimatedRank1Rule) {
  Rng rng(58);
  FairSDTSConfig c;
  c.budget_override = 100;
  const PairwiseStats s = exact_stats(PLModel(Eigen::Vector3d(1.0, 1.0, 2.0)), 300);
  constexpr int kDraws = 100'000;
  Eigen::Vector3d first = Eigen::Vector3d::Zero();
  for (int n = 0; n < kDraws; ++n) {
    const DuelStep step = fair_sd_dts_step(s, c, rng);
    ASSERT_EQ(step.phase, Phase::Exploitation);
    ASSERT_NE(step.pair.first, step.pair.second);
    first(step.pair.first) += 1.0;
    if (n == 0) {
      EXPECT_NEAR(step.rule(0), 0.25, 1e-12);
      EXPECT_NEAR(step.rule(2), 0.5, 1e-12);
    }
  }
  first /= kDraws;
  EXPECT_NEAR(first(2), 0.5, testing::four_sigma(0.5, kDraws));

  c.budget_override = 300;  // every pair has exactly 300 duels: still exploring
  EXPECT_EQ(fair_sd_dts_step(s, c, rng).phase, Phase::Exploration);
}

TEST(Lemma1Probe, ZeroPerturbation) {
  Rng rng(59);
  const Lemma1Probe p = lemma1_probe(PLModel(Eigen::VectorXd::LinSpaced(5, 0.5, 2.0)), 0.0, 10, rng);
  EXPECT_LT(p.max_deviation, 1e-15);
  EXPECT_EQ(p.fitted_constant, 0.0);
}

TEST(Lemma1Probe, ConstantIsBoundedAndDeviationLinear) {
  Rng rng(60);
  const PLModel m(Eigen::VectorXd::LinSpaced(5, 0.5, 2.0));
  std::vector<double> log_eps, log_dev;
  for (double eps : {1e-4, 1e-3, 1e-2}) {
    const Lemma1Probe p = lemma1_probe(m, eps, 1000, rng);
    EXPECT_GT(p.fitted_constant, 0.0);
    EXPECT_LE(p.fitted_constant, 10.0);
    log_eps.push_back(std::log(eps));
    log_dev.push_back(std::log(p.max_deviation));
  }
  const double slope = (log_dev[2] - log_dev[0]) / (log_eps[2] - log_eps[0]);
  EXPECT_NEAR(slope, 1.0, 0.15);
  EXPECT_THROW(lemma1_probe(m, -0.1, 10, rng), UsageError);
}

TEST(PLRewardTV, GumbelClosedForm) {
  EXPECT_EQ(pl_reward_tv(2.0, 2.0), 0.0);
  // rho = 3: numerically integrated 0.5 * int |f_1 - f_2| = 0.3849001794...
  EXPECT_NEAR(pl_reward_tv(3.0, 1.0), 0.38490017945975, 1e-12);
  EXPECT_EQ(pl_reward_tv(1.0, 3.0), pl_reward_tv(3.0, 1.0));
  EXPECT_GT(pl_reward_tv(1000.0, 1.0), 0.99);
  EXPECT_LT(pl_reward_tv(1.0001, 1.0), 1e-4);
}

}  // namespace
}  // namespace fairbandit
