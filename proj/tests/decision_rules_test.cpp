#include <gtest/gtest.h>

#include "fairbandit/decision_rules.hpp"
#include "fairbandit/errors.hpp"
#include "fairbandit/fairness.hpp"
#include "oracles.hpp"

namespace fairbandit {
namespace {

Eigen::VectorXd frequencies(int k, int draws, const std::function<int()>& draw) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(k);
  for (int n = 0; n < draws; ++n) f(draw()) += 1.0;
  return f / draws;
}

void expect_within_four_sigma(const Eigen::VectorXd& freq, const Eigen::VectorXd& p, int draws) {
  for (Eigen::Index i = 0; i < p.size(); ++i)
    EXPECT_NEAR(freq(i), p(i), testing::four_sigma(p(i), draws) + 1e-12) << "arm " << i;
}

PosteriorState random_state(int k, Rng& rng) {
  Eigen::VectorXd s(k), f(k);
  for (int a = 0; a < k; ++a) {
    s(a) = 0.5 + static_cast<double>(rng.below(40));
    f(a) = 0.5 + static_cast<double>(rng.below(40));
  }
  return PosteriorState::from_parameters(s, f);
}

TEST(ExactSDTSRule, WorkedValues) {
  const DecisionRule half = exact_sdts_rule(Eigen::Vector2d(0.5, 0.5));
  EXPECT_NEAR(half(0), 0.5, 1e-15);
  const DecisionRule r = exact_sdts_rule(Eigen::Vector2d(0.8, 0.4));
  EXPECT_NEAR(r(0), 0.70, 1e-12);
  EXPECT_NEAR(r(1), 0.30, 1e-12);
  const DecisionRule d = exact_sdts_rule(Eigen::Vector2d(1.0, 0.0));
  EXPECT_EQ(d(0), 1.0);
  EXPECT_EQ(d(1), 0.0);
  const DecisionRule three = exact_sdts_rule(Eigen::Vector3d(0.9, 0.5, 0.4));
  EXPECT_NEAR(three(0), 0.565, 1e-12);
  EXPECT_NEAR(three(1), 0.245, 1e-12);
  EXPECT_NEAR(three(2), 0.190, 1e-12);
}

TEST(ExactSDTSRule, MatchesPerArmOracle) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(9));
    Eigen::VectorXd m(k);
    for (int a = 0; a < k; ++a) m(a) = rng.uniform();
    const DecisionRule r = exact_sdts_rule(m);
    EXPECT_TRUE(is_probability_vector(r.probs));
    EXPECT_LT((r.probs - testing::sdts_rule_by_counts(m)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ExactSDTSRule, Errors) {
  EXPECT_THROW(exact_sdts_rule(Eigen::VectorXd::Constant(21, 0.5)), CapacityError);
  EXPECT_THROW(exact_sdts_rule(Eigen::VectorXd::Constant(5, 0.5), 4), CapacityError);
  EXPECT_THROW(exact_sdts_rule(Eigen::Vector2d(0.5, 1.2)), UsageError);
}

TEST(ExactSDTSRule, SubjectiveSmoothFairnessInvariant) {
  // |pi(i) - pi(j)| <= 2 |m_i - m_j| for every posterior state.
  Rng rng(12);
  for (int trial = 0; trial < 400; ++trial) {
    const int k = 2 + trial % 5;
    const PosteriorState s = random_state(k, rng);
    const Eigen::VectorXd m = s.marginal_means();
    const DecisionRule r = exact_sdts_rule(m);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) ASSERT_LE(std::abs(r(i) - r(j)), 2.0 * std::abs(m(i) - m(j)) + 1e-12);
    const SmoothAudit audit = smooth_audit(r.probs, tv_matrix_bernoulli(m), FairnessSpec{2.0, 0.0, 0.0});
    ASSERT_FALSE(audit.violated());
  }
}

TEST(MixedRule, Values) {
  const DecisionRule base{Eigen::Vector2d(0.7, 0.3)};
  const DecisionRule zero = mixed_rule(base, 0.0);
  EXPECT_DOUBLE_EQ(zero(0), 0.5);
  const DecisionRule one = mixed_rule(base, 1.0);
  EXPECT_EQ(one.probs, base.probs);
  const DecisionRule half = mixed_rule(base, 0.5);
  EXPECT_NEAR(half(0), 0.6, 1e-15);
  EXPECT_NEAR(half(1), 0.4, 1e-15);
  EXPECT_THROW(mixed_rule(base, 1.5), UsageError);
  EXPECT_THROW(mixed_rule(base, -0.1), UsageError);
}

TEST(MixedRule, ScalesPairwiseGapsAndSmoothness) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + trial % 5;
    const Eigen::VectorXd m = random_state(k, rng).marginal_means();
    const DecisionRule base = exact_sdts_rule(m);
    const double eps = rng.uniform();
    const DecisionRule mixed = mixed_rule(base, eps);
    EXPECT_TRUE(is_probability_vector(mixed.probs));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        ASSERT_NEAR(std::abs(mixed(i) - mixed(j)), eps * std::abs(base(i) - base(j)), 1e-14);
        ASSERT_LE(std::abs(mixed(i) - mixed(j)), 2.0 * eps * std::abs(m(i) - m(j)) + 1e-12);
      }
    }
  }
}

TEST(SDTSDraw, SymmetricPrior) {
  Rng rng(20);
  const PosteriorState s(2);
  constexpr int kDraws = 100'000;
  const Eigen::VectorXd f = frequencies(2, kDraws, [&] { return sdts_draw(s, rng); });
  EXPECT_NEAR(f(0), 0.5, 3.0 * std::sqrt(0.25 / kDraws));
}

TEST(SDTSDraw, DegenerateMarginals) {
  Rng rng(21);
  const auto s = PosteriorState::from_parameters(Eigen::Vector2d(1e9, 0.5), Eigen::Vector2d(0.5, 1e9));
  constexpr int kDraws = 100'000;
  const Eigen::VectorXd f = frequencies(2, kDraws, [&] { return sdts_draw(s, rng); });
  EXPECT_GT(f(0), 0.999);
}

TEST(SDTSDraw, MatchesExactRule) {
  Rng rng(22);
  constexpr int kDraws = 100'000;
  // Marginal means (0.8, 0.4).
  const auto fixed = PosteriorState::from_parameters(Eigen::Vector2d(4.0, 2.0), Eigen::Vector2d(1.0, 3.0));
  expect_within_four_sigma(frequencies(2, kDraws, [&] { return sdts_draw(fixed, rng); }),
                           exact_sdts_rule(fixed.marginal_means()).probs, kDraws);
  for (int trial = 0; trial < 5; ++trial) {
    const int k = 2 + trial;
    const PosteriorState s = random_state(k, rng);
    expect_within_four_sigma(frequencies(k, kDraws, [&] { return sdts_draw(s, rng); }),
                             exact_sdts_rule(s.marginal_means()).probs, kDraws);
  }
}

TEST(StandardTS, SymmetricAndConcentrated) {
  Rng rng(23);
  constexpr int kDraws = 100'000;
  const PosteriorState flat(3);
  const Eigen::VectorXd f = frequencies(3, kDraws, [&] { return standard_ts_draw(flat, rng); });
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(f(a), 1.0 / 3.0, 3.0 * std::sqrt((2.0 / 9.0) / kDraws));

  const auto sharp = PosteriorState::from_parameters(Eigen::Vector2d(0.9e9, 0.1e9), Eigen::Vector2d(0.1e9, 0.9e9));
  EXPECT_GT(frequencies(2, kDraws, [&] { return standard_ts_draw(sharp, rng); })(0), 0.999);

  const auto same = PosteriorState::from_parameters(Eigen::Vector2d(5, 5), Eigen::Vector2d(5, 5));
  EXPECT_NEAR(frequencies(2, kDraws, [&] { return standard_ts_draw(same, rng); })(0), 0.5,
              3.0 * std::sqrt(0.25 / kDraws));
}

TEST(StandardTS, QuadratureRuleMatchesMonteCarlo) {
  Rng rng(24);
  constexpr int kDraws = 400'000;
  std::vector<PosteriorState> states{
      PosteriorState(3),
      PosteriorState::from_parameters(Eigen::Vector3d(0.5, 3.5, 0.5), Eigen::Vector3d(0.5, 0.5, 7.5)),
      PosteriorState::from_parameters(Eigen::Vector3d(9000.5, 25.5, 8.5), Eigen::Vector3d(1000.5, 25.5, 12.5)),
      PosteriorState::from_parameters(Eigen::Vector2d(40.5, 38.5), Eigen::Vector2d(10.5, 12.5))};
  for (int trial = 0; trial < 4; ++trial) states.push_back(random_state(2 + trial, rng));
  for (const auto& s : states) {
    const DecisionRule exact = standard_ts_rule(s);
    EXPECT_TRUE(is_probability_vector(exact.probs));
    expect_within_four_sigma(frequencies(s.arms(), kDraws, [&] { return standard_ts_draw(s, rng); }), exact.probs,
                             kDraws);
  }
}

TEST(FairSDTSConfig, Budgets) {
  FairSDTSConfig c;
  c.epsilon2 = 0.2;
  c.delta = 0.05;
  EXPECT_EQ(c.budget(), 415);
  EXPECT_EQ(c.dueling_budget(3), 3735);
  c.budget_override = 7;
  EXPECT_EQ(c.budget(), 7);
  EXPECT_EQ(c.dueling_budget(3), 7);
  c.budget_override.reset();
  c.divergence_bound = 0.5;  // (2 * 0.5 + 1)^2 = 4
  EXPECT_EQ(c.budget(), static_cast<long>(std::ceil(4.0 / 0.08 * std::log(40.0))));
  c.delta = 1.5;
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(FairSDTSConfig, BudgetGrowsAsInverseSquareOfEpsilon2) {
  FairSDTSConfig c;
  c.delta = 0.01;
  c.epsilon2 = 0.1;
  const double b1 = static_cast<double>(c.budget());
  c.epsilon2 = 0.05;
  const double b2 = static_cast<double>(c.budget());
  EXPECT_NEAR(b2 / b1, 4.0, 0.01);
}

TEST(FairSDTSStep, ExploresUntilEveryArmPassesBudget) {
  Rng rng(30);
  FairSDTSConfig c;
  c.epsilon2 = 0.2;
  c.delta = 0.05;
  const PosteriorState fresh(3);
  const StepResult first = fair_sdts_step(fresh, c, fresh.pulls(), rng);
  EXPECT_EQ(first.phase, Phase::Exploration);
  EXPECT_TRUE(first.rule.probs.isApproxToConstant(1.0 / 3.0));

  // Means (0.8, 0.4) with 416 pulls each.
  const auto ready = PosteriorState::from_parameters(Eigen::Vector2d(0.8 * 417, 0.4 * 417),
                                                     Eigen::Vector2d(0.2 * 417, 0.6 * 417));
  const Eigen::Vector2i counts(416, 416);
  const StepResult exploit = fair_sdts_step(ready, c, counts, rng);
  EXPECT_EQ(exploit.phase, Phase::Exploitation);
  EXPECT_NEAR(exploit.rule(0), 0.70, 1e-12);
  EXPECT_NEAR(exploit.rule(1), 0.30, 1e-12);

  const StepResult boundary = fair_sdts_step(ready, c, Eigen::Vector2i(416, 415), rng);
  EXPECT_EQ(boundary.phase, Phase::Exploration);

  c.epsilon1_target = 1.0;  // mixing weight 1/2
  const StepResult mixed = fair_sdts_step(ready, c, counts, rng);
  EXPECT_NEAR(mixed.rule(0), 0.60, 1e-12);
  EXPECT_THROW(fair_sdts_step(ready, c, Eigen::Vector3i(1, 1, 1), rng), UsageError);
}

TEST(FairSDTSStep, ExplorationArmIsUniform) {
  Rng rng(31);
  FairSDTSConfig c;
  const PosteriorState fresh(4);
  constexpr int kDraws = 100'000;
  const Eigen::VectorXd f =
      frequencies(4, kDraws, [&] { return fair_sdts_step(fresh, c, fresh.pulls(), rng).arm; });
  expect_within_four_sigma(f, Eigen::VectorXd::Constant(4, 0.25), kDraws);
}

TEST(ArgmaxRandomTie, SplitsTiesUniformly) {
  Rng rng(32);
  const Eigen::Vector4d v(1.0, 0.0, 1.0, 1.0);
  constexpr int kDraws = 90'000;
  const Eigen::VectorXd f = frequencies(4, kDraws, [&] { return argmax_random_tie(v, rng); });
  EXPECT_EQ(f(1), 0.0);
  for (int a : {0, 2, 3}) EXPECT_NEAR(f(a), 1.0 / 3.0, testing::four_sigma(1.0 / 3.0, kDraws));
}

}  // namespace
}  // namespace fairbandit
