#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "fairbandit/environment.hpp"
#include "fairbandit/errors.hpp"
#include "fairbandit/probability.hpp"
#include "fairbandit/rng.hpp"

namespace fairbandit {

/// Largest joint outcome space calibrated_target will enumerate.
inline constexpr long kDefaultEnumerationOutcomes = 1L << 20;

/// Slack below which a smooth-fairness pair counts as violated.
inline constexpr double kViolationTolerance = 1e-9;

enum class Divergence { TotalVariation };

/// (epsilon1, epsilon2, delta) smooth-fairness requirement.
struct FairnessSpec {
  double epsilon1 = 2.0;
  double epsilon2 = 0.0;
  double delta = 0.0;
  Divergence divergence = Divergence::TotalVariation;

  void validate() const;
};

inline double tv_bernoulli(double p, double q) { return std::abs(p - q); }

/// Half the L1 distance between the probability tables over the merged support.
double tv_finite(const FiniteDistribution& a, const FiniteDistribution& b);

/// Pairwise TV matrix between the arms of a model.
Eigen::MatrixXd tv_matrix(const RewardModel& model);

/// Pairwise TV matrix between Bernoulli arms with the given means.
template <typename Derived>
Eigen::MatrixXd tv_matrix_bernoulli(const Eigen::MatrixBase<Derived>& means) {
  const Eigen::Index k = means.size();
  Eigen::MatrixXd d(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) d(i, j) = tv_bernoulli(means(i), means(j));
  return d;
}

/// Exact Pr* by enumerating the joint outcome space; ties split uniformly
/// among exactly equal maxima. Throws CapacityError past `max_outcomes`.
CalibratedTarget calibrated_target(const RewardModel& model, long max_outcomes = kDefaultEnumerationOutcomes);

struct MonteCarloTarget {
  CalibratedTarget estimate;
  Eigen::VectorXd standard_error;
  long samples = 0;
};

/// Monte Carlo estimate of Pr* for models too large to enumerate.
MonteCarloTarget calibrated_target_mc(const RewardModel& model, long samples, Rng& rng);

/// Per-round fairness regret: sum_i max(Pr*(i) - pi(i), 0).
template <typename A, typename B>
double fairness_regret(const Eigen::MatrixBase<A>& rule, const Eigen::MatrixBase<B>& target) {
  if (rule.size() != target.size()) throw UsageError("fairness regret: rule and target differ in arm count");
  return (target - rule).cwiseMax(0.0).sum();
}

inline double fairness_regret_round(const DecisionRule& rule, const CalibratedTarget& target) {
  return fairness_regret(rule.probs, target.pstar);
}

/// Slack per pair (i, j): epsilon1 * D(i, j) + epsilon2 - |pi(i) - pi(j)|.
struct SmoothAudit {
  Eigen::MatrixXd slack;
  double min_slack = 0.0;
  int violations = 0;  // unordered pairs with slack < -kViolationTolerance

  bool violated() const { return violations > 0; }
  /// max(0, -min_slack): how far the worst pair overshoots its bound.
  double max_violation() const { return min_slack < 0.0 ? -min_slack : 0.0; }
};

/// Audits a rule against a pairwise divergence matrix. Objective audits pass
/// the true reward distributions' divergences; subjective audits pass those of
/// the posterior marginals.
template <typename A, typename B>
SmoothAudit smooth_audit(const Eigen::MatrixBase<A>& rule, const Eigen::MatrixBase<B>& divergence,
                         const FairnessSpec& spec) {
  const Eigen::Index k = rule.size();
  if (divergence.rows() != k || divergence.cols() != k)
    throw UsageError("smooth audit: divergence matrix does not match arm count");
  SmoothAudit audit;
  audit.slack = Eigen::MatrixXd::Constant(k, k, spec.epsilon2);
  audit.min_slack = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const double s = spec.epsilon1 * divergence(i, j) + spec.epsilon2 - std::abs(rule(i) - rule(j));
      audit.slack(i, j) = audit.slack(j, i) = s;
      audit.min_slack = std::min(audit.min_slack, s);
      if (s < -kViolationTolerance) ++audit.violations;
    }
  }
  return audit;
}

inline SmoothAudit smooth_audit(const DecisionRule& rule, const RewardModel& model, const FairnessSpec& spec) {
  return smooth_audit(rule.probs, tv_matrix(model), spec);
}

/// Brier score of forecasting `rule` when `best_arm` realizes the highest reward.
template <typename Derived>
double brier_loss(const Eigen::MatrixBase<Derived>& rule, int best_arm) {
  if (best_arm < 0 || best_arm >= rule.size()) throw UsageError("brier loss: arm index out of range");
  Eigen::VectorXd indicator = Eigen::VectorXd::Zero(rule.size());
  indicator(best_arm) = 1.0;
  return (rule - indicator).squaredNorm();
}

inline double scoring_loss(const DecisionRule& rule, int best_arm) { return brier_loss(rule.probs, best_arm); }

/// sum_i Pr*(i) * L(pi, i) with the Brier loss.
template <typename A, typename B>
double expected_brier_loss(const Eigen::MatrixBase<A>& rule, const Eigen::MatrixBase<B>& target) {
  if (rule.size() != target.size()) throw UsageError("expected loss: rule and target differ in arm count");
  double total = 0.0;
  for (Eigen::Index i = 0; i < target.size(); ++i) total += target(i) * brier_loss(rule, static_cast<int>(i));
  return total;
}

inline double expected_scoring_loss(const DecisionRule& rule, const CalibratedTarget& target) {
  return expected_brier_loss(rule.probs, target.pstar);
}

}  // namespace fairbandit
