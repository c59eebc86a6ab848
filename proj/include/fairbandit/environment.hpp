#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fairbandit/rng.hpp"

namespace fairbandit {

/// Reward distribution of a single arm with finite support.
/// `support` is strictly increasing; `probs` sums to one.
struct FiniteDistribution {
  Eigen::VectorXd support;
  Eigen::VectorXd probs;

  static FiniteDistribution bernoulli(double theta);
  static FiniteDistribution point_mass(double value);

  double mean() const { return support.dot(probs); }
  /// Throws UsageError when the invariants above do not hold.
  void validate() const;
};

/// Ground-truth stochastic environment: one finite distribution per arm, k >= 2.
class RewardModel {
 public:
  explicit RewardModel(std::vector<FiniteDistribution> arms);
  static RewardModel bernoulli(const Eigen::Ref<const Eigen::VectorXd>& theta);

  int arms() const { return static_cast<int>(arms_.size()); }
  const FiniteDistribution& arm(int i) const;
  const std::vector<FiniteDistribution>& distributions() const { return arms_; }

  /// True when every arm has support exactly {0, 1} (or a subset of it).
  bool is_bernoulli() const;
  /// Bernoulli parameters; throws UsageError for non-Bernoulli models.
  Eigen::VectorXd bernoulli_means() const;

 private:
  std::vector<FiniteDistribution> arms_;
};

/// Plackett-Luce environment for dueling feedback.
class PLModel {
 public:
  explicit PLModel(Eigen::VectorXd nu);

  int arms() const { return static_cast<int>(nu_.size()); }
  const Eigen::VectorXd& nu() const { return nu_; }

 private:
  Eigen::VectorXd nu_;
};

/// Draws one reward for `arm`. Consumes exactly one engine output
/// (inversion over the arm's support, in support order).
double sample_reward(const RewardModel& model, int arm, Rng& rng);

/// 1 when arm i beats arm j (prob nu_i/(nu_i+nu_j)), else 0. One engine output.
int sample_duel(const PLModel& model, int i, int j, Rng& rng);

enum class Phase { Exploration, Exploitation };
std::string_view to_string(Phase p);

/// Unordered dueling pair, stored with first < second is not required:
/// `first` is the arm whose win is reported by the duel indicator.
struct ArmPair {
  int first = 0;
  int second = 1;
  bool operator==(const ArmPair&) const = default;
};

struct RoundRecord {
  long t = 0;
  int arm = -1;                   // stochastic setting
  std::optional<ArmPair> pair;    // dueling setting
  double feedback = 0.0;          // reward, or duel indicator
  Eigen::VectorXd rule;           // decision rule used in this round
  Phase phase = Phase::Exploitation;

  bool operator==(const RoundRecord& o) const {
    return t == o.t && arm == o.arm && pair == o.pair && feedback == o.feedback &&
           rule.size() == o.rule.size() && rule == o.rule && phase == o.phase;
  }
};

/// Append-only sequence of rounds with t = 1, 2, ...
class History {
 public:
  History() = default;
  explicit History(int arms) : arms_(arms) {}

  /// Throws UsageError if round indices would not increase or actions are out of range.
  void append(RoundRecord record);

  const std::vector<RoundRecord>& rounds() const { return rounds_; }
  std::size_t size() const { return rounds_.size(); }
  void reserve(std::size_t n) { rounds_.reserve(n); }

  bool operator==(const History&) const = default;

 private:
  int arms_ = 0;
  std::vector<RoundRecord> rounds_;
};

}  // namespace fairbandit
