#pragma once

#include <vector>

#include <Eigen/Core>

#include "fairbandit/decision_rules.hpp"
#include "fairbandit/environment.hpp"
#include "fairbandit/probability.hpp"
#include "fairbandit/rng.hpp"

namespace fairbandit {

/// nu_i / (nu_i + nu_j).
double pl_pair_prob(const PLModel& model, int i, int j);

/// Full matrix of pairwise win probabilities (diagonal 1/2).
Eigen::MatrixXd pl_pair_matrix(const PLModel& model);

/// A total order over arms: order[r] is the arm at position r (position 0 is best).
struct Ranking {
  std::vector<int> order;

  /// position_of()[arm] is the arm's position in `order`.
  std::vector<int> position_of() const;
  bool is_permutation(int arms) const;
};

/// Sequential proportional selection without replacement. k - 1 engine outputs.
Ranking pl_rank_sample(const PLModel& model, Rng& rng);

/// prod_r nu_{order[r]} / sum_{s >= r} nu_{order[s]}.
double pl_rank_prob(const PLModel& model, const Ranking& ranking);

/// P(rank(1) = i) = nu_i / sum_j nu_j.
CalibratedTarget pl_rank1_exact(const PLModel& model);

/// Duel counts and wins; wins(i, j) counts duels between i and j that i won.
class PairwiseStats {
 public:
  explicit PairwiseStats(int arms);

  int arms() const { return static_cast<int>(counts_.rows()); }
  /// Records one duel between i and j; `outcome` is 1 when i won.
  void update(int i, int j, int outcome);

  long count(int i, int j) const;
  long wins(int i, int j) const;
  /// wins(i, j) / count(i, j); throws StateError when the pair has never dueled.
  double ptilde(int i, int j) const;
  /// Smallest count over unordered pairs.
  long min_pair_count() const;

  const Eigen::MatrixXi& counts() const { return counts_; }
  const Eigen::MatrixXi& win_matrix() const { return wins_; }

  bool operator==(const PairwiseStats&) const = default;

 private:
  void check_pair(int i, int j) const;

  Eigen::MatrixXi counts_;
  Eigen::MatrixXi wins_;
};

/// Rank-1 probabilities from a pairwise win matrix: quality ratios are
/// read off as p_ji / (1 - p_ji), then P(i first) = 1 / (1 + sum_{j != i} nu_j / nu_i).
/// The result is renormalized to sum to one; for a consistent (exact PL)
/// matrix the normalization is a no-op.
Eigen::VectorXd rank1_from_pairwise(const Eigen::Ref<const Eigen::MatrixXd>& p);

struct Rank1Estimate {
  CalibratedTarget target;
  /// True when some empirical rate was moved off {0, 1}.
  bool clamped = false;
};

/// Rank-1 estimate from duel statistics. Each empirical rate is clamped into
/// [1/(n+2), 1 - 1/(n+2)] first so every ratio stays finite.
/// Throws StateError if any off-diagonal pair has no duels.
Rank1Estimate estimate_rank1(const PairwiseStats& stats);

struct DuelStep {
  Phase phase = Phase::Exploration;
  DecisionRule rule;
  ArmPair pair;
};

/// One Fair_SD_DTS round. Explores (uniform over the k(k-1)/2 unordered pairs,
/// one engine output) while any pair has at most dueling_budget(k) duels;
/// otherwise the rule is the estimated rank-1 distribution, the first arm is
/// drawn from it and the second from the rule restricted to the other arms
/// (two engine outputs). The caller records the duel outcome in `stats`.
DuelStep fair_sd_dts_step(const PairwiseStats& stats, const FairSDTSConfig& config, Rng& rng);

struct Lemma1Probe {
  double max_deviation = 0.0;
  double mean_deviation = 0.0;
  /// max_deviation / (k * epsilon); 0 when epsilon is 0.
  double fitted_constant = 0.0;
};

/// Perturbs every p_ij (i < j) by an independent Uniform[-epsilon, epsilon]
/// amount (p_ji = 1 - p_ij), rebuilds the rank-1 vector with
/// rank1_from_pairwise and records max_i |estimate_i - exact_i| per trial.
Lemma1Probe lemma1_probe(const PLModel& model, double epsilon, int trials, Rng& rng);

/// Total variation between the latent reward distributions of two PL arms
/// under the Gumbel random-utility representation (utility log nu + Gumbel(0,1)).
/// With rho = nu_i / nu_j: rho^(-1/(rho-1)) - rho^(-rho/(rho-1)) for rho > 1.
double pl_reward_tv(double nu_i, double nu_j);

/// Pairwise pl_reward_tv matrix.
Eigen::MatrixXd pl_tv_matrix(const PLModel& model);

}  // namespace fairbandit
