#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "fairbandit/config.hpp"
#include "fairbandit/environment.hpp"

namespace fairbandit {

/// Per-round fairness accounting for one replication.
struct RegretTrace {
  Eigen::VectorXd regret;      // R_f(t) per round, against the emitted rule
  Eigen::VectorXd cumulative;  // prefix sums of `regret`
  /// max(0, -min slack) of the objective audit (true reward distributions).
  Eigen::VectorXd objective_violation;
  Eigen::VectorXi objective_violated;  // 1 when any pair violated this round
  /// Minimum slack of the subjective audit (posterior marginals); NaN when the
  /// algorithm keeps no Beta posterior (dueling, non-Bernoulli environments).
  Eigen::VectorXd subjective_min_slack;
  Eigen::VectorXi subjective_violated;

  bool any_objective_violation() const { return objective_violated.any(); }
  bool any_subjective_violation() const { return subjective_violated.any(); }
};

struct ReplicationResult {
  int index = 0;
  History history;
  RegretTrace trace;
  /// Number of rounds played in the exploration phase.
  long exploration_rounds = 0;

  bool operator==(const ReplicationResult& o) const {
    return index == o.index && history == o.history && exploration_rounds == o.exploration_rounds &&
           trace.regret == o.trace.regret && trace.objective_violation == o.trace.objective_violation;
  }
};

struct SummaryReport {
  std::vector<double> final_regret;  // R_{f,T} per replication
  double mean_final_regret = 0.0;
  double stderr_final_regret = 0.0;
  std::vector<long> exploration_rounds;
  double mean_exploration_rounds = 0.0;
  long max_exploration_rounds = 0;
  std::vector<long> objective_violation_rounds;  // per replication
  int objective_violating_replications = 0;
  double objective_violation_probability = 0.0;
  std::vector<long> subjective_violation_rounds;
  int subjective_violating_replications = 0;
  double subjective_violation_probability = 0.0;
  /// Least-squares slope of ln mean R_f(t) against ln t over [s, 10 s] where
  /// s = max(1, longest exploration phase); absent when T < 10 s.
  std::optional<double> regret_growth_slope;
  /// Mean per-round regret over the last 10% of rounds, averaged over replications.
  double tail_mean_regret = 0.0;
  /// Plot table: mean cumulative regret and its standard error per round.
  Eigen::VectorXd mean_cumulative;
  Eigen::VectorXd stderr_cumulative;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ReplicationResult> replications;
  SummaryReport summary;
};

/// Calibrated target of the environment (enumerated Pr*, or nu / sum nu for PL).
CalibratedTarget environment_target(const Environment& env);
/// Pairwise objective divergences of the environment.
Eigen::MatrixXd environment_divergence(const Environment& env);

/// Plays T rounds of the configured algorithm on stream (seed, index).
ReplicationResult run_replication(const ExperimentConfig& config, int index);

/// Runs all replications (concurrently when threads != 1) and aggregates
/// them in replication-index order.
ExperimentResult run_experiment(const ExperimentConfig& config);

SummaryReport summarize(const std::vector<ReplicationResult>& replications, long horizon);

/// Least-squares slope of ln y against ln t over 64 log-spaced rounds in
/// [first, last] (1-based, y indexed from round 1); points with y <= 0 are skipped.
double log_log_slope(const Eigen::Ref<const Eigen::VectorXd>& y, long first, long last);

}  // namespace fairbandit
