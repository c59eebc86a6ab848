#include "fairbandit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "fairbandit/decision_rules.hpp"
#include "fairbandit/dueling.hpp"
#include "fairbandit/errors.hpp"
#include "fairbandit/fairness.hpp"
#include "fairbandit/posterior.hpp"

namespace fairbandit {

CalibratedTarget environment_target(const Environment& env) {
  if (const auto* pl = std::get_if<PLModel>(&env)) return pl_rank1_exact(*pl);
  return calibrated_target(std::get<RewardModel>(env));
}

Eigen::MatrixXd environment_divergence(const Environment& env) {
  if (const auto* pl = std::get_if<PLModel>(&env)) return pl_tv_matrix(*pl);
  return tv_matrix(std::get<RewardModel>(env));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RegretTrace make_trace(long horizon) {
  RegretTrace tr;
  tr.regret = Eigen::VectorXd::Zero(horizon);
  tr.cumulative = Eigen::VectorXd::Zero(horizon);
  tr.objective_violation = Eigen::VectorXd::Zero(horizon);
  tr.objective_violated = Eigen::VectorXi::Zero(horizon);
  tr.subjective_min_slack = Eigen::VectorXd::Constant(horizon, kNaN);
  tr.subjective_violated = Eigen::VectorXi::Zero(horizon);
  return tr;
}

// Shared per-round bookkeeping: regret and both audits of the emitted rule.
class Accountant {
 public:
  Accountant(const ExperimentConfig& config, long horizon)
      : target_(environment_target(config.environment)),
        divergence_(environment_divergence(config.environment)),
        spec_(config.audit),
        trace_(make_trace(horizon)) {}

  void record(long t, const DecisionRule& rule, const PosteriorState* posterior) {
    const auto row = static_cast<Eigen::Index>(t - 1);
    trace_.regret(row) = fairness_regret_round(rule, target_);
    trace_.cumulative(row) = trace_.regret(row) + (row > 0 ? trace_.cumulative(row - 1) : 0.0);
    const SmoothAudit objective = smooth_audit(rule.probs, divergence_, spec_);
    trace_.objective_violation(row) = objective.max_violation();
    trace_.objective_violated(row) = objective.violated() ? 1 : 0;
    if (posterior != nullptr) {
      const SmoothAudit subjective = smooth_audit(rule.probs, tv_matrix_bernoulli(posterior->marginal_means()), spec_);
      trace_.subjective_min_slack(row) = subjective.min_slack;
      trace_.subjective_violated(row) = subjective.violated() ? 1 : 0;
    }
  }

  RegretTrace take() { return std::move(trace_); }

 private:
  CalibratedTarget target_;
  Eigen::MatrixXd divergence_;
  FairnessSpec spec_;
  RegretTrace trace_;
};

ReplicationResult run_stochastic(const ExperimentConfig& config, const RewardModel& model, int index) {
  const int k = model.arms();
  Rng rng = Rng::for_replication(config.seed, static_cast<std::uint64_t>(index));
  const bool bernoulli = model.is_bernoulli();
  PosteriorState posterior(k, config.prior);
  Accountant accountant(config, config.horizon);
  ReplicationResult out;
  out.index = index;
  out.history = History(k);
  out.history.reserve(static_cast<std::size_t>(config.horizon));

  for (long t = 1; t <= config.horizon; ++t) {
    RoundRecord rec;
    rec.t = t;
    rec.phase = Phase::Exploitation;
    DecisionRule rule;
    switch (config.algorithm) {
      case Algorithm::SDTS: {
        rule = exact_sdts_rule(posterior.marginal_means());
        if (config.mixing < 1.0) {
          rule = mixed_rule(rule, config.mixing);
          rec.arm = rng.categorical(rule.probs);
        } else {
          rec.arm = sdts_draw(posterior, rng);
        }
        break;
      }
      case Algorithm::FairSDTS: {
        StepResult step = fair_sdts_step(posterior, config.fair, posterior.pulls(), rng);
        rule = std::move(step.rule);
        rec.arm = step.arm;
        rec.phase = step.phase;
        break;
      }
      case Algorithm::StandardTS:
        rule = standard_ts_rule(posterior);
        rec.arm = standard_ts_draw(posterior, rng);
        break;
      case Algorithm::Uniform:
        rule = DecisionRule::uniform(k);
        rec.arm = rng.categorical(rule.probs);
        break;
      case Algorithm::Fixed:
        rule.probs = Eigen::VectorXd::Zero(k);
        rule.probs(config.fixed_arm) = 1.0;
        rec.arm = config.fixed_arm;
        break;
      case Algorithm::FairSDDTS:
        throw UsageError("fair_sd_dts needs a Plackett-Luce environment");
    }
    if (rec.phase == Phase::Exploration) ++out.exploration_rounds;
    accountant.record(t, rule, bernoulli ? &posterior : nullptr);
    rec.feedback = sample_reward(model, rec.arm, rng);
    if (bernoulli) posterior.update(rec.arm, rec.feedback);
    rec.rule = std::move(rule.probs);
    out.history.append(std::move(rec));
  }
  out.trace = accountant.take();
  return out;
}

ReplicationResult run_dueling(const ExperimentConfig& config, const PLModel& model, int index) {
  const int k = model.arms();
  Rng rng = Rng::for_replication(config.seed, static_cast<std::uint64_t>(index));
  PairwiseStats stats(k);
  Accountant accountant(config, config.horizon);
  ReplicationResult out;
  out.index = index;
  out.history = History(k);
  out.history.reserve(static_cast<std::size_t>(config.horizon));

  for (long t = 1; t <= config.horizon; ++t) {
    DuelStep step = fair_sd_dts_step(stats, config.fair, rng);
    if (step.phase == Phase::Exploration) ++out.exploration_rounds;
    accountant.record(t, step.rule, nullptr);
    const int outcome = sample_duel(model, step.pair.first, step.pair.second, rng);
    stats.update(step.pair.first, step.pair.second, outcome);
    RoundRecord rec;
    rec.t = t;
    rec.pair = step.pair;
    rec.feedback = outcome;
    rec.rule = std::move(step.rule.probs);
    rec.phase = step.phase;
    out.history.append(std::move(rec));
  }
  out.trace = accountant.take();
  return out;
}

}  // namespace

ReplicationResult run_replication(const ExperimentConfig& config, int index) {
  config.validate();
  if (index < 0) throw UsageError("replication index must be nonnegative");
  if (const auto* pl = std::get_if<PLModel>(&config.environment)) return run_dueling(config, *pl, index);
  return run_stochastic(config, std::get<RewardModel>(config.environment), index);
}

double log_log_slope(const Eigen::Ref<const Eigen::VectorXd>& y, long first, long last) {
  if (first < 1 || last <= first || last > y.size()) throw UsageError("log_log_slope: bad round range");
  constexpr int kPoints = 64;
  std::vector<long> rounds;
  const double lf = std::log(static_cast<double>(first)), ll = std::log(static_cast<double>(last));
  for (int p = 0; p < kPoints; ++p) {
    const long t = std::lround(std::exp(lf + (ll - lf) * p / (kPoints - 1)));
    if (rounds.empty() || rounds.back() != t) rounds.push_back(std::clamp(t, first, last));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (long t : rounds) {
    const double v = y(t - 1);
    if (!(v > 0.0)) continue;
    const double x = std::log(static_cast<double>(t)), ly = std::log(v);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SummaryReport summarize(const std::vector<ReplicationResult>& reps, long horizon) {
  SummaryReport s;
  const auto r = static_cast<double>(reps.size());
  if (reps.empty()) return s;
  s.mean_cumulative = Eigen::VectorXd::Zero(horizon);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(horizon);
  const long tail_start = horizon - std::max<long>(1, horizon / 10);
  double tail_total = 0.0;
  for (const auto& rep : reps) {
    const RegretTrace& tr = rep.trace;
    s.final_regret.push_back(tr.cumulative(horizon - 1));
    s.exploration_rounds.push_back(rep.exploration_rounds);
    s.max_exploration_rounds = std::max(s.max_exploration_rounds, rep.exploration_rounds);
    s.objective_violation_rounds.push_back(tr.objective_violated.sum());
    s.subjective_violation_rounds.push_back(tr.subjective_violated.sum());
    s.objective_violating_replications += tr.any_objective_violation() ? 1 : 0;
    s.subjective_violating_replications += tr.any_subjective_violation() ? 1 : 0;
    s.mean_cumulative += tr.cumulative;
    sq += tr.cumulative.cwiseProduct(tr.cumulative);
    tail_total += tr.regret.tail(horizon - tail_start).mean();
  }
  s.mean_cumulative /= r;
  if (reps.size() > 1) {
    const Eigen::VectorXd var = ((sq / r) - s.mean_cumulative.cwiseProduct(s.mean_cumulative)) * (r / (r - 1.0));
    s.stderr_cumulative = (var.cwiseMax(0.0) / r).cwiseSqrt();
  } else {
    s.stderr_cumulative = Eigen::VectorXd::Zero(horizon);
  }
  s.mean_final_regret = s.mean_cumulative(horizon - 1);
  s.stderr_final_regret = s.stderr_cumulative(horizon - 1);
  double explore_total = 0.0;
  for (long e : s.exploration_rounds) explore_total += static_cast<double>(e);
  s.mean_exploration_rounds = explore_total / r;
  s.objective_violation_probability = s.objective_violating_replications / r;
  s.subjective_violation_probability = s.subjective_violating_replications / r;
  s.tail_mean_regret = tail_total / r;
  const long start = std::max<long>(1, s.max_exploration_rounds);
  if (horizon >= 10 * start && 10 * start > start) s.regret_growth_slope = log_log_slope(s.mean_cumulative, start, 10 * start);
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  result.replications.resize(static_cast<std::size_t>(config.replications));

  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(config.replications));
  if (workers == 1) {
    for (int i = 0; i < config.replications; ++i) result.replications[static_cast<std::size_t>(i)] = run_replication(config, i);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (int i = static_cast<int>(w); i < config.replications; i += static_cast<int>(workers))
              result.replications[static_cast<std::size_t>(i)] = run_replication(config, i);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  result.summary = summarize(result.replications, config.horizon);
  return result;
}

}  // namespace fairbandit
