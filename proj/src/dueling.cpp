#include "fairbandit/dueling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairbandit/errors.hpp"

namespace fairbandit {

double pl_pair_prob(const PLModel& model, int i, int j) {
  if (i == j) throw UsageError("pl_pair_prob: arms must differ");
  if (i < 0 || j < 0 || i >= model.arms() || j >= model.arms()) throw UsageError("pl_pair_prob: arm out of range");
  return model.nu()(i) / (model.nu()(i) + model.nu()(j));
}

Eigen::MatrixXd pl_pair_matrix(const PLModel& model) {
  const int k = model.arms();
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(k, k, 0.5);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) p(i, j) = pl_pair_prob(model, i, j);
  return p;
}

std::vector<int> Ranking::position_of() const {
  std::vector<int> pos(order.size(), -1);
  for (std::size_t r = 0; r < order.size(); ++r) pos[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  return pos;
}

bool Ranking::is_permutation(int arms) const {
  if (static_cast<int>(order.size()) != arms) return false;
  std::vector<bool> seen(order.size(), false);
  for (int a : order) {
    if (a < 0 || a >= arms || seen[static_cast<std::size_t>(a)]) return false;
    seen[static_cast<std::size_t>(a)] = true;
  }
  return true;
}

Ranking pl_rank_sample(const PLModel& model, Rng& rng) {
  const int k = model.arms();
  Eigen::VectorXd remaining = model.nu();
  Ranking r;
  r.order.reserve(static_cast<std::size_t>(k));
  for (int pos = 0; pos + 1 < k; ++pos) {
    const int pick = rng.categorical(remaining / remaining.sum());
    r.order.push_back(pick);
    remaining(pick) = 0.0;
  }
  for (int a = 0; a < k; ++a)
    if (remaining(a) > 0.0) r.order.push_back(a);
  return r;
}

double pl_rank_prob(const PLModel& model, const Ranking& ranking) {
  const int k = model.arms();
  if (!ranking.is_permutation(k)) throw UsageError("pl_rank_prob: ranking is not a permutation of the arms");
  double tail = model.nu().sum();
  double prob = 1.0;
  for (int pos = 0; pos < k; ++pos) {
    const double nu = model.nu()(ranking.order[static_cast<std::size_t>(pos)]);
    prob *= nu / tail;
    tail -= nu;
  }
  return prob;
}

CalibratedTarget pl_rank1_exact(const PLModel& model) { return {model.nu() / model.nu().sum()}; }

PairwiseStats::PairwiseStats(int arms) : counts_(Eigen::MatrixXi::Zero(arms, arms)), wins_(Eigen::MatrixXi::Zero(arms, arms)) {
  if (arms < 2) throw UsageError("pairwise statistics need at least two arms");
}

void PairwiseStats::check_pair(int i, int j) const {
  if (i == j) throw UsageError("pairwise statistics: arms must differ");
  if (i < 0 || j < 0 || i >= arms() || j >= arms()) throw UsageError("pairwise statistics: arm out of range");
}

void PairwiseStats::update(int i, int j, int outcome) {
  check_pair(i, j);
  if (outcome != 0 && outcome != 1) throw UsageError("duel outcome must be 0 or 1");
  counts_(i, j) += 1;
  counts_(j, i) += 1;
  if (outcome == 1) {
    wins_(i, j) += 1;
  } else {
    wins_(j, i) += 1;
  }
}

long PairwiseStats::count(int i, int j) const {
  check_pair(i, j);
  return counts_(i, j);
}

long PairwiseStats::wins(int i, int j) const {
  check_pair(i, j);
  return wins_(i, j);
}

double PairwiseStats::ptilde(int i, int j) const {
  check_pair(i, j);
  if (counts_(i, j) == 0)
    throw StateError("empirical win rate of arms " + std::to_string(i) + " and " + std::to_string(j) +
                     " is undefined before their first duel");
  return static_cast<double>(wins_(i, j)) / counts_(i, j);
}

long PairwiseStats::min_pair_count() const {
  long lo = std::numeric_limits<long>::max();
  for (int i = 0; i < arms(); ++i)
    for (int j = i + 1; j < arms(); ++j) lo = std::min<long>(lo, counts_(i, j));
  return lo;
}

Eigen::VectorXd rank1_from_pairwise(const Eigen::Ref<const Eigen::MatrixXd>& p) {
  const Eigen::Index k = p.rows();
  if (p.cols() != k || k < 2) throw UsageError("rank1_from_pairwise: need a square matrix with k >= 2");
  Eigen::VectorXd out(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double ratio_sum = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j == i) continue;
      const double pji = p(j, i);
      if (!(pji > 0.0 && pji < 1.0)) throw UsageError("rank1_from_pairwise: win rates must lie strictly in (0,1)");
      ratio_sum += pji / (1.0 - pji);
    }
    out(i) = 1.0 / (1.0 + ratio_sum);
  }
  return out / out.sum();
}

Rank1Estimate estimate_rank1(const PairwiseStats& stats) {
  const int k = stats.arms();
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(k, k, 0.5);
  Rank1Estimate est;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const double raw = stats.ptilde(i, j);
      const double guard = 1.0 / (static_cast<double>(stats.count(i, j)) + 2.0);
      const double clamped = std::clamp(raw, guard, 1.0 - guard);
      est.clamped = est.clamped || clamped != raw;
      p(i, j) = clamped;
    }
  }
  est.target.pstar = rank1_from_pairwise(p);
  return est;
}

DuelStep fair_sd_dts_step(const PairwiseStats& stats, const FairSDTSConfig& config, Rng& rng) {
  const int k = stats.arms();
  DuelStep step;
  if (stats.min_pair_count() <= config.dueling_budget(k)) {
    step.phase = Phase::Exploration;
    step.rule = DecisionRule::uniform(k);
    const auto pairs = static_cast<std::uint64_t>(k) * (k - 1) / 2;
    auto index = static_cast<long>(rng.below(pairs));
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        if (index-- == 0) {
          step.pair = {i, j};
          return step;
        }
      }
    }
    return step;
  }
  step.phase = Phase::Exploitation;
  step.rule = {estimate_rank1(stats).target.pstar};
  if (config.epsilon1_target) step.rule = mixed_rule(step.rule, config.mixing_epsilon());
  const int first = rng.categorical(step.rule.probs);
  Eigen::VectorXd rest = step.rule.probs;
  rest(first) = 0.0;
  const int second = rest.sum() > 0.0 ? rng.categorical(rest / rest.sum())
                                      : (first + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k - 1)))) % k;
  step.pair = {first, second};
  return step;
}

Lemma1Probe lemma1_probe(const PLModel& model, double epsilon, int trials, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw UsageError("lemma1_probe: epsilon must lie in [0, 0.5)");
  if (trials < 1) throw UsageError("lemma1_probe: need at least one trial");
  const int k = model.arms();
  const Eigen::MatrixXd exact_p = pl_pair_matrix(model);
  const Eigen::VectorXd exact = pl_rank1_exact(model).pstar;
  Lemma1Probe probe;
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXd p = exact_p;
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        const double shift = epsilon * (2.0 * rng.uniform() - 1.0);
        p(i, j) = std::clamp(exact_p(i, j) + shift, 1e-12, 1.0 - 1e-12);
        p(j, i) = 1.0 - p(i, j);
      }
    }
    const double dev = (rank1_from_pairwise(p) - exact).cwiseAbs().maxCoeff();
    probe.max_deviation = std::max(probe.max_deviation, dev);
    total += dev;
  }
  probe.mean_deviation = total / trials;
  probe.fitted_constant = epsilon > 0.0 ? probe.max_deviation / (k * epsilon) : 0.0;
  return probe;
}

double pl_reward_tv(double nu_i, double nu_j) {
  if (!(nu_i > 0.0 && nu_j > 0.0)) throw UsageError("pl_reward_tv: qualities must be positive");
  const double rho = std::max(nu_i, nu_j) / std::min(nu_i, nu_j);
  if (rho == 1.0) return 0.0;
  const double log_rho = std::log(rho);
  return std::exp(-log_rho / (rho - 1.0)) - std::exp(-rho * log_rho / (rho - 1.0));
}

Eigen::MatrixXd pl_tv_matrix(const PLModel& model) {
  const int k = model.arms();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) d(i, j) = d(j, i) = pl_reward_tv(model.nu()(i), model.nu()(j));
  return d;
}

}  // namespace fairbandit
