#include "fairbandit/environment.hpp"

#include <cmath>
#include <string>

#include "fairbandit/errors.hpp"

namespace fairbandit {

FiniteDistribution FiniteDistribution::bernoulli(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw UsageError("Bernoulli parameter outside [0,1]");
  FiniteDistribution d;
  d.support = Eigen::Vector2d(0.0, 1.0);
  d.probs = Eigen::Vector2d(1.0 - theta, theta);
  return d;
}

FiniteDistribution FiniteDistribution::point_mass(double value) {
  FiniteDistribution d;
  d.support = Eigen::VectorXd::Constant(1, value);
  d.probs = Eigen::VectorXd::Ones(1);
  return d;
}

void FiniteDistribution::validate() const {
  if (support.size() == 0 || support.size() != probs.size())
    throw UsageError("finite distribution: support and probs must be non-empty and equal length");
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!(probs(i) >= 0.0 && probs(i) <= 1.0)) throw UsageError("finite distribution: prob outside [0,1]");
    if (!std::isfinite(support(i))) throw UsageError("finite distribution: non-finite support value");
    if (i > 0 && !(support(i) > support(i - 1)))
      throw UsageError("finite distribution: support must be strictly increasing");
  }
  if (std::abs(probs.sum() - 1.0) > 1e-12) throw UsageError("finite distribution: probs must sum to 1");
}

RewardModel::RewardModel(std::vector<FiniteDistribution> arms) : arms_(std::move(arms)) {
  if (arms_.size() < 2) throw UsageError("reward model needs at least two arms");
  for (const auto& a : arms_) a.validate();
}

RewardModel RewardModel::bernoulli(const Eigen::Ref<const Eigen::VectorXd>& theta) {
  std::vector<FiniteDistribution> arms;
  arms.reserve(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) arms.push_back(FiniteDistribution::bernoulli(theta(i)));
  return RewardModel(std::move(arms));
}

const FiniteDistribution& RewardModel::arm(int i) const {
  if (i < 0 || i >= arms()) throw UsageError("arm index " + std::to_string(i) + " out of range");
  return arms_[static_cast<std::size_t>(i)];
}

bool RewardModel::is_bernoulli() const {
  for (const auto& a : arms_)
    for (Eigen::Index s = 0; s < a.support.size(); ++s)
      if (a.support(s) != 0.0 && a.support(s) != 1.0) return false;
  return true;
}

Eigen::VectorXd RewardModel::bernoulli_means() const {
  if (!is_bernoulli()) throw UsageError("reward model is not Bernoulli");
  Eigen::VectorXd m(arms());
  for (int i = 0; i < arms(); ++i) m(i) = arms_[static_cast<std::size_t>(i)].mean();
  return m;
}

PLModel::PLModel(Eigen::VectorXd nu) : nu_(std::move(nu)) {
  if (nu_.size() < 2) throw UsageError("Plackett-Luce model needs at least two arms");
  for (Eigen::Index i = 0; i < nu_.size(); ++i)
    if (!(nu_(i) > 0.0) || !std::isfinite(nu_(i))) throw UsageError("Plackett-Luce qualities must be positive");
}

double sample_reward(const RewardModel& model, int arm, Rng& rng) {
  const FiniteDistribution& d = model.arm(arm);
  return d.support(rng.categorical(d.probs));
}

int sample_duel(const PLModel& model, int i, int j, Rng& rng) {
  if (i == j) throw UsageError("duel requires two distinct arms");
  if (i < 0 || j < 0 || i >= model.arms() || j >= model.arms()) throw UsageError("duel arm index out of range");
  const double p = model.nu()(i) / (model.nu()(i) + model.nu()(j));
  return rng.bernoulli(p) ? 1 : 0;
}

std::string_view to_string(Phase p) {
  return p == Phase::Exploration ? "exploration" : "exploitation";
}

void History::append(RoundRecord record) {
  const long expected = rounds_.empty() ? 1 : rounds_.back().t + 1;
  if (record.t != expected) throw UsageError("history rounds must be consecutive from t = 1");
  if (arms_ > 0) {
    auto valid = [this](int a) { return a >= 0 && a < arms_; };
    if (record.pair) {
      if (!valid(record.pair->first) || !valid(record.pair->second) || record.pair->first == record.pair->second)
        throw UsageError("dueling pair must be two distinct valid arms");
    } else if (!valid(record.arm)) {
      throw UsageError("round action out of range");
    }
  }
  rounds_.push_back(std::move(record));
}

}  // namespace fairbandit
