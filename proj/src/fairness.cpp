#include "fairbandit/fairness.hpp"

#include <map>
#include <string>

namespace fairbandit {

void DecisionRule::validate() const {
  if (!is_probability_vector(probs)) throw UsageError("decision rule is not a probability vector");
}

void CalibratedTarget::validate() const {
  if (!is_probability_vector(pstar)) throw UsageError("calibrated target is not a probability vector");
}

void FairnessSpec::validate() const {
  if (!(epsilon1 >= 0.0) || !(epsilon2 >= 0.0)) throw UsageError("fairness spec: epsilons must be nonnegative");
  if (!(delta >= 0.0 && delta <= 1.0)) throw UsageError("fairness spec: delta must lie in [0,1]");
}

double tv_finite(const FiniteDistribution& a, const FiniteDistribution& b) {
  std::map<double, double> diff;
  for (Eigen::Index i = 0; i < a.support.size(); ++i) diff[a.support(i)] += a.probs(i);
  for (Eigen::Index i = 0; i < b.support.size(); ++i) diff[b.support(i)] -= b.probs(i);
  double l1 = 0.0;
  for (const auto& [value, d] : diff) l1 += std::abs(d);
  return 0.5 * l1;
}

Eigen::MatrixXd tv_matrix(const RewardModel& model) {
  const int k = model.arms();
  if (model.is_bernoulli()) return tv_matrix_bernoulli(model.bernoulli_means());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) d(i, j) = d(j, i) = tv_finite(model.arm(i), model.arm(j));
  return d;
}

CalibratedTarget calibrated_target(const RewardModel& model, long max_outcomes) {
  const int k = model.arms();
  long outcomes = 1;
  for (const auto& arm : model.distributions()) {
    outcomes *= arm.support.size();
    if (outcomes > max_outcomes)
      throw CapacityError("calibrated_target: joint outcome space exceeds " + std::to_string(max_outcomes) +
                          " points; use calibrated_target_mc");
  }

  // Odometer over the product of supports.
  std::vector<Eigen::Index> digit(static_cast<std::size_t>(k), 0);
  Eigen::VectorXd pstar = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd realized(k);
  for (long n = 0; n < outcomes; ++n) {
    double weight = 1.0;
    for (int a = 0; a < k; ++a) {
      const auto& d = model.arm(a);
      weight *= d.probs(digit[static_cast<std::size_t>(a)]);
      realized(a) = d.support(digit[static_cast<std::size_t>(a)]);
    }
    if (weight > 0.0) {
      const double best = realized.maxCoeff();
      const auto ties = (realized.array() == best).count();
      for (int a = 0; a < k; ++a)
        if (realized(a) == best) pstar(a) += weight / static_cast<double>(ties);
    }
    for (int a = 0; a < k; ++a) {
      auto& dg = digit[static_cast<std::size_t>(a)];
      if (++dg < model.arm(a).support.size()) break;
      dg = 0;
    }
  }
  return {pstar};
}

MonteCarloTarget calibrated_target_mc(const RewardModel& model, long samples, Rng& rng) {
  if (samples < 2) throw UsageError("calibrated_target_mc: need at least two samples");
  const int k = model.arms();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(k), sum_sq = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd realized(k), share(k);
  for (long n = 0; n < samples; ++n) {
    for (int a = 0; a < k; ++a) realized(a) = sample_reward(model, a, rng);
    const double best = realized.maxCoeff();
    const auto ties = static_cast<double>((realized.array() == best).count());
    for (int a = 0; a < k; ++a) share(a) = realized(a) == best ? 1.0 / ties : 0.0;
    sum += share;
    sum_sq += share.cwiseProduct(share);
  }
  MonteCarloTarget out;
  out.samples = samples;
  const double n = static_cast<double>(samples);
  out.estimate.pstar = sum / n;
  const Eigen::VectorXd var = ((sum_sq / n) - out.estimate.pstar.cwiseProduct(out.estimate.pstar)) * (n / (n - 1.0));
  out.standard_error = (var.cwiseMax(0.0) / n).cwiseSqrt();
  return out;
}

}  // namespace fairbandit
