#pragma once

// Reference computations that share no code with the library paths they check.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "fairbandit/environment.hpp"
#include "fairbandit/rng.hpp"

namespace fairbandit::testing {

// SD_TS rule by a per-arm route: arm i wins when it realizes 1 and shares the
// win with the s other arms that also realize 1, or when nobody realizes 1.
inline Eigen::VectorXd sdts_rule_by_counts(const Eigen::VectorXd& m) {
  const int k = static_cast<int>(m.size());
  Eigen::VectorXd out(k);
  double all_zero = 1.0;
  for (int a = 0; a < k; ++a) all_zero *= 1.0 - m(a);
  for (int i = 0; i < k; ++i) {
    std::vector<double> dist{1.0};  // distribution of the number of other 1s
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      std::vector<double> next(dist.size() + 1, 0.0);
      for (std::size_t s = 0; s < dist.size(); ++s) {
        next[s] += dist[s] * (1.0 - m(j));
        next[s + 1] += dist[s] * m(j);
      }
      dist = std::move(next);
    }
    double share = 0.0;
    for (std::size_t s = 0; s < dist.size(); ++s) share += dist[s] / static_cast<double>(s + 1);
    out(i) = m(i) * share + all_zero / k;
  }
  return out;
}

// Calibrated target by depth-first recursion over arms.
inline Eigen::VectorXd calibrated_target_recursive(const RewardModel& model) {
  const int k = model.arms();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
  std::vector<double> realized(static_cast<std::size_t>(k));
  std::function<void(int, double)> walk = [&](int arm, double weight) {
    if (arm == k) {
      double best = realized[0];
      for (double r : realized) best = std::max(best, r);
      int ties = 0;
      for (double r : realized) ties += r == best;
      for (int a = 0; a < k; ++a)
        if (realized[static_cast<std::size_t>(a)] == best) out(a) += weight / ties;
      return;
    }
    const auto& d = model.arm(arm);
    for (Eigen::Index s = 0; s < d.support.size(); ++s) {
      realized[static_cast<std::size_t>(arm)] = d.support(s);
      walk(arm + 1, weight * d.probs(s));
    }
  };
  walk(0, 1.0);
  return out;
}

// Four-sigma band for a binomial frequency.
inline double four_sigma(double p, double n) { return 4.0 * std::sqrt(std::max(p * (1.0 - p), 1e-300) / n); }

}  // namespace fairbandit::testing
