#pragma once

#include <Eigen/Core>

namespace fairbandit {

/// Tolerance on the sum of a probability vector.
inline constexpr double kSumTolerance = 1e-12;

/// True when every entry is in [0,1] and the entries sum to one within `tol`.
template <typename Derived>
bool is_probability_vector(const Eigen::MatrixBase<Derived>& v, double tol = kSumTolerance) {
  if (v.size() == 0) return false;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(v(i) >= 0.0 && v(i) <= 1.0)) return false;
  const double s = v.sum();
  return s >= 1.0 - tol && s <= 1.0 + tol;
}

/// pi_t: the distribution over arms an algorithm plays from in one round.
struct DecisionRule {
  Eigen::VectorXd probs;

  static DecisionRule uniform(int arms) { return {Eigen::VectorXd::Constant(arms, 1.0 / arms)}; }
  int arms() const { return static_cast<int>(probs.size()); }
  double operator()(int i) const { return probs(i); }
  /// Throws UsageError unless probs is a probability vector.
  void validate() const;
};

/// Pr*(a): probability that arm a has the highest realized reward, ties split uniformly.
struct CalibratedTarget {
  Eigen::VectorXd pstar;

  int arms() const { return static_cast<int>(pstar.size()); }
  double operator()(int i) const { return pstar(i); }
  void validate() const;
};

}  // namespace fairbandit
