#pragma once

#include <Eigen/Core>

#include "fairbandit/rng.hpp"

namespace fairbandit {

/// Jeffreys prior pseudo-count for a Bernoulli parameter.
inline constexpr double kJeffreysPrior = 0.5;

/// Per-arm Beta(S, F) belief with pull counts. S + F = 2 * prior + n per arm.
class PosteriorState {
 public:
  explicit PosteriorState(int arms, double prior = kJeffreysPrior);

  /// Arbitrary Beta parameters per arm (e.g. near-degenerate beliefs in tests).
  /// Pull counts are set to max(0, round(S + F - 2 * prior)).
  static PosteriorState from_parameters(const Eigen::Ref<const Eigen::VectorXd>& successes,
                                        const Eigen::Ref<const Eigen::VectorXd>& failures,
                                        double prior = kJeffreysPrior);

  int arms() const { return static_cast<int>(successes_.size()); }
  double prior() const { return prior_; }

  /// Conjugate update; reward must be exactly 0 or 1.
  void update(int arm, double reward);

  double successes(int arm) const;
  double failures(int arm) const;
  long pulls(int arm) const;
  const Eigen::VectorXd& successes() const { return successes_; }
  const Eigen::VectorXd& failures() const { return failures_; }
  const Eigen::VectorXi& pulls() const { return pulls_; }
  long total_pulls() const { return pulls_.sum(); }

  /// Mean of the posterior-marginal reward distribution, S / (S + F).
  double marginal_mean(int arm) const;
  Eigen::VectorXd marginal_means() const;

  /// One Beta(S, F) draw (see Rng::beta for the draw contract).
  double sample_theta(int arm, Rng& rng) const;

  bool operator==(const PosteriorState&) const = default;

 private:
  void check_arm(int arm) const;

  double prior_;
  Eigen::VectorXd successes_;
  Eigen::VectorXd failures_;
  Eigen::VectorXi pulls_;
};

/// Value-returning form of PosteriorState::update.
inline PosteriorState updated(PosteriorState state, int arm, double reward) {
  state.update(arm, reward);
  return state;
}

}  // namespace fairbandit
