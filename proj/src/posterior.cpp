#include "fairbandit/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairbandit/errors.hpp"

namespace fairbandit {

PosteriorState::PosteriorState(int arms, double prior)
    : prior_(prior),
      successes_(Eigen::VectorXd::Constant(arms, prior)),
      failures_(Eigen::VectorXd::Constant(arms, prior)),
      pulls_(Eigen::VectorXi::Zero(arms)) {
  if (arms < 1) throw UsageError("posterior needs at least one arm");
  if (!(prior > 0.0) || !std::isfinite(prior)) throw UsageError("Beta prior pseudo-count must be positive");
}

PosteriorState PosteriorState::from_parameters(const Eigen::Ref<const Eigen::VectorXd>& successes,
                                               const Eigen::Ref<const Eigen::VectorXd>& failures, double prior) {
  if (successes.size() != failures.size()) throw UsageError("posterior: parameter vectors differ in length");
  PosteriorState state(static_cast<int>(successes.size()), prior);
  for (Eigen::Index i = 0; i < successes.size(); ++i) {
    if (!(successes(i) > 0.0) || !(failures(i) > 0.0)) throw UsageError("Beta parameters must be positive");
    state.successes_(i) = successes(i);
    state.failures_(i) = failures(i);
    state.pulls_(i) = static_cast<int>(std::max(0.0, std::round(successes(i) + failures(i) - 2.0 * prior)));
  }
  return state;
}

void PosteriorState::check_arm(int arm) const {
  if (arm < 0 || arm >= arms()) throw UsageError("posterior arm index " + std::to_string(arm) + " out of range");
}

void PosteriorState::update(int arm, double reward) {
  check_arm(arm);
  if (reward == 1.0) {
    successes_(arm) += 1.0;
  } else if (reward == 0.0) {
    failures_(arm) += 1.0;
  } else {
    throw UsageError("Beta-Bernoulli update needs a reward of 0 or 1");
  }
  pulls_(arm) += 1;
}

double PosteriorState::successes(int arm) const {
  check_arm(arm);
  return successes_(arm);
}

double PosteriorState::failures(int arm) const {
  check_arm(arm);
  return failures_(arm);
}

long PosteriorState::pulls(int arm) const {
  check_arm(arm);
  return pulls_(arm);
}

double PosteriorState::marginal_mean(int arm) const {
  check_arm(arm);
  return successes_(arm) / (successes_(arm) + failures_(arm));
}

Eigen::VectorXd PosteriorState::marginal_means() const {
  return successes_.cwiseQuotient(successes_ + failures_);
}

double PosteriorState::sample_theta(int arm, Rng& rng) const {
  check_arm(arm);
  return rng.beta(successes_(arm), failures_(arm));
}

}  // namespace fairbandit
