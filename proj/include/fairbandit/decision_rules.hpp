#pragma once

#include <optional>

#include <Eigen/Core>

#include "fairbandit/environment.hpp"
#include "fairbandit/posterior.hpp"
#include "fairbandit/probability.hpp"
#include "fairbandit/rng.hpp"

namespace fairbandit {

/// Largest k for which the 2^k outcome enumeration is attempted.
inline constexpr int kDefaultEnumerationArms = 20;

/// Argmax of `values` with uniform tie-breaking over exactly equal maxima.
/// Always consumes one engine output for the tie-break.
template <typename Derived>
int argmax_random_tie(const Eigen::MatrixBase<Derived>& values, Rng& rng) {
  const auto best = values.maxCoeff();
  int ties = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) ties += values(i) == best;
  auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(ties)));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) == best && pick-- == 0) return static_cast<int>(i);
  }
  return 0;
}

/// One SD_TS decision: theta_a ~ Beta(S_a, F_a), r_a ~ Bernoulli(theta_a) for every
/// arm (in arm order), then the argmax reward with a random tie-break.
int sdts_draw(const PosteriorState& state, Rng& rng);

/// Closed form of the SD_TS decision rule. The two-stage draw marginalizes to
/// independent Bernoulli(m_a) rewards, so the rule is obtained by enumerating
/// all 2^k reward vectors with a uniform split over the arms tied at the max.
/// Throws CapacityError when k > max_arms.
DecisionRule exact_sdts_rule(const Eigen::Ref<const Eigen::VectorXd>& marginal_means,
                             int max_arms = kDefaultEnumerationArms);

/// Convex mixture epsilon * base + (1 - epsilon) * uniform.
DecisionRule mixed_rule(const DecisionRule& base, double epsilon);

/// Plain Thompson sampling: argmax of one posterior draw per arm.
int standard_ts_draw(const PosteriorState& state, Rng& rng);

/// P(theta_i is the largest posterior draw) for each arm, by numerical quadrature
/// of pdf_i(x) * prod_{j != i} cdf_j(x) on [0,1], renormalized to sum to one.
DecisionRule standard_ts_rule(const PosteriorState& state);

struct FairSDTSConfig {
  double epsilon2 = 0.2;
  double delta = 0.05;
  /// Upper bound on max_{i,j} D(r_i || r_j); TV never exceeds 1.
  double divergence_bound = 1.0;
  std::optional<long> budget_override;
  /// Target smoothness constant; the exploitation rule is mixed with
  /// epsilon = epsilon1_target / 2 toward uniform when set.
  std::optional<double> epsilon1_target;

  void validate() const;
  /// ceil((2 * bound + 1)^2 / (2 * epsilon2^2) * ln(2 / delta)), or the override.
  long budget() const;
  /// Dueling budget: the same expression times k^2, or the override.
  long dueling_budget(int arms) const;
  /// Mixing weight implied by epsilon1_target (1 when unset).
  double mixing_epsilon() const;
};

struct StepResult {
  Phase phase = Phase::Exploration;
  DecisionRule rule;
  int arm = 0;
};

/// One Fair_SD_TS round. Explores (uniform over all arms) while any arm has
/// at most budget() pulls; otherwise plays the exact SD_TS rule built from the
/// posterior marginals, optionally mixed. One engine output for the arm draw.
StepResult fair_sdts_step(const PosteriorState& state, const FairSDTSConfig& config,
                          const Eigen::Ref<const Eigen::VectorXi>& pull_counts, Rng& rng);

}  // namespace fairbandit
