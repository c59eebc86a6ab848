#include "fairbandit/decision_rules.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "fairbandit/errors.hpp"

namespace fairbandit {

int sdts_draw(const PosteriorState& state, Rng& rng) {
  Eigen::VectorXd realized(state.arms());
  for (int a = 0; a < state.arms(); ++a) {
    const double theta = state.sample_theta(a, rng);
    realized(a) = rng.bernoulli(theta) ? 1.0 : 0.0;
  }
  return argmax_random_tie(realized, rng);
}

DecisionRule exact_sdts_rule(const Eigen::Ref<const Eigen::VectorXd>& marginal_means, int max_arms) {
  const int k = static_cast<int>(marginal_means.size());
  if (k < 1) throw UsageError("exact_sdts_rule: no arms");
  if (k > max_arms)
    throw CapacityError("exact_sdts_rule: " + std::to_string(k) + " arms exceeds the enumeration cap of " +
                        std::to_string(max_arms) + "; estimate the rule by Monte Carlo over sdts_draw");
  for (int a = 0; a < k; ++a)
    if (!(marginal_means(a) >= 0.0 && marginal_means(a) <= 1.0))
      throw UsageError("exact_sdts_rule: marginal mean outside [0,1]");

  Eigen::VectorXd probs = Eigen::VectorXd::Zero(k);
  const std::uint32_t outcomes = 1u << k;
  for (std::uint32_t bits = 0; bits < outcomes; ++bits) {
    double weight = 1.0;
    for (int a = 0; a < k; ++a) weight *= (bits >> a) & 1u ? marginal_means(a) : 1.0 - marginal_means(a);
    if (weight == 0.0) continue;
    if (bits == 0) {
      probs.array() += weight / k;
      continue;
    }
    const double share = weight / std::popcount(bits);
    for (int a = 0; a < k; ++a)
      if ((bits >> a) & 1u) probs(a) += share;
  }
  return {probs};
}

DecisionRule mixed_rule(const DecisionRule& base, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw UsageError("mixed_rule: epsilon must lie in [0,1]");
  base.validate();
  const int k = base.arms();
  return {(epsilon * base.probs.array() + (1.0 - epsilon) / k).matrix()};
}

int standard_ts_draw(const PosteriorState& state, Rng& rng) {
  Eigen::VectorXd theta(state.arms());
  for (int a = 0; a < state.arms(); ++a) theta(a) = state.sample_theta(a, rng);
  return argmax_random_tie(theta, rng);
}

namespace {

struct BetaBelief {
  boost::math::beta_distribution<double> dist;
  double a, b, log_norm, mean, sd;

  BetaBelief(double s, double f)
      : dist(s, f),
        a(s),
        b(f),
        log_norm(std::lgamma(s + f) - std::lgamma(s) - std::lgamma(f)),
        mean(s / (s + f)),
        sd(std::sqrt(s * f / ((s + f) * (s + f) * (s + f + 1.0)))) {}

  double pdf(double x) const {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
  }
  double cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::cdf(dist, x);
  }
  // Bulk of the density; outside it the mass is negligible at double precision.
  double lo() const { return std::max(0.0, mean - kBulk * sd); }
  double hi() const { return std::min(1.0, mean + kBulk * sd); }

  static constexpr double kBulk = 14.0;
};

// 8-point Gauss-Legendre on [a, b] after x = a + (b - a) * g(u), where g
// squares toward a singular endpoint so x^(-1/2)-type blowups become bounded.
template <typename F>
double panel(const F& f, double a, double b, bool singular_lo, bool singular_hi) {
  static const auto& nodes = boost::math::quadrature::gauss<double, 8>::abscissa();
  static const auto& weights = boost::math::quadrature::gauss<double, 8>::weights();
  const double w = b - a;
  auto eval = [&](double u) {  // u in [0, 1]
    if (singular_lo) return f(a + w * u * u) * 2.0 * u * w;
    if (singular_hi) {
      const double v = 1.0 - u;
      return f(b - w * v * v) * 2.0 * v * w;
    }
    return f(a + w * u) * w;
  };
  double total = 0.0;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const double x = nodes[n];
    const double wt = weights[n] * 0.5;
    total += wt * eval(0.5 + 0.5 * x);
    if (x != 0.0) total += wt * eval(0.5 - 0.5 * x);
  }
  return total;
}

}  // namespace

DecisionRule standard_ts_rule(const PosteriorState& state) {
  const int k = state.arms();
  std::vector<BetaBelief> beliefs;
  beliefs.reserve(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) beliefs.emplace_back(state.successes()(a), state.failures()(a));

  // The integrand pdf_i * prod_j cdf_j vanishes below every other arm's bulk
  // and outside arm i's own bulk; panel edges track each arm's scale.
  constexpr std::array<double, 9> kEdges{-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0};
  Eigen::VectorXd probs(k);
  std::vector<double> edges;
  for (int i = 0; i < k; ++i) {
    const BetaBelief& me = beliefs[static_cast<std::size_t>(i)];
    double lo = me.lo();
    const double hi = me.hi();
    for (int j = 0; j < k; ++j)
      if (j != i) lo = std::max(lo, beliefs[static_cast<std::size_t>(j)].lo());
    if (!(lo < hi)) {
      probs(i) = 0.0;
      continue;
    }
    edges.assign({lo, hi});
    for (const BetaBelief& other : beliefs) {
      if (&other != &me && other.sd >= me.sd) continue;  // smooth on this arm's scale
      for (double c : kEdges) {
        const double e = other.mean + c * other.sd;
        if (e > lo && e < hi) edges.push_back(e);
      }
    }
    std::sort(edges.begin(), edges.end());
    auto integrand = [&](double x) {
      double v = me.pdf(x);
      for (int j = 0; j < k && v != 0.0; ++j)
        if (j != i) v *= beliefs[static_cast<std::size_t>(j)].cdf(x);
      return v;
    };
    double total = 0.0;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      const double a = edges[e], b = edges[e + 1];
      if (!(b > a)) continue;
      total += panel(integrand, a, b, a == 0.0 && me.a < 1.0, b == 1.0 && me.b < 1.0);
    }
    probs(i) = total;
  }
  probs /= probs.sum();
  return {probs};
}

void FairSDTSConfig::validate() const {
  if (!(epsilon2 > 0.0)) throw UsageError("epsilon2 must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must lie in (0,1)");
  if (!(divergence_bound > 0.0 && divergence_bound <= 1.0)) throw UsageError("divergence bound must lie in (0,1]");
  if (budget_override && *budget_override < 1) throw UsageError("budget override must be a positive integer");
  if (epsilon1_target && !(*epsilon1_target > 0.0 && *epsilon1_target <= 1.0))
    throw UsageError("epsilon1 target must lie in (0,1]");
}

long FairSDTSConfig::budget() const {
  if (budget_override) return *budget_override;
  const double spread = 2.0 * divergence_bound + 1.0;
  return static_cast<long>(std::ceil(spread * spread / (2.0 * epsilon2 * epsilon2) * std::log(2.0 / delta)));
}

long FairSDTSConfig::dueling_budget(int arms) const {
  if (budget_override) return *budget_override;
  const double spread = 2.0 * divergence_bound + 1.0;
  const double k2 = static_cast<double>(arms) * arms;
  return static_cast<long>(std::ceil(spread * spread * k2 / (2.0 * epsilon2 * epsilon2) * std::log(2.0 / delta)));
}

double FairSDTSConfig::mixing_epsilon() const { return epsilon1_target ? *epsilon1_target / 2.0 : 1.0; }

StepResult fair_sdts_step(const PosteriorState& state, const FairSDTSConfig& config,
                          const Eigen::Ref<const Eigen::VectorXi>& pull_counts, Rng& rng) {
  const int k = state.arms();
  if (pull_counts.size() != k) throw UsageError("fair_sdts_step: pull counts do not match arm count");
  const long budget = config.budget();
  const bool explore = (pull_counts.cast<long>().array() <= budget).any();
  StepResult step;
  if (explore) {
    step.phase = Phase::Exploration;
    step.rule = DecisionRule::uniform(k);
  } else {
    step.phase = Phase::Exploitation;
    step.rule = exact_sdts_rule(state.marginal_means());
    if (config.epsilon1_target) step.rule = mixed_rule(step.rule, config.mixing_epsilon());
  }
  step.arm = rng.categorical(step.rule.probs);
  return step;
}

}  // namespace fairbandit
