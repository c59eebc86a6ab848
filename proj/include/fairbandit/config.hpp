#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "fairbandit/decision_rules.hpp"
#include "fairbandit/environment.hpp"
#include "fairbandit/fairness.hpp"

namespace fairbandit {

enum class Algorithm { SDTS, FairSDTS, FairSDDTS, StandardTS, Uniform, Fixed };

std::string_view to_string(Algorithm a);
/// Accepts sdts | fair_sdts | fair_sd_dts | standard_ts | uniform | fixed.
Algorithm parse_algorithm(std::string_view name);

using Environment = std::variant<RewardModel, PLModel>;

int arm_count(const Environment& env);

/// Everything needed to run one experiment.
///
/// Config files are flat `key = value` lines; `#` starts a comment and
/// blank lines are ignored. Keys:
///
///   algorithm        sdts | fair_sdts | fair_sd_dts | standard_ts | uniform | fixed
///   theta            comma-separated Bernoulli parameters
///   arm.<i>          finite support for arm i as `value:prob, value:prob, ...`
///   nu               comma-separated Plackett-Luce qualities
///   horizon          rounds per replication (T >= 1)
///   replications     R >= 1
///   seed             master seed (unsigned 64-bit)
///   epsilon2, delta  Fair_SD_TS / Fair_SD_DTS parameters
///   divergence_bound upper bound on max TV between arms (default 1)
///   budget           explicit exploration budget C (overrides the formula)
///   epsilon1_target  mix the exploitation rule toward uniform for this smoothness constant
///   mixing           mixing weight for sdts (1 = no mixing)
///   fixed_arm        arm played by the `fixed` policy
///   prior            Beta prior pseudo-count (default 0.5, Jeffreys)
///   audit_eps1       smooth-fairness audit epsilon1 (default 2)
///   audit_eps2       audit epsilon2 (default 2 * epsilon2 for fair_*, else 0)
///   threads          worker threads (0 = hardware concurrency)
///   out              output directory
///
/// Exactly one of theta / arm.<i> / nu must be given.
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::FairSDTS;
  Environment environment = RewardModel::bernoulli(Eigen::Vector2d(0.5, 0.5));
  long horizon = 1000;
  int replications = 1;
  std::uint64_t seed = 0;
  FairSDTSConfig fair;
  FairnessSpec audit{2.0, 0.0, 0.05};
  double mixing = 1.0;
  int fixed_arm = 0;
  double prior = kJeffreysPrior;
  int threads = 0;
  std::optional<std::filesystem::path> out_dir;

  /// Throws UsageError for inconsistent settings (e.g. a dueling algorithm on a stochastic environment).
  void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses "0.9,0.5,0.4".
Eigen::VectorXd parse_real_list(std::string_view text);
/// Parses "0:0.6, 2:0.4".
FiniteDistribution parse_distribution(std::string_view text);

}  // namespace fairbandit
