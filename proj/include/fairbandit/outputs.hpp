#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairbandit/fairness.hpp"
#include "fairbandit/harness.hpp"

namespace fairbandit {

/// Shortest round-trip decimal form of a double.
std::string format_real(double v);

/// Per-round table. Columns, in order:
///   replication,t,phase,action,reward,pi_0..pi_{k-1},regret_round,regret_cum,max_smooth_slack_violation
/// `action` is the arm index, or "i-j" for a duel (i is the arm whose win is
/// reported in `reward`).
void write_round_table(std::ostream& out, const std::vector<ReplicationResult>& replications);

/// Plot table: t,mean_regret_cum,stderr.
void write_regret_curve(std::ostream& out, const SummaryReport& summary);

nlohmann::json environment_to_json(const Environment& env);
Environment environment_from_json(const nlohmann::json& j);
nlohmann::json summary_to_json(const ExperimentResult& result);

struct OutputPaths {
  std::filesystem::path rounds;
  std::filesystem::path summary;
  std::filesystem::path curve;
};

/// Writes rounds.csv, summary.json and regret_curve.csv under `dir`
/// (created if missing). I/O errors are thrown with the offending path.
OutputPaths emit_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

struct TraceAudit {
  struct Replication {
    int replication = 0;
    long rounds = 0;
    long violating_rounds = 0;
    double max_violation = 0.0;
  };
  std::vector<Replication> replications;
  int violating_replications = 0;
  double violation_probability = 0.0;
};

/// Re-audits every rule stored in a per-round table against `divergence`.
TraceAudit audit_trace(std::istream& table, const Eigen::MatrixXd& divergence, const FairnessSpec& spec);
TraceAudit audit_trace(const std::filesystem::path& table, const Eigen::MatrixXd& divergence, const FairnessSpec& spec);

}  // namespace fairbandit
