#include "fairbandit/outputs.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fairbandit/errors.hpp"

namespace fairbandit {

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf, ptr);
}

void write_round_table(std::ostream& out, const std::vector<ReplicationResult>& replications) {
  const int k = replications.empty() || replications.front().history.size() == 0
                    ? 0
                    : static_cast<int>(replications.front().history.rounds().front().rule.size());
  out << "replication,t,phase,action,reward";
  for (int a = 0; a < k; ++a) out << ",pi_" << a;
  out << ",regret_round,regret_cum,max_smooth_slack_violation\n";
  std::string line;
  for (const auto& rep : replications) {
    const auto& rounds = rep.history.rounds();
    for (std::size_t n = 0; n < rounds.size(); ++n) {
      const RoundRecord& r = rounds[n];
      const auto row = static_cast<Eigen::Index>(n);
      line.clear();
      line += std::to_string(rep.index);
      line += ',';
      line += std::to_string(r.t);
      line += ',';
      line += to_string(r.phase);
      line += ',';
      line += r.pair ? std::to_string(r.pair->first) + "-" + std::to_string(r.pair->second) : std::to_string(r.arm);
      line += ',';
      line += format_real(r.feedback);
      for (Eigen::Index a = 0; a < r.rule.size(); ++a) {
        line += ',';
        line += format_real(r.rule(a));
      }
      line += ',';
      line += format_real(rep.trace.regret(row));
      line += ',';
      line += format_real(rep.trace.cumulative(row));
      line += ',';
      line += format_real(rep.trace.objective_violation(row));
      line += '\n';
      out << line;
    }
  }
}

void write_regret_curve(std::ostream& out, const SummaryReport& summary) {
  out << "t,mean_regret_cum,stderr\n";
  for (Eigen::Index i = 0; i < summary.mean_cumulative.size(); ++i)
    out << (i + 1) << ',' << format_real(summary.mean_cumulative(i)) << ',' << format_real(summary.stderr_cumulative(i))
        << '\n';
}

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_std(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_stream(const std::ostream& out, const std::filesystem::path& path) {
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

nlohmann::json environment_to_json(const Environment& env) {
  nlohmann::json j;
  if (const auto* pl = std::get_if<PLModel>(&env)) {
    j["kind"] = "plackett_luce";
    j["nu"] = to_std(pl->nu());
    return j;
  }
  const auto& model = std::get<RewardModel>(env);
  if (model.is_bernoulli()) {
    j["kind"] = "bernoulli";
    j["theta"] = to_std(model.bernoulli_means());
    return j;
  }
  j["kind"] = "finite";
  j["arms"] = nlohmann::json::array();
  for (const auto& d : model.distributions())
    j["arms"].push_back({{"support", to_std(d.support)}, {"probs", to_std(d.probs)}});
  return j;
}

Environment environment_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "plackett_luce") return PLModel(from_std(j.at("nu").get<std::vector<double>>()));
  if (kind == "bernoulli") return RewardModel::bernoulli(from_std(j.at("theta").get<std::vector<double>>()));
  if (kind == "finite") {
    std::vector<FiniteDistribution> arms;
    for (const auto& a : j.at("arms"))
      arms.push_back({from_std(a.at("support").get<std::vector<double>>()), from_std(a.at("probs").get<std::vector<double>>())});
    return RewardModel(std::move(arms));
  }
  throw UsageError("unknown environment kind '" + kind + "'");
}

nlohmann::json summary_to_json(const ExperimentResult& result) {
  const ExperimentConfig& c = result.config;
  const SummaryReport& s = result.summary;
  nlohmann::json j;
  j["algorithm"] = std::string(to_string(c.algorithm));
  j["environment"] = environment_to_json(c.environment);
  j["horizon"] = c.horizon;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["fairness_spec"] = {{"epsilon1", c.audit.epsilon1}, {"epsilon2", c.audit.epsilon2}, {"delta", c.audit.delta}};
  if (c.algorithm == Algorithm::FairSDTS) j["exploration_budget"] = c.fair.budget();
  if (c.algorithm == Algorithm::FairSDDTS) j["exploration_budget"] = c.fair.dueling_budget(arm_count(c.environment));
  j["calibrated_target"] = to_std(environment_target(c.environment).pstar);
  j["final_regret"] = s.final_regret;
  j["mean_final_regret"] = s.mean_final_regret;
  j["stderr_final_regret"] = s.stderr_final_regret;
  j["tail_mean_regret"] = s.tail_mean_regret;
  j["exploration_rounds"] = s.exploration_rounds;
  j["mean_exploration_rounds"] = s.mean_exploration_rounds;
  j["max_exploration_rounds"] = s.max_exploration_rounds;
  j["objective_violation_rounds"] = s.objective_violation_rounds;
  j["objective_violating_replications"] = s.objective_violating_replications;
  j["objective_violation_probability"] = s.objective_violation_probability;
  j["subjective_violation_rounds"] = s.subjective_violation_rounds;
  j["subjective_violating_replications"] = s.subjective_violating_replications;
  j["subjective_violation_probability"] = s.subjective_violation_probability;
  j["regret_growth_slope"] = s.regret_growth_slope ? nlohmann::json(*s.regret_growth_slope) : nlohmann::json(nullptr);
  j["reference_growth_exponent"] = 2.0 / 3.0;
  return j;
}

OutputPaths emit_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  OutputPaths paths{dir / "rounds.csv", dir / "summary.json", dir / "regret_curve.csv"};
  {
    std::ofstream out(paths.rounds, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + paths.rounds.string());
    write_round_table(out, result.replications);
    check_stream(out, paths.rounds);
  }
  {
    std::ofstream out(paths.summary, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + paths.summary.string());
    out << summary_to_json(result).dump(2) << '\n';
    check_stream(out, paths.summary);
  }
  {
    std::ofstream out(paths.curve, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + paths.curve.string());
    write_regret_curve(out, result.summary);
    check_stream(out, paths.curve);
  }
  return paths;
}

TraceAudit audit_trace(std::istream& table, const Eigen::MatrixXd& divergence, const FairnessSpec& spec) {
  std::string line;
  if (!std::getline(table, line)) throw UsageError("trace is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  int rep_col = -1, first_pi = -1, k = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "replication") rep_col = static_cast<int>(c);
    if (header[c].rfind("pi_", 0) == 0) {
      if (first_pi < 0) first_pi = static_cast<int>(c);
      ++k;
    }
  }
  if (rep_col < 0 || first_pi < 0) throw UsageError("trace header lacks replication or pi_ columns");
  if (divergence.rows() != k) throw UsageError("trace arm count does not match the environment");

  std::map<int, TraceAudit::Replication> per_rep;
  Eigen::VectorXd rule(k);
  std::vector<std::string> cells;
  long lineno = 1;
  while (std::getline(table, line)) {
    ++lineno;
    if (line.empty()) continue;
    cells.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw UsageError("trace line " + std::to_string(lineno) + ": wrong column count");
    for (int a = 0; a < k; ++a) rule(a) = std::stod(cells[static_cast<std::size_t>(first_pi + a)]);
    const int rep = std::stoi(cells[static_cast<std::size_t>(rep_col)]);
    auto& r = per_rep[rep];
    r.replication = rep;
    ++r.rounds;
    const SmoothAudit audit = smooth_audit(rule, divergence, spec);
    if (audit.violated()) ++r.violating_rounds;
    r.max_violation = std::max(r.max_violation, audit.max_violation());
  }
  TraceAudit out;
  for (auto& [rep, r] : per_rep) {
    out.violating_replications += r.violating_rounds > 0 ? 1 : 0;
    out.replications.push_back(r);
  }
  out.violation_probability =
      out.replications.empty() ? 0.0 : static_cast<double>(out.violating_replications) / out.replications.size();
  return out;
}

TraceAudit audit_trace(const std::filesystem::path& table, const Eigen::MatrixXd& divergence, const FairnessSpec& spec) {
  std::ifstream in(table);
  if (!in) throw std::runtime_error("cannot open trace " + table.string());
  return audit_trace(in, divergence, spec);
}

}  // namespace fairbandit
