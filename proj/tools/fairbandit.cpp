// fairbandit: run fair Thompson-sampling experiments, print calibrated
// targets, and re-audit per-round traces.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fairbandit/config.hpp"
#include "fairbandit/errors.hpp"
#include "fairbandit/fairness.hpp"
#include "fairbandit/harness.hpp"
#include "fairbandit/outputs.hpp"

namespace fb = fairbandit;

namespace {

void print_vector(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) std::cout << (i ? "," : "") << fb::format_real(v(i));
  std::cout << '\n';
}

fb::RewardModel finite_model_from_arms(const std::string& text) {
  // Arms separated by ';', each as value:prob, value:prob
  std::vector<fb::FiniteDistribution> arms;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(';', start);
    arms.push_back(fb::parse_distribution(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fb::RewardModel(std::move(arms));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair Thompson-sampling bandit simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  run->add_option("--config", config_path, "Experiment config (key = value lines)")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--out", out_dir, "Output directory (overrides `out` in the config)");

  auto* oracle = app.add_subcommand("oracle", "Print the calibrated target Pr* of an environment");
  std::string theta, arms, nu;
  auto* theta_opt = oracle->add_option("--theta", theta, "Bernoulli parameters, e.g. 0.9,0.5,0.4");
  auto* arms_opt = oracle->add_option("--arms", arms, "Finite arms, e.g. '1:1;0:0.6,2:0.4'");
  auto* nu_opt = oracle->add_option("--nu", nu, "Plackett-Luce qualities");
  theta_opt->excludes(arms_opt)->excludes(nu_opt);
  arms_opt->excludes(nu_opt);

  auto* audit = app.add_subcommand("audit", "Re-audit a per-round trace for smooth fairness");
  std::string trace_path, audit_config, audit_theta, audit_nu, summary_path;
  double eps1 = 2.0, eps2 = 0.0;
  audit->add_option("--trace", trace_path, "Per-round table (rounds.csv)")->required()->check(CLI::ExistingFile);
  audit->add_option("--eps1", eps1, "epsilon1 (default 2)");
  audit->add_option("--eps2", eps2, "epsilon2 (default 0)");
  auto* ac = audit->add_option("--config", audit_config, "Config giving the environment");
  auto* at = audit->add_option("--theta", audit_theta, "Bernoulli environment");
  auto* an = audit->add_option("--nu", audit_nu, "Plackett-Luce environment");
  auto* as = audit->add_option("--summary", summary_path, "summary.json giving the environment (default: next to the trace)");
  ac->excludes(at)->excludes(an)->excludes(as);
  at->excludes(an)->excludes(as);
  an->excludes(as);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      fb::ExperimentConfig cfg = fb::load_config(config_path);
      if (seed_opt->count() > 0) cfg.seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      const fb::ExperimentResult result = fb::run_experiment(cfg);
      if (cfg.out_dir) {
        const auto paths = fb::emit_outputs(result, *cfg.out_dir);
        std::cerr << "wrote " << paths.rounds.string() << ", " << paths.summary.string() << ", "
                  << paths.curve.string() << '\n';
      }
      std::cout << fb::summary_to_json(result).dump(2) << '\n';
      return 0;
    }

    if (oracle->parsed()) {
      fb::CalibratedTarget target;
      if (theta_opt->count() > 0) {
        target = fb::calibrated_target(fb::RewardModel::bernoulli(fb::parse_real_list(theta)));
      } else if (arms_opt->count() > 0) {
        target = fb::calibrated_target(finite_model_from_arms(arms));
      } else if (nu_opt->count() > 0) {
        target = fb::environment_target(fb::PLModel(fb::parse_real_list(nu)));
      } else {
        std::cerr << "oracle: give one of --theta, --arms, --nu\n";
        return 2;
      }
      print_vector(target.pstar);
      return 0;
    }

    if (audit->parsed()) {
      fb::Environment env = fb::RewardModel::bernoulli(Eigen::Vector2d(0.5, 0.5));
      if (!audit_config.empty()) {
        env = fb::load_config(audit_config).environment;
      } else if (!audit_theta.empty()) {
        env = fb::RewardModel::bernoulli(fb::parse_real_list(audit_theta));
      } else if (!audit_nu.empty()) {
        env = fb::PLModel(fb::parse_real_list(audit_nu));
      } else {
        const std::filesystem::path summary =
            summary_path.empty() ? std::filesystem::path(trace_path).parent_path() / "summary.json"
                                 : std::filesystem::path(summary_path);
        std::ifstream in(summary);
        if (!in) throw std::runtime_error("audit: no environment given and cannot open " + summary.string());
        env = fb::environment_from_json(nlohmann::json::parse(in).at("environment"));
      }
      fb::FairnessSpec spec{eps1, eps2, 0.0};
      spec.validate();
      const fb::TraceAudit report = fb::audit_trace(trace_path, fb::environment_divergence(env), spec);
      std::cout << "replication,rounds,violating_rounds,max_violation\n";
      for (const auto& r : report.replications)
        std::cout << r.replication << ',' << r.rounds << ',' << r.violating_rounds << ','
                  << fb::format_real(r.max_violation) << '\n';
      std::cout << "violating_replications=" << report.violating_replications
                << " violation_probability=" << fb::format_real(report.violation_probability) << '\n';
      return 0;
    }
  } catch (const fb::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
