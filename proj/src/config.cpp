#include "fairbandit/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "fairbandit/errors.hpp"

namespace fairbandit {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_real(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw UsageError("not a decimal number: '" + std::string(s) + "'");
  return v;
}

template <typename Int>
Int parse_int(std::string_view s) {
  s = trim(s);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw UsageError("not an integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::SDTS: return "sdts";
    case Algorithm::FairSDTS: return "fair_sdts";
    case Algorithm::FairSDDTS: return "fair_sd_dts";
    case Algorithm::StandardTS: return "standard_ts";
    case Algorithm::Uniform: return "uniform";
    case Algorithm::Fixed: return "fixed";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::SDTS, Algorithm::FairSDTS, Algorithm::FairSDDTS, Algorithm::StandardTS,
                      Algorithm::Uniform, Algorithm::Fixed})
    if (to_string(a) == name) return a;
  throw UsageError("unknown algorithm '" + std::string(name) + "'");
}

int arm_count(const Environment& env) {
  return std::visit([](const auto& m) { return m.arms(); }, env);
}

Eigen::VectorXd parse_real_list(std::string_view text) {
  const auto parts = split(text, ',');
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_real(parts[i]);
  return v;
}

FiniteDistribution parse_distribution(std::string_view text) {
  const auto parts = split(text, ',');
  std::vector<std::pair<double, double>> points;
  for (auto part : parts) {
    const auto colon = part.find(':');
    if (colon == std::string_view::npos) throw UsageError("support point must be value:prob, got '" + std::string(part) + "'");
    points.emplace_back(parse_real(part.substr(0, colon)), parse_real(part.substr(colon + 1)));
  }
  FiniteDistribution d;
  d.support.resize(static_cast<Eigen::Index>(points.size()));
  d.probs.resize(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    d.support(static_cast<Eigen::Index>(i)) = points[i].first;
    d.probs(static_cast<Eigen::Index>(i)) = points[i].second;
  }
  d.validate();
  return d;
}

void ExperimentConfig::validate() const {
  if (horizon < 1) throw UsageError("horizon must be at least 1");
  if (replications < 1) throw UsageError("replications must be at least 1");
  if (threads < 0) throw UsageError("threads must be nonnegative");
  if (!(mixing >= 0.0 && mixing <= 1.0)) throw UsageError("mixing must lie in [0,1]");
  if (!(prior > 0.0)) throw UsageError("prior must be positive");
  fair.validate();
  audit.validate();
  const bool dueling_env = std::holds_alternative<PLModel>(environment);
  if (algorithm == Algorithm::FairSDDTS && !dueling_env)
    throw UsageError("fair_sd_dts needs a Plackett-Luce environment (nu)");
  if (algorithm != Algorithm::FairSDDTS && dueling_env)
    throw UsageError(std::string(to_string(algorithm)) + " needs a stochastic environment (theta or arm.<i>)");
  if (!dueling_env) {
    const auto& model = std::get<RewardModel>(environment);
    const bool needs_posterior = algorithm == Algorithm::SDTS || algorithm == Algorithm::FairSDTS ||
                                 algorithm == Algorithm::StandardTS;
    if (needs_posterior && !model.is_bernoulli())
      throw UsageError(std::string(to_string(algorithm)) + " needs Bernoulli arms");
    if (algorithm == Algorithm::Fixed && (fixed_arm < 0 || fixed_arm >= model.arms()))
      throw UsageError("fixed_arm out of range");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, std::string, std::less<>> values;
  std::map<int, FiniteDistribution> arms;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));
    try {
      if (key.rfind("arm.", 0) == 0) {
        arms.insert_or_assign(parse_int<int>(std::string_view(key).substr(4)), parse_distribution(value));
      } else if (!values.emplace(key, value).second) {
        throw UsageError("duplicate key '" + key + "'");
      }
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }

  ExperimentConfig cfg;
  auto take = [&](std::string_view key) -> std::optional<std::string> {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    std::string v = it->second;
    values.erase(it);
    return v;
  };

  if (auto v = take("algorithm")) cfg.algorithm = parse_algorithm(*v);
  const auto theta = take("theta");
  const auto nu = take("nu");
  const int env_sources = (theta ? 1 : 0) + (nu ? 1 : 0) + (arms.empty() ? 0 : 1);
  if (env_sources != 1) throw UsageError("config must give exactly one of theta, arm.<i>, nu");
  if (theta) {
    cfg.environment = RewardModel::bernoulli(parse_real_list(*theta));
  } else if (nu) {
    cfg.environment = PLModel(parse_real_list(*nu));
  } else {
    std::vector<FiniteDistribution> dists;
    for (const auto& [index, dist] : arms) {
      if (index != static_cast<int>(dists.size())) throw UsageError("arm.<i> keys must be numbered 0, 1, 2, ...");
      dists.push_back(dist);
    }
    cfg.environment = RewardModel(std::move(dists));
  }
  if (auto v = take("horizon")) cfg.horizon = parse_int<long>(*v);
  if (auto v = take("replications")) cfg.replications = parse_int<int>(*v);
  if (auto v = take("seed")) cfg.seed = parse_int<std::uint64_t>(*v);
  if (auto v = take("epsilon2")) cfg.fair.epsilon2 = parse_real(*v);
  if (auto v = take("delta")) cfg.fair.delta = parse_real(*v);
  if (auto v = take("divergence_bound")) cfg.fair.divergence_bound = parse_real(*v);
  if (auto v = take("budget")) cfg.fair.budget_override = parse_int<long>(*v);
  if (auto v = take("epsilon1_target")) cfg.fair.epsilon1_target = parse_real(*v);
  if (auto v = take("mixing")) cfg.mixing = parse_real(*v);
  if (auto v = take("fixed_arm")) cfg.fixed_arm = parse_int<int>(*v);
  if (auto v = take("prior")) cfg.prior = parse_real(*v);
  if (auto v = take("threads")) cfg.threads = parse_int<int>(*v);
  if (auto v = take("out")) cfg.out_dir = *v;

  const bool fair_alg = cfg.algorithm == Algorithm::FairSDTS || cfg.algorithm == Algorithm::FairSDDTS;
  cfg.audit.epsilon1 = 2.0;
  cfg.audit.epsilon2 = fair_alg ? 2.0 * cfg.fair.epsilon2 : 0.0;
  cfg.audit.delta = cfg.fair.delta;
  if (auto v = take("audit_eps1")) cfg.audit.epsilon1 = parse_real(*v);
  if (auto v = take("audit_eps2")) cfg.audit.epsilon2 = parse_real(*v);

  if (!values.empty()) throw UsageError("unknown config key '" + values.begin()->first + "'");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  try {
    return parse_config(in);
  } catch (const UsageError& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

}  // namespace fairbandit
