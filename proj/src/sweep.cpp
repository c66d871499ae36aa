#include "bidcraft/sweep.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "bidcraft/rng.hpp"
#include "bidcraft/util.hpp"

namespace bidcraft {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_param_keys(const nlohmann::json& params, const std::string& name,
                      std::initializer_list<const char*> allowed) {
  for (const auto& item : params.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known)
      throw std::invalid_argument("unknown parameter '" + item.key() +
                                  "' for policy '" + name + "'");
  }
}

double param_or(const nlohmann::json& params, const char* key,
                double fallback) {
  if (!params.contains(key)) return fallback;
  if (!params.at(key).is_number())
    throw std::invalid_argument(std::string("parameter '") + key +
                                "' must be a number");
  return params.at(key).get<double>();
}

std::int64_t param_int_or(const nlohmann::json& params, const char* key,
                          std::int64_t fallback) {
  if (!params.contains(key)) return fallback;
  if (!params.at(key).is_number_integer())
    throw std::invalid_argument(std::string("parameter '") + key +
                                "' must be an integer");
  return params.at(key).get<std::int64_t>();
}

// Combined drift of the reward functions: the rival-bid budget plus the
// expected movement of an i.i.d. uniform valuation stream.
double estimated_total_variation(const EnvironmentSpec& env) {
  double rival = env.variation_target;
  if (env.kind == EnvKind::kLowerBoundLt)
    rival = 0.5 * static_cast<double>(env.switch_target);
  const bool fixed_values = env.kind == EnvKind::kLowerBoundVt ||
                            env.kind == EnvKind::kLowerBoundLt;
  const double values =
      fixed_values ? 0.0 : static_cast<double>(env.horizon - 1) / 3.0;
  return rival + values;
}

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body) {
  const int n = std::min<int>(resolve_workers(workers),
                              static_cast<int>(std::max<std::size_t>(count, 1)));
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
      body(i);
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_double_field(const std::string& field, const std::string& path,
                          std::size_t lineno) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                ": malformed number '" + field + "'");
  return value;
}

template <typename T>
T parse_int_field(const std::string& field, const std::string& path,
                  std::size_t lineno) {
  T value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                ": malformed integer '" + field + "'");
  return value;
}

constexpr const char* kResultsHeader =
    "pattern,alpha,T,policy,seed,final_regret_expected,final_regret_realized,"
    "V_T_measured,L_T_measured,wall_ms";

}  // namespace

const std::vector<std::string>& known_policy_names() {
  static const std::vector<std::string> kNames = {
      "hedge", "restart_hedge", "ar_prod", "ar_omd", "bobw", "oracle", "zero"};
  return kNames;
}

std::unique_ptr<BidPolicy> make_policy(const PolicySpec& policy,
                                       const EnvironmentSpec& env) {
  const std::int64_t horizon = env.horizon;
  nlohmann::json params = policy.params;
  if (params.is_null()) params = nlohmann::json::object();
  if (!params.is_object())
    throw std::invalid_argument("params for policy '" + policy.name +
                                "' must be a JSON object");
  const double default_epsilon =
      std::min(1.0, 4.0 / std::sqrt(static_cast<double>(horizon)));

  if (policy.name == "hedge" || policy.name == "restart_hedge") {
    check_param_keys(params, policy.name,
                     {"epsilon", "learning_rate", "batch_size"});
    const bool restarting = policy.name == "restart_hedge";
    std::int64_t default_batch = horizon;
    if (restarting) {
      const double drift = std::max(estimated_total_variation(env), 1.0);
      default_batch = std::max<std::int64_t>(
          1, nudged_floor(std::pow(static_cast<double>(horizon) / drift,
                                   2.0 / 3.0)));
    }
    HedgeConfig config;
    config.epsilon = param_or(params, "epsilon", default_epsilon);
    config.learning_rate = param_or(params, "learning_rate", 0.0);
    config.batch_size = param_int_or(params, "batch_size", default_batch);
    if (config.batch_size < 1)
      throw std::invalid_argument("parameter 'batch_size' must be positive");
    return std::make_unique<HedgePolicy>(horizon, config, restarting);
  }
  if (policy.name == "ar_prod") {
    check_param_keys(params, policy.name, {"learning_rate", "epsilon", "c"});
    ProdRestartConfig config = ProdRestartConfig::simulation_defaults(horizon);
    config.learning_rate = param_or(params, "learning_rate", config.learning_rate);
    config.epsilon = param_or(params, "epsilon", config.epsilon);
    config.c = param_or(params, "c", config.c);
    return std::make_unique<ProdRestartPolicy>(horizon, config);
  }
  if (policy.name == "ar_omd") {
    check_param_keys(params, policy.name,
                     {"learning_rate", "epsilon", "switch_tolerance"});
    OmdRestartConfig config = OmdRestartConfig::simulation_defaults(horizon);
    config.learning_rate = param_or(params, "learning_rate", config.learning_rate);
    config.epsilon = param_or(params, "epsilon", config.epsilon);
    config.switch_tolerance =
        param_or(params, "switch_tolerance", config.switch_tolerance);
    return std::make_unique<OmdRestartPolicy>(horizon, config);
  }
  if (policy.name == "bobw") {
    check_param_keys(params, policy.name, {"learning_rate"});
    auto a = std::make_unique<ProdRestartPolicy>(
        horizon, ProdRestartConfig::simulation_defaults(horizon));
    auto b = std::make_unique<OmdRestartPolicy>(
        horizon, OmdRestartConfig::simulation_defaults(horizon));
    return std::make_unique<CombinerPolicy>(
        horizon, std::move(a), std::move(b),
        param_or(params, "learning_rate", 0.0));
  }
  if (policy.name == "oracle") {
    check_param_keys(params, policy.name, {});
    return std::make_unique<OraclePolicy>();
  }
  if (policy.name == "zero") {
    check_param_keys(params, policy.name, {});
    return std::make_unique<ZeroPolicy>();
  }
  throw std::invalid_argument(
      "unknown policy '" + policy.name +
      "' (expected hedge, restart_hedge, ar_prod, ar_omd, bobw, oracle, or "
      "zero)");
}

EnvironmentSpec make_environment_spec(const std::string& pattern, double alpha,
                                      std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in [0, 1]");
  EnvironmentSpec spec;
  spec.kind = env_kind_from_string(pattern);
  if (spec.kind == EnvKind::kBudgetPacing)
    throw std::invalid_argument(
        "pattern budget_pacing is driven by the pacing command, not sweeps");
  spec.horizon = horizon;
  const double target = std::pow(static_cast<double>(horizon), alpha) / 4.0;
  if (spec.kind == EnvKind::kLowerBoundLt)
    spec.switch_target = std::max<std::int64_t>(1, nudged_floor(target));
  else
    spec.variation_target = target;
  return spec;
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::invalid_argument("config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "patterns", "alphas",    "horizons",    "policies",
      "runs",     "base_seed", "output_path", "workers"};
  for (const auto& item : j.items())
    if (!kKnown.count(item.key()))
      throw std::invalid_argument("unknown config field '" + item.key() + "'");

  SweepConfig config;
  if (j.contains("patterns")) {
    if (!j.at("patterns").is_array())
      throw std::invalid_argument("config field 'patterns' must be an array");
    for (const auto& p : j.at("patterns")) {
      if (!p.is_string())
        throw std::invalid_argument(
            "config field 'patterns' must contain strings");
      const std::string name = p.get<std::string>();
      const EnvKind kind = env_kind_from_string(name);
      if (kind == EnvKind::kBudgetPacing)
        throw std::invalid_argument(
            "config field 'patterns' cannot include budget_pacing");
      config.patterns.push_back(name);
    }
  }
  if (j.contains("alphas")) {
    if (!j.at("alphas").is_array())
      throw std::invalid_argument("config field 'alphas' must be an array");
    for (const auto& a : j.at("alphas")) {
      if (!a.is_number() || !(a.get<double>() >= 0.0 && a.get<double>() <= 1.0))
        throw std::invalid_argument(
            "config field 'alphas' must contain alpha values in [0, 1]");
      config.alphas.push_back(a.get<double>());
    }
  }
  if (j.contains("horizons")) {
    if (!j.at("horizons").is_array())
      throw std::invalid_argument("config field 'horizons' must be an array");
    for (const auto& t : j.at("horizons")) {
      if (!t.is_number_integer() || t.get<std::int64_t>() < 1)
        throw std::invalid_argument(
            "config field 'horizons' must contain positive integers");
      config.horizons.push_back(t.get<std::int64_t>());
    }
  }
  if (j.contains("policies")) {
    if (!j.at("policies").is_array())
      throw std::invalid_argument("config field 'policies' must be an array");
    for (const auto& p : j.at("policies")) {
      if (!p.is_object() || !p.contains("name") || !p.at("name").is_string())
        throw std::invalid_argument(
            "config field 'policies' entries need a string 'name'");
      for (const auto& item : p.items())
        if (item.key() != "name" && item.key() != "params")
          throw std::invalid_argument("unknown policy entry field '" +
                                      item.key() + "'");
      PolicySpec spec;
      spec.name = p.at("name").get<std::string>();
      if (p.contains("params")) spec.params = p.at("params");
      config.policies.push_back(std::move(spec));
    }
  }
  if (j.contains("runs")) {
    if (!j.at("runs").is_number_integer() || j.at("runs").get<int>() < 0)
      throw std::invalid_argument(
          "config field 'runs' must be a nonnegative integer");
    config.runs = j.at("runs").get<int>();
  }
  if (j.contains("base_seed")) {
    if (!j.at("base_seed").is_number_integer())
      throw std::invalid_argument(
          "config field 'base_seed' must be an integer");
    config.base_seed = j.at("base_seed").get<std::uint64_t>();
  }
  if (j.contains("output_path")) {
    if (!j.at("output_path").is_string())
      throw std::invalid_argument(
          "config field 'output_path' must be a string");
    config.output_path = j.at("output_path").get<std::string>();
  }
  if (j.contains("workers")) {
    if (!j.at("workers").is_number_integer() || j.at("workers").get<int>() < 0)
      throw std::invalid_argument(
          "config field 'workers' must be a nonnegative integer");
    config.workers = j.at("workers").get<int>();
  }

  // Surface bad policy names and parameters before any work starts.
  const std::string probe_pattern =
      config.patterns.empty() ? "constant" : config.patterns.front();
  const double probe_alpha = config.alphas.empty() ? 0.5 : config.alphas.front();
  const std::int64_t probe_horizon =
      config.horizons.empty() ? 1000 : config.horizons.front();
  const EnvironmentSpec probe =
      make_environment_spec(probe_pattern, probe_alpha, probe_horizon);
  for (const PolicySpec& policy : config.policies) {
    try {
      make_policy(policy, probe);
    } catch (const std::exception& e) {
      throw std::invalid_argument("policy '" + policy.name + "': " + e.what());
    }
  }
  return config;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config,
                                const ProgressFn& progress) {
  struct Task {
    std::size_t pattern_i, alpha_i, horizon_i, policy_i;
    int run;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < config.patterns.size(); ++p)
    for (std::size_t a = 0; a < config.alphas.size(); ++a)
      for (std::size_t h = 0; h < config.horizons.size(); ++h)
        for (std::size_t q = 0; q < config.policies.size(); ++q)
          for (int run = 0; run < config.runs; ++run)
            tasks.push_back({p, a, h, q, run});

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> completed{0};
  std::mutex io_mutex;

  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    const Task& task = tasks[i];
    const std::string& pattern = config.patterns[task.pattern_i];
    const double alpha = config.alphas[task.alpha_i];
    const std::int64_t horizon = config.horizons[task.horizon_i];
    const PolicySpec& policy_spec = config.policies[task.policy_i];

    SweepRow& row = rows[i];
    row.pattern = pattern;
    row.alpha = alpha;
    row.horizon = horizon;
    row.policy = policy_spec.name;
    row.seed = derive_seed(
        config.base_seed,
        {fnv1a64(pattern), std::bit_cast<std::uint64_t>(alpha),
         static_cast<std::uint64_t>(horizon), fnv1a64(policy_spec.name),
         static_cast<std::uint64_t>(task.run)});
    try {
      const EnvironmentSpec env =
          make_environment_spec(pattern, alpha, horizon);
      auto policy = make_policy(policy_spec, env);
      const auto start = std::chrono::steady_clock::now();
      const RegretTrace trace = run_episode(*policy, env, row.seed);
      const auto stop = std::chrono::steady_clock::now();
      row.wall_ms =
          std::chrono::duration<double, std::milli>(stop - start).count();
      row.final_regret_expected = trace.final_regret_expected();
      row.final_regret_realized = trace.final_regret_realized();
      row.variation_measured = trace.measured_variation();
      row.switches_measured = static_cast<double>(trace.measured_switches());
    } catch (const std::exception& e) {
      row.final_regret_expected = kNan;
      row.final_regret_realized = kNan;
      row.variation_measured = kNan;
      row.switches_measured = kNan;
      row.wall_ms = kNan;
      const std::lock_guard<std::mutex> lock(io_mutex);
      std::cerr << "sweep cell failed (" << pattern << ", alpha=" << alpha
                << ", T=" << horizon << ", " << policy_spec.name
                << ", run=" << task.run << "): " << e.what() << "\n";
    }
    const std::size_t done = completed.fetch_add(1) + 1;
    if (progress) {
      const std::lock_guard<std::mutex> lock(io_mutex);
      progress(done, tasks.size());
    }
  });
  return rows;
}

std::vector<SlopeRow> slopes_from_results(std::span<const SweepRow> rows,
                                          bool log_then_mean) {
  using Key = std::tuple<std::string, double, std::string>;
  std::map<Key, std::map<std::int64_t, std::pair<double, int>>> groups;
  for (const SweepRow& row : rows) {
    if (std::isnan(row.final_regret_expected)) continue;
    const double value =
        log_then_mean ? std::log(std::max(row.final_regret_expected, 1e-9))
                      : row.final_regret_expected;
    auto& cell = groups[{row.pattern, row.alpha, row.policy}][row.horizon];
    cell.first += value;
    cell.second += 1;
  }
  std::vector<SlopeRow> out;
  for (const auto& [key, horizons] : groups) {
    if (horizons.size() < 2) continue;
    std::vector<std::pair<std::int64_t, double>> points;
    for (const auto& [horizon, cell] : horizons) {
      const double mean = cell.first / cell.second;
      points.emplace_back(horizon, log_then_mean ? std::exp(mean) : mean);
    }
    const SlopeReport fit = fit_loglog_slope(points);
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                   fit.slope, fit.intercept, fit.residual, fit.n_points});
  }
  return out;
}

std::vector<PacingRow> run_pacing(const PacingConfig& config,
                                  const ProgressFn& progress) {
  if (config.horizon < 1)
    throw std::invalid_argument("horizon must be at least 1");
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in [0, 1]");
  if (config.runs < 1)
    throw std::invalid_argument("runs must be at least 1");
  if (config.regime != "sufficient" && config.regime != "insufficient")
    throw std::invalid_argument(
        "regime must be 'sufficient' or 'insufficient'");
  const EnvKind pattern_kind = env_kind_from_string(config.pattern);
  if (pattern_kind == EnvKind::kBudgetPacing ||
      pattern_kind == EnvKind::kLowerBoundVt ||
      pattern_kind == EnvKind::kLowerBoundLt)
    throw std::invalid_argument(
        "pattern must be one of constant, exponential, linear, multi_segment, "
        "sinusoidal");

  std::vector<std::string> policies = config.policies;
  if (policies.empty())
    policies = {"hedge", "restart_hedge", "ar_prod", "ar_omd", "bobw"};

  EnvironmentSpec env;
  env.kind = EnvKind::kBudgetPacing;
  env.horizon = config.horizon;
  env.variation_target =
      std::pow(static_cast<double>(config.horizon), config.alpha) / 4.0;
  env.opponents = config.opponents;
  env.budgets = {config.regime == "sufficient"
                     ? static_cast<double>(config.horizon) / 20.0
                     : static_cast<double>(config.horizon) / 40.0};
  env.opponent_pattern = pattern_kind;
  validate_spec(env);
  for (const std::string& name : policies) make_policy({name, {}}, env);

  const std::size_t total = policies.size() * static_cast<std::size_t>(config.runs);
  std::vector<double> rewards(total, kNan);
  std::vector<std::string> errors;
  std::atomic<std::size_t> completed{0};
  std::mutex io_mutex;

  parallel_for(total, config.workers, [&](std::size_t i) {
    const std::size_t policy_i = i / static_cast<std::size_t>(config.runs);
    const int run = static_cast<int>(i % static_cast<std::size_t>(config.runs));
    const std::string& name = policies[policy_i];
    const std::uint64_t seed = derive_seed(
        config.base_seed,
        {fnv1a64(config.pattern), std::bit_cast<std::uint64_t>(config.alpha),
         static_cast<std::uint64_t>(config.horizon), fnv1a64(config.regime),
         fnv1a64(name), static_cast<std::uint64_t>(run)});
    try {
      auto policy = make_policy({name, {}}, env);
      const RegretTrace trace = run_episode(*policy, env, seed);
      rewards[i] = trace.total_reward_realized();
    } catch (const std::exception& e) {
      const std::lock_guard<std::mutex> lock(io_mutex);
      errors.push_back(name + " run " + std::to_string(run) + ": " + e.what());
    }
    const std::size_t done = completed.fetch_add(1) + 1;
    if (progress) {
      const std::lock_guard<std::mutex> lock(io_mutex);
      progress(done, total);
    }
  });
  if (!errors.empty()) throw std::runtime_error(errors.front());

  std::vector<PacingRow> out;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    double sum = 0.0;
    for (int run = 0; run < config.runs; ++run)
      sum += rewards[p * static_cast<std::size_t>(config.runs) +
                     static_cast<std::size_t>(run)];
    const double mean = sum / config.runs;
    double ss = 0.0;
    for (int run = 0; run < config.runs; ++run) {
      const double d = rewards[p * static_cast<std::size_t>(config.runs) +
                               static_cast<std::size_t>(run)] -
                       mean;
      ss += d * d;
    }
    const double sd = config.runs > 1 ? std::sqrt(ss / (config.runs - 1)) : 0.0;
    out.push_back(
        {config.alpha, config.regime, policies[p], mean, sd, config.runs});
  }
  return out;
}

void write_results_csv(const std::string& path,
                       std::span<const SweepRow> rows) {
  auto out = open_for_writing(path);
  out << kResultsHeader << "\n";
  for (const SweepRow& row : rows) {
    out << row.pattern << ',' << format_double(row.alpha) << ',' << row.horizon
        << ',' << row.policy << ',' << row.seed << ','
        << format_double(row.final_regret_expected) << ','
        << format_double(row.final_regret_realized) << ','
        << format_double(row.variation_measured) << ','
        << format_double(row.switches_measured) << ','
        << format_double(row.wall_ms) << "\n";
  }
}

std::vector<SweepRow> read_results_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw std::invalid_argument(path + ": unexpected results CSV header");
  std::vector<SweepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 10)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected 10 fields");
    SweepRow row;
    row.pattern = fields[0];
    row.alpha = parse_double_field(fields[1], path, lineno);
    row.horizon = parse_int_field<std::int64_t>(fields[2], path, lineno);
    row.policy = fields[3];
    row.seed = parse_int_field<std::uint64_t>(fields[4], path, lineno);
    row.final_regret_expected = parse_double_field(fields[5], path, lineno);
    row.final_regret_realized = parse_double_field(fields[6], path, lineno);
    row.variation_measured = parse_double_field(fields[7], path, lineno);
    row.switches_measured = parse_double_field(fields[8], path, lineno);
    row.wall_ms = parse_double_field(fields[9], path, lineno);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_slopes_csv(const std::string& path,
                      std::span<const SlopeRow> rows) {
  auto out = open_for_writing(path);
  out << "pattern,alpha,policy,slope,intercept,residual,n_points\n";
  for (const SlopeRow& row : rows) {
    out << row.pattern << ',' << format_double(row.alpha) << ',' << row.policy
        << ',' << format_double(row.slope) << ','
        << format_double(row.intercept) << ',' << format_double(row.residual)
        << ',' << row.n_points << "\n";
  }
}

void write_pacing_csv(const std::string& path,
                      std::span<const PacingRow> rows) {
  auto out = open_for_writing(path);
  out << "alpha,regime,policy,mean_reward,std_reward,runs\n";
  for (const PacingRow& row : rows) {
    out << format_double(row.alpha) << ',' << row.regime << ',' << row.policy
        << ',' << format_double(row.mean_reward) << ','
        << format_double(row.std_reward) << ',' << row.runs << "\n";
  }
}

void write_trace_csv(const std::string& path, const RegretTrace& trace) {
  auto out = open_for_writing(path);
  out << "t,valuation,rival_bid,bid,reward_realized,reward_expected,"
         "benchmark_increment,cumulative_regret\n";
  for (std::int64_t t = 0; t < trace.horizon(); ++t) {
    const auto u = static_cast<std::size_t>(t);
    out << (t + 1) << ',' << format_double(trace.valuations[u]) << ','
        << format_double(trace.rival_bids[u]) << ','
        << format_double(trace.bids[u]) << ','
        << format_double(trace.rewards_realized[u]) << ','
        << format_double(trace.rewards_expected[u]) << ','
        << format_double(trace.benchmark_increments[u]) << ','
        << format_double(trace.cumulative_regret[u]) << "\n";
  }
}

}  // namespace bidcraft
