#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "bidcraft/harness.hpp"
#include "bidcraft/rng.hpp"
#include "bidcraft/sweep.hpp"
#include "bidcraft/util.hpp"

namespace {

using namespace bidcraft;

std::uint64_t env_fallback_seed() {
  const char* raw = std::getenv("BIDCRAFT_SEED");
  if (!raw) return 0;
  std::uint64_t seed = 0;
  const std::string text(raw);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("BIDCRAFT_SEED must be an unsigned integer");
  return seed;
}

void print_progress(std::size_t done, std::size_t total) {
  const std::size_t step = std::max<std::size_t>(1, total / 20);
  if (done % step == 0 || done == total)
    std::cerr << "progress " << done << "/" << total << "\n";
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

struct SimulateArgs {
  std::string policy;
  std::string env = "constant";
  std::int64_t horizon = 1000;
  double alpha = 0.5;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = "trace.csv";
  double variation = 0.0;
  bool variation_given = false;
  std::int64_t switches = 0;
  bool switches_given = false;
  double epsilon = 0.0;
  bool epsilon_given = false;
  double learning_rate = 0.0;
  bool learning_rate_given = false;
  std::int64_t batch_size = 0;
  bool batch_size_given = false;
  double c = 0.0;
  bool c_given = false;
  double switch_tolerance = 0.0;
  bool switch_tolerance_given = false;
};

int cmd_simulate(const SimulateArgs& args) {
  EnvironmentSpec env = make_environment_spec(args.env, args.alpha, args.horizon);
  if (args.variation_given) env.variation_target = args.variation;
  if (args.switches_given) env.switch_target = args.switches;

  PolicySpec policy_spec;
  policy_spec.name = args.policy;
  if (args.epsilon_given) policy_spec.params["epsilon"] = args.epsilon;
  if (args.learning_rate_given)
    policy_spec.params["learning_rate"] = args.learning_rate;
  if (args.batch_size_given) policy_spec.params["batch_size"] = args.batch_size;
  if (args.c_given) policy_spec.params["c"] = args.c;
  if (args.switch_tolerance_given)
    policy_spec.params["switch_tolerance"] = args.switch_tolerance;

  auto policy = make_policy(policy_spec, env);
  const std::uint64_t seed = args.seed_given ? args.seed : env_fallback_seed();
  const RegretTrace trace = run_episode(*policy, env, seed);
  write_trace_csv(args.out, trace);
  std::cout << "final_regret=" << format_double(trace.final_regret_expected())
            << " V_T=" << format_double(trace.measured_variation())
            << " L_T=" << trace.measured_switches() << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override,
              int workers_override, int runs_override,
              std::uint64_t seed_override, bool seed_given) {
  const nlohmann::json j = load_json_file(config_path);
  SweepConfig config = sweep_config_from_json(j);
  if (runs_override >= 0) config.runs = runs_override;
  if (workers_override > 0) config.workers = workers_override;
  if (seed_given)
    config.base_seed = seed_override;
  else if (!j.contains("base_seed"))
    config.base_seed = env_fallback_seed();
  std::string out = !out_override.empty() ? out_override
                    : !config.output_path.empty() ? config.output_path
                                                  : "results.csv";
  const std::vector<SweepRow> rows = run_sweep(config, print_progress);
  write_results_csv(out, rows);
  std::cout << "rows=" << rows.size() << " output=" << out << "\n";
  return 0;
}

int cmd_slopes(const std::string& results_path, const std::string& out,
               bool log_then_mean) {
  const std::vector<SweepRow> rows = read_results_csv(results_path);
  const std::vector<SlopeRow> slopes = slopes_from_results(rows, log_then_mean);
  write_slopes_csv(out, slopes);
  std::cout << "rows=" << slopes.size() << " output=" << out << "\n";
  return 0;
}

std::pair<std::int64_t, std::int64_t> parse_h_range(const std::string& text) {
  const std::size_t sep = text.find("..");
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  try {
    if (sep == std::string::npos) {
      lo = hi = std::stoll(text);
    } else {
      lo = std::stoll(text.substr(0, sep));
      hi = std::stoll(text.substr(sep + 2));
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("H range must look like '2..50'");
  }
  if (lo < 2 || hi < lo)
    throw std::invalid_argument("H range must satisfy 2 <= lo <= hi");
  return {lo, hi};
}

int cmd_lowerbound(const std::string& h_range, const std::string& out,
                   bool empirical, std::int64_t horizon_vt,
                   std::int64_t horizon_lt, std::int64_t switches, int runs,
                   std::uint64_t seed, int workers) {
  if (empirical) {
    if (runs < 2) throw std::invalid_argument("runs must be at least 2");
    struct Case {
      std::string label;
      EnvironmentSpec env;
      double bound;
    };
    std::vector<Case> cases;
    {
      EnvironmentSpec vt;
      vt.kind = EnvKind::kLowerBoundVt;
      vt.horizon = horizon_vt;
      vt.variation_target = std::sqrt(static_cast<double>(horizon_vt));
      cases.push_back({"lower_bound_vt", vt,
                       std::sqrt(static_cast<double>(horizon_vt) *
                                 vt.variation_target) /
                           16.0});
      EnvironmentSpec lt;
      lt.kind = EnvKind::kLowerBoundLt;
      lt.horizon = horizon_lt;
      lt.switch_target = switches;
      cases.push_back(
          {"lower_bound_lt", lt, static_cast<double>(switches) / 8.0});
    }
    for (const Case& c : cases) validate_spec(c.env);

    std::string table = "env,policy,mean_regret,sem,bound,pass\n";
    for (const Case& c : cases) {
      for (const std::string& name :
           {std::string("hedge"), std::string("restart_hedge"),
            std::string("ar_prod"), std::string("ar_omd"),
            std::string("bobw")}) {
        std::vector<double> finals(static_cast<std::size_t>(runs));
        std::vector<std::string> errors;
        std::mutex io;
        std::atomic<std::size_t> done{0};
        const auto body = [&](std::size_t run) {
          const std::uint64_t run_seed = derive_seed(
              seed, {fnv1a64(c.label), fnv1a64(name),
                     static_cast<std::uint64_t>(run)});
          try {
            auto policy = make_policy({name, {}}, c.env);
            finals[run] =
                run_episode(*policy, c.env, run_seed).final_regret_expected();
          } catch (const std::exception& e) {
            const std::lock_guard<std::mutex> lock(io);
            errors.push_back(e.what());
          }
          const std::size_t k = done.fetch_add(1) + 1;
          const std::lock_guard<std::mutex> lock(io);
          print_progress(k, static_cast<std::size_t>(runs));
        };
        {
          std::vector<std::thread> pool;
          std::atomic<std::size_t> next{0};
          const int n = workers > 0 ? workers : 1;
          if (n <= 1) {
            for (std::size_t i = 0; i < finals.size(); ++i) body(i);
          } else {
            for (int w = 0; w < n; ++w)
              pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < finals.size();
                     i = next.fetch_add(1))
                  body(i);
              });
            for (auto& t : pool) t.join();
          }
        }
        if (!errors.empty()) throw std::runtime_error(errors.front());
        double mean = 0.0;
        for (double f : finals) mean += f;
        mean /= static_cast<double>(runs);
        double ss = 0.0;
        for (double f : finals) ss += (f - mean) * (f - mean);
        const double sem =
            std::sqrt(ss / (runs - 1)) / std::sqrt(static_cast<double>(runs));
        const bool pass = mean >= c.bound - 3.0 * sem;
        table += c.label + "," + name + "," + format_double(mean) + "," +
                 format_double(sem) + "," + format_double(c.bound) + "," +
                 (pass ? "pass" : "fail") + "\n";
      }
    }
    std::cout << table;
    if (!out.empty()) {
      std::ofstream file(out, std::ios::binary);
      if (!file)
        throw std::runtime_error("cannot open '" + out + "' for writing");
      file << table;
    }
    return 0;
  }

  const auto [lo, hi] = parse_h_range(h_range);
  std::string table = "H,oracle,bound,pass\n";
  for (std::int64_t h = lo; h <= hi; ++h) {
    const double oracle = dp_minimax_oracle(h, 1.0 / static_cast<double>(h));
    const double bound = 0.5 - 1.0 / (2.0 * static_cast<double>(h));
    const bool pass = oracle >= bound - 1e-12;
    table += std::to_string(h) + "," + format_double(oracle) + "," +
             format_double(bound) + "," + (pass ? "pass" : "fail") + "\n";
  }
  std::cout << table;
  if (!out.empty()) {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + out + "' for writing");
    file << table;
  }
  return 0;
}

int cmd_pacing(const PacingConfig& config, const std::string& out) {
  const std::vector<PacingRow> rows = run_pacing(config, print_progress);
  std::cout << "alpha,regime,policy,mean_reward,std_reward,runs\n";
  for (const PacingRow& row : rows)
    std::cout << format_double(row.alpha) << ',' << row.regime << ','
              << row.policy << ',' << format_double(row.mean_reward) << ','
              << format_double(row.std_reward) << ',' << row.runs << "\n";
  if (!out.empty()) write_pacing_csv(out, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for learning to bid in repeated first-price auctions"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run one episode and write its per-round trace CSV");
  simulate->add_option("--policy", sim.policy,
                       "Policy name: hedge, restart_hedge, ar_prod, ar_omd, "
                       "bobw, oracle, zero")
      ->required();
  simulate->add_option("--env", sim.env,
                       "Environment kind: constant, exponential, linear, "
                       "multi_segment, sinusoidal, lower_bound_vt, "
                       "lower_bound_lt");
  simulate->add_option("--T", sim.horizon, "Number of rounds")->required();
  simulate->add_option("--alpha", sim.alpha,
                       "Variation exponent; the variation budget is T^alpha/4");
  auto* sim_seed = simulate->add_option("--seed", sim.seed, "Episode seed");
  simulate->add_option("--out", sim.out, "Trace CSV path (default trace.csv)");
  auto* sim_var = simulate->add_option(
      "--variation", sim.variation, "Override the variation budget directly");
  auto* sim_switches = simulate->add_option(
      "--switches", sim.switches, "Override the switch budget directly");
  auto* sim_eps =
      simulate->add_option("--epsilon", sim.epsilon, "Bid grid spacing");
  auto* sim_rate = simulate->add_option("--learning-rate", sim.learning_rate,
                                        "Policy learning rate");
  auto* sim_batch = simulate->add_option("--batch-size", sim.batch_size,
                                         "Hedge restart batch length");
  auto* sim_c =
      simulate->add_option("--c", sim.c, "Restart guard constant (ar_prod)");
  auto* sim_tol = simulate->add_option("--switch-tolerance", sim.switch_tolerance,
                                       "Rival-bid switch tolerance (ar_omd)");

  std::string sweep_config_path, sweep_out;
  int sweep_workers = 0;
  int sweep_runs = -1;
  std::uint64_t sweep_seed = 0;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run the pattern x alpha x horizon x policy replication grid");
  sweep->add_option("--config", sweep_config_path, "JSON sweep config path")
      ->required();
  sweep->add_option("--out", sweep_out, "Results CSV path override");
  sweep->add_option("--workers", sweep_workers, "Concurrent replications");
  sweep->add_option("--runs", sweep_runs, "Replications per cell override");
  auto* sweep_seed_opt =
      sweep->add_option("--seed", sweep_seed, "Base seed override");

  std::string slopes_results, slopes_out = "slopes.csv";
  bool slopes_log_then_mean = false;
  CLI::App* slopes =
      app.add_subcommand("slopes", "Fit log-log slopes from a results CSV");
  slopes->add_option("--results", slopes_results, "Results CSV path")
      ->required();
  slopes->add_option("--out", slopes_out, "Slope CSV path");
  slopes->add_flag("--log-then-mean", slopes_log_then_mean,
                   "Average per-run log regret instead of logging the mean");

  std::string lb_range = "2..50", lb_out;
  bool lb_empirical = false;
  std::int64_t lb_horizon_vt = 10000;
  std::int64_t lb_horizon_lt = 9000;
  std::int64_t lb_switches = 300;
  int lb_runs = 20;
  std::uint64_t lb_seed = 0;
  int lb_workers = 0;
  CLI::App* lowerbound = app.add_subcommand(
      "lowerbound",
      "Check the per-batch minimax oracle against its closed-form bound");
  lowerbound->add_option("--H", lb_range, "Batch length range, e.g. 2..50");
  lowerbound->add_option("--out", lb_out, "Also write the table to a file");
  lowerbound->add_flag(
      "--empirical", lb_empirical,
      "Measure policy regret on the adversarial sequences instead");
  lowerbound->add_option("--T", lb_horizon_vt,
                         "Horizon for the variation-budget check");
  lowerbound->add_option("--T-switches", lb_horizon_lt,
                         "Horizon for the switch-budget check");
  lowerbound->add_option("--switches", lb_switches,
                         "Switch budget for the switch-budget check");
  lowerbound->add_option("--runs", lb_runs, "Seeds per policy");
  lowerbound->add_option("--seed", lb_seed, "Base seed");
  lowerbound->add_option("--workers", lb_workers, "Concurrent replications");

  PacingConfig pacing_config;
  std::string pacing_out;
  CLI::App* pacing = app.add_subcommand(
      "pacing", "Compare policies against budget-pacing opponents");
  pacing->add_option("--regime", pacing_config.regime,
                     "'sufficient' (budget T/20) or 'insufficient' (T/40)")
      ->required();
  pacing->add_option("--pattern", pacing_config.pattern,
                     "Opponent value pattern");
  pacing->add_option("--alpha", pacing_config.alpha, "Variation exponent");
  pacing->add_option("--T", pacing_config.horizon, "Number of rounds");
  pacing->add_option("--runs", pacing_config.runs, "Replications per policy");
  pacing->add_option("--opponents", pacing_config.opponents, "Opponent count");
  pacing->add_option("--seed", pacing_config.base_seed, "Base seed");
  pacing->add_option("--workers", pacing_config.workers,
                     "Concurrent replications");
  pacing->add_option("--out", pacing_out, "Also write the table to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) {
      sim.seed_given = sim_seed->count() > 0;
      sim.variation_given = sim_var->count() > 0;
      sim.switches_given = sim_switches->count() > 0;
      sim.epsilon_given = sim_eps->count() > 0;
      sim.learning_rate_given = sim_rate->count() > 0;
      sim.batch_size_given = sim_batch->count() > 0;
      sim.c_given = sim_c->count() > 0;
      sim.switch_tolerance_given = sim_tol->count() > 0;
      return cmd_simulate(sim);
    }
    if (sweep->parsed())
      return cmd_sweep(sweep_config_path, sweep_out, sweep_workers, sweep_runs,
                       sweep_seed, sweep_seed_opt->count() > 0);
    if (slopes->parsed())
      return cmd_slopes(slopes_results, slopes_out, slopes_log_then_mean);
    if (lowerbound->parsed())
      return cmd_lowerbound(lb_range, lb_out, lb_empirical, lb_horizon_vt,
                            lb_horizon_lt, lb_switches, lb_runs, lb_seed,
                            lb_workers);
    if (pacing->parsed()) return cmd_pacing(pacing_config, pacing_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
