#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bidcraft/environments.hpp"
#include "bidcraft/harness.hpp"
#include "bidcraft/policies.hpp"
#include "json.hpp"

namespace bidcraft {

struct PolicySpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

struct SweepConfig {
  std::vector<std::string> patterns;
  std::vector<double> alphas;
  std::vector<std::int64_t> horizons;
  std::vector<PolicySpec> policies;
  int runs = 50;
  std::uint64_t base_seed = 0;
  std::string output_path;
  int workers = 0;  // 0 picks the hardware thread count
};

// Parses and validates; throws std::invalid_argument naming the bad field.
SweepConfig sweep_config_from_json(const nlohmann::json& j);

// Instantiates a policy by name with JSON parameter overrides. The
// environment spec supplies the horizon and the variation context that the
// restarting Hedge baseline needs for its batch-length heuristic.
std::unique_ptr<BidPolicy> make_policy(const PolicySpec& policy,
                                       const EnvironmentSpec& env);

const std::vector<std::string>& known_policy_names();

// Maps a sweep cell to an environment: variation_target = T^alpha / 4 (the
// switch-budget analogue for the switch-count lower bound kind).
EnvironmentSpec make_environment_spec(const std::string& pattern, double alpha,
                                      std::int64_t horizon);

struct SweepRow {
  std::string pattern;
  double alpha = 0.0;
  std::int64_t horizon = 0;
  std::string policy;
  std::uint64_t seed = 0;
  double final_regret_expected = 0.0;
  double final_regret_realized = 0.0;
  double variation_measured = 0.0;
  double switches_measured = 0.0;
  double wall_ms = 0.0;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Cross product of patterns x alphas x horizons x policies x runs, one row
// per replication, in deterministic order regardless of worker count. A
// failed replication yields NaN metric columns and a note on stderr.
std::vector<SweepRow> run_sweep(const SweepConfig& config,
                                const ProgressFn& progress = nullptr);

struct SlopeRow {
  std::string pattern;
  double alpha = 0.0;
  std::string policy;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  std::int64_t n_points = 0;
};

// Groups rows by (pattern, alpha, policy): per horizon the expected-regret
// mean is taken first and logged after; log_then_mean swaps that order.
std::vector<SlopeRow> slopes_from_results(std::span<const SweepRow> rows,
                                          bool log_then_mean = false);

struct PacingConfig {
  std::string pattern = "constant";
  double alpha = 0.0;
  std::int64_t horizon = 12000;
  int runs = 50;
  int opponents = 20;
  std::string regime = "insufficient";  // opponent budget T/40; "sufficient" is T/20
  std::vector<std::string> policies;    // empty = all learning policies
  std::uint64_t base_seed = 0;
  int workers = 0;
};

struct PacingRow {
  double alpha = 0.0;
  std::string regime;
  std::string policy;
  double mean_reward = 0.0;
  double std_reward = 0.0;
  int runs = 0;
};

std::vector<PacingRow> run_pacing(const PacingConfig& config,
                                  const ProgressFn& progress = nullptr);

void write_results_csv(const std::string& path, std::span<const SweepRow> rows);
std::vector<SweepRow> read_results_csv(const std::string& path);
void write_slopes_csv(const std::string& path, std::span<const SlopeRow> rows);
void write_pacing_csv(const std::string& path, std::span<const PacingRow> rows);
void write_trace_csv(const std::string& path, const RegretTrace& trace);

}  // namespace bidcraft
