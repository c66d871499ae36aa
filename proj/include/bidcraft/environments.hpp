#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bidcraft/auction.hpp"
#include "bidcraft/rng.hpp"
#include "json.hpp"

namespace bidcraft {

enum class EnvKind {
  kConstant,
  kExponential,
  kLinear,
  kMultiSegment,
  kSinusoidal,
  kLowerBoundVt,
  kLowerBoundLt,
  kBudgetPacing,
};

enum class BlockKind { kConstant, kExponential, kLinear };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

// Full description of an episode's environment. `variation_target` is the
// total-movement budget V_T, `switch_target` the switch budget L_T; which one
// applies depends on the kind.
struct EnvironmentSpec {
  EnvKind kind = EnvKind::kConstant;
  std::int64_t horizon = 1;
  double variation_target = 0.0;
  std::int64_t switch_target = 0;
  double beta = 2.0 / 3.0;
  std::uint64_t seed = 0;
  int opponents = 20;
  std::vector<double> budgets;
  double value_scale = 0.8;
  EnvKind opponent_pattern = EnvKind::kConstant;
};

// Throws std::invalid_argument naming the offending field.
void validate_spec(const EnvironmentSpec& spec);

nlohmann::json to_json(const EnvironmentSpec& spec);
EnvironmentSpec spec_from_json(const nlohmann::json& j);

// FNV-1a hash of the canonical JSON form, as 16 hex digits.
std::string env_digest(const EnvironmentSpec& spec);

// One building block: zeros through round tau (1-based), then the kind's
// rise. Requires length >= 3 and 1 <= tau <= length.
std::vector<double> building_block(BlockKind kind, std::int64_t length,
                                   std::int64_t tau);

// Draws tau uniformly from {1, ..., floor(beta * length)}.
std::vector<double> gen_building_block(BlockKind kind, std::int64_t length,
                                       double beta, Rng& rng);

struct SegmentPlan {
  BlockKind kind;
  std::int64_t length;
  std::int64_t tau;
};

std::vector<double> compose_segments(std::span<const SegmentPlan> plan);

// Splits the horizon into max(1, ceil(V_T)) segments and fills each with a
// building block: the kind's own block for the three single-kind patterns, a
// uniformly drawn one per segment for kMultiSegment.
std::vector<double> gen_multi_segment(EnvKind kind,
                                      const EnvironmentSpec& spec, Rng& rng);

double sinusoidal_value(double variation, std::int64_t horizon,
                        std::int64_t t);
std::vector<double> gen_sinusoidal(const EnvironmentSpec& spec);

// Alternating single-jump batches: batch j (0-based even) rises 0 -> jump at
// tau_j, odd batches mirror it falling back. Rounds past the last batch hold
// the final value.
std::vector<double> lower_bound_batches(std::int64_t horizon,
                                        std::int64_t batch_length,
                                        std::int64_t batch_count, double jump,
                                        std::span<const std::int64_t> taus);

std::vector<double> gen_lower_bound_vt(const EnvironmentSpec& spec, Rng& rng);
std::vector<double> gen_lower_bound_lt(const EnvironmentSpec& spec, Rng& rng);

struct PacingAgentState {
  double multiplier = 0.0;
  double multiplier_cap = 0.0;
  double step_size = 0.0;
  double target_rate = 0.0;
  double remaining_budget = 0.0;
};

double pacing_bid(const PacingAgentState& state, double value);
void pacing_settle(PacingAgentState& state, bool won, double payment);

// Round indices are 0-based. Each round the harness asks for valuation(t),
// then rival_bid(t), then settles with the learner's bid.
class EpisodeEnv {
 public:
  virtual ~EpisodeEnv() = default;
  virtual std::int64_t horizon() const = 0;
  virtual double valuation(std::int64_t t) = 0;
  virtual double rival_bid(std::int64_t t) = 0;
  virtual void settle(std::int64_t t, double learner_bid) = 0;
};

class VectorEnv : public EpisodeEnv {
 public:
  VectorEnv(std::vector<double> valuations, std::vector<double> rival_bids);

  std::int64_t horizon() const override;
  double valuation(std::int64_t t) override;
  double rival_bid(std::int64_t t) override;
  void settle(std::int64_t, double) override {}

  const std::vector<double>& rival_bids() const { return rival_bids_; }

 private:
  std::vector<double> valuations_;
  std::vector<double> rival_bids_;
};

// Pool of budget-pacing opponents sharing one scaled value sequence. The
// rival bid is the max opponent bid; the learner wins ties, otherwise the
// lowest-index maximal opponent wins and pays its own bid.
class BudgetPacingEnv : public EpisodeEnv {
 public:
  BudgetPacingEnv(const EnvironmentSpec& spec,
                  std::vector<double> learner_values,
                  std::vector<double> opponent_values);

  std::int64_t horizon() const override;
  double valuation(std::int64_t t) override;
  double rival_bid(std::int64_t t) override;
  void settle(std::int64_t t, double learner_bid) override;

  const std::vector<PacingAgentState>& agents() const { return agents_; }
  double initial_budget_total() const { return initial_budget_total_; }
  double total_opponent_payments() const { return total_payments_; }

 private:
  void compute_bids(std::int64_t t);

  std::vector<double> learner_values_;
  std::vector<double> opponent_values_;
  std::vector<PacingAgentState> agents_;
  std::vector<double> round_bids_;
  std::int64_t cached_round_ = -1;
  double initial_budget_total_ = 0.0;
  double total_payments_ = 0.0;
};

// Validates the spec and instantiates the episode. The spec's seed drives
// two independent streams: one for the environment's draws, one for the
// learner's valuations.
std::unique_ptr<EpisodeEnv> make_env(const EnvironmentSpec& spec);

}  // namespace bidcraft
