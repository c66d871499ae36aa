#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bidcraft/auction.hpp"
#include "bidcraft/environments.hpp"
#include "bidcraft/policies.hpp"

namespace bidcraft {

// Per-round record of one episode plus its identifying metadata. The regret
// column tracks the benchmark sum minus the expected-reward sum; realized
// rewards are kept alongside for variance-sensitive comparisons.
struct RegretTrace {
  std::string policy_name;
  std::string environment_digest;
  std::uint64_t seed = 0;

  std::vector<double> valuations;
  std::vector<double> rival_bids;
  std::vector<double> bids;
  std::vector<double> rewards_realized;
  std::vector<double> rewards_expected;
  std::vector<double> benchmark_increments;
  std::vector<double> cumulative_regret;

  std::int64_t horizon() const {
    return static_cast<std::int64_t>(valuations.size());
  }
  double final_regret_expected() const;
  double final_regret_realized() const;
  double total_reward_expected() const;
  double total_reward_realized() const;
  double measured_variation() const;
  std::int64_t measured_switches(
      double tolerance = kDefaultSwitchTolerance) const;
};

// Bids the per-round optimum; only usable with the harness, which feeds the
// rival bid back into the bid decision.
class OraclePolicy : public BidPolicy {
 public:
  std::string_view name() const override { return "oracle"; }
  bool clairvoyant() const override { return true; }

 protected:
  BidProposal do_propose(double, Rng&) override { return {0.0, -1}; }
  double pending_expected_reward(const AuctionRound& round) const override;
  void do_observe(const AuctionRound&) override {}
};

class ZeroPolicy : public BidPolicy {
 public:
  std::string_view name() const override { return "zero"; }

 protected:
  BidProposal do_propose(double, Rng&) override { return {0.0, -1}; }
  double pending_expected_reward(const AuctionRound& round) const override;
  void do_observe(const AuctionRound&) override {}
};

// Runs one full episode of the spec's environment with the given seed (the
// spec's own seed field is ignored). Policy and environment use independent
// seed-derived streams. Errors are rethrown with the round index attached.
RegretTrace run_episode(BidPolicy& policy, const EnvironmentSpec& spec,
                        std::uint64_t seed);

// Static-versus-dynamic split of an episode's grid-restricted regret. For
// each batch, static_regret is the gap to the batch's best fixed grid expert
// and transition_cost is that expert's gap to the per-round grid optimum.
struct DecompositionReport {
  std::vector<std::int64_t> boundaries;
  std::vector<double> static_regret;
  std::vector<double> transition_cost;
  double static_total = 0.0;
  double transition_total = 0.0;
  double grid_dynamic_regret = 0.0;
};

// boundaries are 0-based batch start offsets: strictly increasing, first 0,
// all below the trace length.
DecompositionReport regret_decomposition(const RegretTrace& trace,
                                         const BidGrid& grid,
                                         std::span<const std::int64_t> boundaries);

struct SlopeReport {
  std::vector<std::int64_t> horizons;
  std::vector<double> mean_regrets;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  std::int64_t n_points = 0;
};

// Least squares of log(regret) on log(T); regrets floored at 1e-9.
SlopeReport fit_loglog_slope(
    std::span<const std::pair<std::int64_t, double>> points);

// Exact minimax expected dynamic regret of the single-jump batch instance:
// v = 1 throughout, the rival bid jumps from 0 to delta at a round drawn
// uniformly from {1..H}. Computed by backward induction over "jump not yet
// seen, k rounds left" with the two undominated bids 0 and delta.
double dp_minimax_oracle(std::int64_t h, double delta);

}  // namespace bidcraft
