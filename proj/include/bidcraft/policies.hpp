// Expert-weight bidding policies: Hedge with optional periodic restarts, an
// optimistic multiplicative forecaster with variation-driven restarts, a
// mirror-descent variant that restarts on detected rival-bid switches, and a
// multiplicative combiner that mixes two child policies.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bidcraft/auction.hpp"
#include "bidcraft/rng.hpp"

namespace bidcraft {

inline constexpr double kProdFactorFloor = 1e-12;

// Slack bid the learner would leave on the table by matching the rival's
// last price: max(valuation - rival_high_bid, 0). Used as the reward level
// every expert is measured against in optimistic updates.
double compute_optimism(const AuctionRound& round);

// One multiplicative step with per-expert factors 1 + rate * (reward -
// optimism), floored at kProdFactorFloor so weights stay positive. Input
// weights must be normalized (sum within 1e-9 of one). When every factor is
// exactly one the input is returned unchanged, bit for bit.
std::vector<double> prod_update(std::span<const double> weights,
                                std::span<const double> rewards,
                                double optimism, double learning_rate);

// Exponential-weights step: w_i *= exp(rate * reward_i), renormalized. The
// largest exponent is subtracted before exponentiating.
std::vector<double> hedge_step(std::span<const double> weights,
                               std::span<const double> rewards,
                               double learning_rate);

struct BidProposal {
  double bid = 0.0;
  int expert_index = -1;
};

// Sequential bidding interface. Callers alternate propose() / observe();
// expected_reward() is valid between the two and prices the pending
// proposal's randomness against a hypothetical outcome. The outcome passed
// to expected_reward()/observe() must carry the proposed valuation.
class BidPolicy {
 public:
  virtual ~BidPolicy() = default;

  BidProposal propose(double valuation, Rng& rng);
  double expected_reward(const AuctionRound& round) const;
  void observe(const AuctionRound& round);

  virtual std::string_view name() const = 0;

  // Benchmark devices may peek at the rival bid; the episode runner treats
  // them specially and they are excluded from non-anticipation guarantees.
  virtual bool clairvoyant() const { return false; }

 protected:
  virtual BidProposal do_propose(double valuation, Rng& rng) = 0;
  virtual double pending_expected_reward(const AuctionRound& round) const = 0;
  virtual void do_observe(const AuctionRound& round) = 0;

  double pending_valuation() const { return pending_valuation_; }

 private:
  void require_pending_valuation(const AuctionRound& round) const;

  bool awaiting_observe_ = false;
  double pending_valuation_ = 0.0;
};

// ---- Hedge -----------------------------------------------------------

struct HedgeConfig {
  double epsilon = 1.0;          // expert grid width
  double learning_rate = 0.0;    // 0 defers to sqrt(8 ln N / batch_size)
  std::int64_t batch_size = 0;   // weights reset to uniform every batch_size
                                 // rounds; >= horizon means never
};

class HedgePolicy final : public BidPolicy {
 public:
  HedgePolicy(std::int64_t horizon, HedgeConfig config, bool restarting);

  std::string_view name() const override { return name_; }
  const BidGrid& grid() const { return grid_; }
  const std::vector<double>& weights() const { return weights_; }
  double learning_rate() const { return learning_rate_; }
  std::int64_t batch_size() const { return batch_size_; }

 protected:
  BidProposal do_propose(double valuation, Rng& rng) override;
  double pending_expected_reward(const AuctionRound& round) const override;
  void do_observe(const AuctionRound& round) override;

 private:
  std::string name_;
  BidGrid grid_;
  std::vector<double> weights_;
  mutable std::vector<double> scratch_;
  double learning_rate_ = 0.0;
  std::int64_t batch_size_ = 0;
  std::int64_t rounds_in_batch_ = 0;
};

// ---- Optimistic multiplicative forecaster with restarts ---------------

struct ProdRestartConfig {
  double learning_rate = 0.0;
  double epsilon = 0.0;
  double c = 0.0;  // additive constant inside the restart guard

  // Conservative parameters: rate 1/2, grid width 1/T, c = 1/T.
  static ProdRestartConfig analysis_defaults(std::int64_t horizon);
  // Parameters used by the simulation harness: rate 1, grid width
  // 4/sqrt(T), c = 1/T.
  static ProdRestartConfig simulation_defaults(std::int64_t horizon);
};

// Plays exponential-free multiplicative updates toward experts that beat the
// clairvoyant slack, and reopens a fresh uniform batch as soon as the open
// batch length reaches sqrt(T / (accumulated rival variation + c)).
class ProdRestartPolicy final : public BidPolicy {
 public:
  ProdRestartPolicy(std::int64_t horizon, ProdRestartConfig config);

  std::string_view name() const override { return "ar_prod"; }
  const BidGrid& grid() const { return grid_; }
  const std::vector<double>& weights() const { return weights_; }
  int batch_index() const { return batch_index_; }
  std::int64_t rounds_in_batch() const { return rounds_in_batch_; }
  double batch_variation() const { return batch_variation_; }
  double cumulative_variation() const {
    return closed_variation_ + batch_variation_;
  }
  // Open batch must stay strictly shorter than this.
  double restart_threshold() const;

 protected:
  BidProposal do_propose(double valuation, Rng& rng) override;
  double pending_expected_reward(const AuctionRound& round) const override;
  void do_observe(const AuctionRound& round) override;

 private:
  std::int64_t horizon_ = 0;
  ProdRestartConfig config_;
  BidGrid grid_;
  std::vector<double> weights_;
  mutable std::vector<double> scratch_;
  int batch_index_ = 0;
  std::int64_t rounds_in_batch_ = 0;
  double batch_variation_ = 0.0;
  double closed_variation_ = 0.0;
  std::optional<double> last_rival_in_batch_;
};

// ---- Optimistic mirror descent with switch-triggered restarts ----------

struct OmdRestartConfig {
  double learning_rate = 0.0;
  double epsilon = 0.0;
  double switch_tolerance = kDefaultSwitchTolerance;

  // Parameters used by the simulation harness: grid width T^-0.9, rate
  // sqrt(ln(T^0.9)).
  static OmdRestartConfig simulation_defaults(std::int64_t horizon);
};

// Exponential weights over batch-local cumulative rewards plus an optimism
// term that prices each expert against the previous rival bid. A batch
// closes when the observed rival bid moves by at least switch_tolerance
// (never on the batch's first round); the next batch restarts the sums.
//
// Weights are only materialized on the support where the cumulative rewards
// or the optimism are nonzero; everything outside shares one flat weight.
class OmdRestartPolicy final : public BidPolicy {
 public:
  OmdRestartPolicy(std::int64_t horizon, OmdRestartConfig config);

  std::string_view name() const override { return "ar_omd"; }
  const BidGrid& grid() const { return grid_; }
  int batch_index() const { return batch_index_; }
  const std::vector<double>& cumulative_rewards() const { return sums_; }
  // Distribution used by the most recent propose().
  std::vector<double> last_distribution() const;

 protected:
  BidProposal do_propose(double valuation, Rng& rng) override;
  double pending_expected_reward(const AuctionRound& round) const override;
  void do_observe(const AuctionRound& round) override;

 private:
  double materialized_weight(int i) const;

  OmdRestartConfig config_;
  BidGrid grid_;
  std::vector<double> sums_;    // batch-local per-expert reward sums
  int sums_lo_ = 0, sums_hi_ = 0;
  std::optional<double> last_rival_;
  bool first_round_of_batch_ = true;
  int batch_index_ = 0;

  // Propose-time snapshot: exp weights over [wlo_, whi_), flat weight for
  // every other expert, and their total mass.
  std::vector<double> exp_weights_;
  int wlo_ = 0, whi_ = 0;
  double flat_weight_ = 1.0;
  double total_mass_ = 0.0;
};

// ---- Two-policy combiner ----------------------------------------------

// Samples between two child policies with a multiplicative weight on the
// first child only: w_a *= 1 + rate * (reward_a - reward_b) after every
// round, while w_b stays fixed at its initial value. The first child's
// weight starts at rate, the second at 1 - rate.
class CombinerPolicy final : public BidPolicy {
 public:
  CombinerPolicy(std::int64_t horizon, std::unique_ptr<BidPolicy> a,
                 std::unique_ptr<BidPolicy> b,
                 double learning_rate = 0.0);  // 0 defers to sqrt(ln T / T)/2

  std::string_view name() const override { return "bobw"; }
  double learning_rate() const { return learning_rate_; }
  double mix_probability() const;  // P(play child a)
  double weight_a() const;
  double log_weight_a() const { return log_weight_a_; }
  double weight_b() const { return weight_b_; }
  const BidPolicy& child_a() const { return *a_; }
  const BidPolicy& child_b() const { return *b_; }

 protected:
  BidProposal do_propose(double valuation, Rng& rng) override;
  double pending_expected_reward(const AuctionRound& round) const override;
  void do_observe(const AuctionRound& round) override;

 private:
  std::unique_ptr<BidPolicy> a_;
  std::unique_ptr<BidPolicy> b_;
  double learning_rate_ = 0.0;
  double log_weight_a_ = 0.0;
  double weight_b_ = 0.0;
  BidProposal proposal_a_;
  BidProposal proposal_b_;
};

}  // namespace bidcraft
