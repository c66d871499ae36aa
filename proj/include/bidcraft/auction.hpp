// Core first-price auction quantities: per-round rewards, the truncated
// threshold expert grid, clairvoyant bids, and the variation metrics used to
// size restart schedules.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bidcraft {

inline constexpr double kDefaultSwitchTolerance = 1e-6;

// One repeated-auction round from the learner's side. Both entries live in
// [0, 1]; rival_high_bid is the highest competing bid, revealed only after
// the learner commits its own bid.
struct AuctionRound {
  double valuation = 0.0;
  double rival_high_bid = 0.0;
};

using AuctionSequence = std::vector<AuctionRound>;

// Payoff of submitting bid in a round: valuation minus price on a win, zero
// on a loss. Ties break in the learner's favor. Throws std::invalid_argument
// if bid leaves [0, 1].
double reward(double bid, const AuctionRound& round);

// Clairvoyant per-round bid: match the rival price when the round is
// winnable at a profit, otherwise bid the valuation and lose at zero cost.
double optimal_bid(const AuctionRound& round);

// Sum of max(valuation - rival_high_bid, 0) over the sequence.
double dynamic_benchmark(std::span<const AuctionRound> rounds);

// Uniform grid of truncated bidding experts. Expert i (0-based) bids
// min(valuation, threshold(i)) with threshold(i) = (i + 1) * epsilon, so all
// thresholds lie in (0, 1].
class BidGrid {
 public:
  explicit BidGrid(double epsilon);

  double epsilon() const { return epsilon_; }
  int count() const { return count_; }
  double threshold(int i) const;
  double expert_bid(int i, double valuation) const;

 private:
  double epsilon_ = 1.0;
  int count_ = 1;
};

// Index range of experts whose threshold lies in [rival_high_bid, valuation]:
// exactly the ones earning reward valuation - threshold this round. Every
// other expert earns zero (it either loses or bids the full valuation).
struct ExpertWindow {
  int lo = 0;
  int hi = 0;  // half-open

  bool empty() const { return lo >= hi; }
};

ExpertWindow positive_reward_window(const BidGrid& grid,
                                    const AuctionRound& round);

// Per-expert rewards for one round; out.size() must equal grid.count().
void expert_rewards(const BidGrid& grid, const AuctionRound& round,
                    std::span<double> out);
std::vector<double> expert_reward_vector(const BidGrid& grid,
                                         const AuctionRound& round);

// Total movement of the rival-bid sequence: sum of |m_t - m_{t-1}|.
double temporal_variation(std::span<const double> rival_bids);

// Number of rounds whose rival bid moved by at least tolerance relative to
// the previous round (any nonzero move when tolerance is zero).
std::int64_t switch_count(std::span<const double> rival_bids,
                          double tolerance = kDefaultSwitchTolerance);

// Largest absolute reward gap a single bid can see between two rounds. The
// gap is piecewise linear in the bid with jumps only at the two rival bids,
// so it is evaluated exactly at {0, 1, both rival bids} plus the left limits
// at the rival bids, rather than on a search grid.
double sup_reward_difference(const AuctionRound& a, const AuctionRound& b);

}  // namespace bidcraft
