#include "bidcraft/auction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bidcraft/util.hpp"

namespace bidcraft {

double reward(double bid, const AuctionRound& round) {
  if (!(bid >= 0.0 && bid <= 1.0))
    throw std::invalid_argument("bid must lie in [0, 1]");
  return bid >= round.rival_high_bid ? round.valuation - bid : 0.0;
}

double optimal_bid(const AuctionRound& round) {
  return std::min(round.valuation, round.rival_high_bid);
}

double dynamic_benchmark(std::span<const AuctionRound> rounds) {
  double total = 0.0;
  for (const auto& r : rounds)
    total += std::max(r.valuation - r.rival_high_bid, 0.0);
  return total;
}

BidGrid::BidGrid(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("grid epsilon must lie in (0, 1]");
  const std::int64_t n = nudged_floor(1.0 / epsilon);
  if (n > 100'000'000)
    throw std::invalid_argument("grid epsilon is too small to materialize");
  count_ = static_cast<int>(n);
}

double BidGrid::threshold(int i) const {
  return std::min((i + 1) * epsilon_, 1.0);
}

double BidGrid::expert_bid(int i, double valuation) const {
  return std::min(valuation, threshold(i));
}

ExpertWindow positive_reward_window(const BidGrid& grid,
                                    const AuctionRound& round) {
  const double v = round.valuation;
  const double m = round.rival_high_bid;
  const int n = grid.count();
  if (v < m) return {0, 0};

  // Seed both endpoints from index arithmetic, then fix up against the real
  // thresholds so representation error cannot shift the window.
  int lo = static_cast<int>(std::clamp<std::int64_t>(
      nudged_floor(m / grid.epsilon()) - 1, 0, n));
  while (lo < n && grid.threshold(lo) < m) ++lo;
  while (lo > 0 && grid.threshold(lo - 1) >= m) --lo;

  int hi = static_cast<int>(std::clamp<std::int64_t>(
      nudged_floor(v / grid.epsilon()) + 1, 0, n));
  while (hi > 0 && grid.threshold(hi - 1) > v) --hi;
  while (hi < n && grid.threshold(hi) <= v) ++hi;

  return {lo, std::max(lo, hi)};
}

void expert_rewards(const BidGrid& grid, const AuctionRound& round,
                    std::span<double> out) {
  if (static_cast<int>(out.size()) != grid.count())
    throw std::invalid_argument("expert reward span must match grid count");
  std::fill(out.begin(), out.end(), 0.0);
  const ExpertWindow win = positive_reward_window(grid, round);
  for (int i = win.lo; i < win.hi; ++i)
    out[i] = round.valuation - grid.threshold(i);
}

std::vector<double> expert_reward_vector(const BidGrid& grid,
                                         const AuctionRound& round) {
  std::vector<double> out(static_cast<std::size_t>(grid.count()));
  expert_rewards(grid, round, out);
  return out;
}

double temporal_variation(std::span<const double> rival_bids) {
  double total = 0.0;
  for (std::size_t t = 1; t < rival_bids.size(); ++t)
    total += std::abs(rival_bids[t] - rival_bids[t - 1]);
  return total;
}

std::int64_t switch_count(std::span<const double> rival_bids,
                          double tolerance) {
  std::int64_t n = 0;
  for (std::size_t t = 1; t < rival_bids.size(); ++t) {
    const double d = std::abs(rival_bids[t] - rival_bids[t - 1]);
    if (d != 0.0 && d >= tolerance) ++n;
  }
  return n;
}

namespace {

// lim_{b -> x-} reward(b): the win indicator flips to a strict inequality.
double reward_left_limit(double x, const AuctionRound& r) {
  return x > r.rival_high_bid ? r.valuation - x : 0.0;
}

}  // namespace

double sup_reward_difference(const AuctionRound& a, const AuctionRound& b) {
  double best = 0.0;
  for (double x : {0.0, 1.0, a.rival_high_bid, b.rival_high_bid})
    best = std::max(best, std::abs(reward(x, a) - reward(x, b)));
  for (double x : {a.rival_high_bid, b.rival_high_bid})
    if (x > 0.0)
      best = std::max(best,
                      std::abs(reward_left_limit(x, a) - reward_left_limit(x, b)));
  return best;
}

}  // namespace bidcraft
