#include "bidcraft/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bidcraft/rng.hpp"

namespace bidcraft {

namespace {

double sum(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0);
}

}  // namespace

double RegretTrace::final_regret_expected() const {
  return cumulative_regret.empty() ? 0.0 : cumulative_regret.back();
}

double RegretTrace::final_regret_realized() const {
  return sum(benchmark_increments) - sum(rewards_realized);
}

double RegretTrace::total_reward_expected() const {
  return sum(rewards_expected);
}

double RegretTrace::total_reward_realized() const {
  return sum(rewards_realized);
}

double RegretTrace::measured_variation() const {
  return temporal_variation(rival_bids);
}

std::int64_t RegretTrace::measured_switches(double tolerance) const {
  return switch_count(rival_bids, tolerance);
}

double OraclePolicy::pending_expected_reward(const AuctionRound& round) const {
  return reward(optimal_bid(round), round);
}

double ZeroPolicy::pending_expected_reward(const AuctionRound& round) const {
  return reward(0.0, round);
}

RegretTrace run_episode(BidPolicy& policy, const EnvironmentSpec& spec,
                        std::uint64_t seed) {
  EnvironmentSpec episode = spec;
  episode.seed = seed;
  auto env = make_env(episode);
  Rng policy_rng(derive_seed(seed, {3}));

  const std::int64_t horizon = env->horizon();
  RegretTrace trace;
  trace.policy_name = policy.name();
  trace.environment_digest = env_digest(episode);
  trace.seed = seed;
  const auto cap = static_cast<std::size_t>(horizon);
  trace.valuations.reserve(cap);
  trace.rival_bids.reserve(cap);
  trace.bids.reserve(cap);
  trace.rewards_realized.reserve(cap);
  trace.rewards_expected.reserve(cap);
  trace.benchmark_increments.reserve(cap);
  trace.cumulative_regret.reserve(cap);

  double benchmark_sum = 0.0;
  double expected_sum = 0.0;
  for (std::int64_t t = 0; t < horizon; ++t) {
    try {
      const double valuation = env->valuation(t);
      const BidProposal proposal = policy.propose(valuation, policy_rng);
      const double rival = env->rival_bid(t);
      const AuctionRound round{valuation, rival};
      const double bid =
          policy.clairvoyant() ? optimal_bid(round) : proposal.bid;
      const double expected = policy.expected_reward(round);
      const double realized = reward(bid, round);
      policy.observe(round);
      env->settle(t, bid);

      benchmark_sum += reward(optimal_bid(round), round);
      expected_sum += expected;
      trace.valuations.push_back(valuation);
      trace.rival_bids.push_back(rival);
      trace.bids.push_back(bid);
      trace.rewards_realized.push_back(realized);
      trace.rewards_expected.push_back(expected);
      trace.benchmark_increments.push_back(reward(optimal_bid(round), round));
      trace.cumulative_regret.push_back(benchmark_sum - expected_sum);
    } catch (const std::exception& e) {
      throw std::runtime_error("round " + std::to_string(t + 1) + ": " +
                               e.what());
    }
  }
  return trace;
}

DecompositionReport regret_decomposition(
    const RegretTrace& trace, const BidGrid& grid,
    std::span<const std::int64_t> boundaries) {
  const std::int64_t horizon = trace.horizon();
  if (boundaries.empty() || boundaries.front() != 0)
    throw std::invalid_argument("batch boundaries must start at 0");
  for (std::size_t i = 1; i < boundaries.size(); ++i)
    if (boundaries[i] <= boundaries[i - 1])
      throw std::invalid_argument("batch boundaries must be strictly increasing");
  if (boundaries.back() >= horizon)
    throw std::invalid_argument("batch boundaries must lie inside the trace");

  DecompositionReport report;
  report.boundaries.assign(boundaries.begin(), boundaries.end());

  const int experts = grid.count();
  std::vector<double> expert_sums(static_cast<std::size_t>(experts));
  std::vector<double> round_rewards(static_cast<std::size_t>(experts));
  for (std::size_t j = 0; j < boundaries.size(); ++j) {
    const std::int64_t begin = boundaries[j];
    const std::int64_t end =
        j + 1 < boundaries.size() ? boundaries[j + 1] : horizon;
    std::fill(expert_sums.begin(), expert_sums.end(), 0.0);
    double roundwise_best = 0.0;
    double expected = 0.0;
    for (std::int64_t t = begin; t < end; ++t) {
      const auto u = static_cast<std::size_t>(t);
      const AuctionRound round{trace.valuations[u], trace.rival_bids[u]};
      expert_rewards(grid, round, round_rewards);
      double best = 0.0;
      for (std::size_t i = 0; i < round_rewards.size(); ++i) {
        expert_sums[i] += round_rewards[i];
        best = std::max(best, round_rewards[i]);
      }
      roundwise_best += best;
      expected += trace.rewards_expected[u];
    }
    const double best_fixed =
        *std::max_element(expert_sums.begin(), expert_sums.end());
    report.static_regret.push_back(best_fixed - expected);
    report.transition_cost.push_back(roundwise_best - best_fixed);
  }
  report.static_total = sum(report.static_regret);
  report.transition_total = sum(report.transition_cost);
  report.grid_dynamic_regret = report.static_total + report.transition_total;
  return report;
}

SlopeReport fit_loglog_slope(
    std::span<const std::pair<std::int64_t, double>> points) {
  if (points.size() < 2)
    throw std::invalid_argument("slope fit needs at least 2 points");
  SlopeReport report;
  std::vector<double> xs, ys;
  for (const auto& [horizon, regret] : points) {
    if (horizon < 1)
      throw std::invalid_argument("slope fit horizons must be positive");
    report.horizons.push_back(horizon);
    report.mean_regrets.push_back(regret);
    xs.push_back(std::log(static_cast<double>(horizon)));
    ys.push_back(std::log(std::max(regret, 1e-9)));
  }
  const double n = static_cast<double>(xs.size());
  const double x_bar = sum(xs) / n;
  const double y_bar = sum(ys) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - x_bar) * (xs[i] - x_bar);
    sxy += (xs[i] - x_bar) * (ys[i] - y_bar);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("slope fit needs at least 2 distinct horizons");
  report.slope = sxy / sxx;
  report.intercept = y_bar - report.slope * x_bar;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = report.intercept + report.slope * xs[i];
    rss += (ys[i] - fit) * (ys[i] - fit);
  }
  report.residual = std::sqrt(rss);
  report.n_points = static_cast<std::int64_t>(points.size());
  return report;
}

double dp_minimax_oracle(std::int64_t h, double delta) {
  if (h < 2) throw std::invalid_argument("H must be at least 2");
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("delta must lie in [0, 1]");
  // With k rounds left and the jump still unseen, the jump lands now with
  // probability 1/k. Bidding 0 risks 1-delta now; bidding delta overpays
  // delta on each of the k-1 continuation rounds' no-jump branch.
  double value = 0.0;
  for (std::int64_t k = 1; k <= h; ++k)
    value = (static_cast<double>(k - 1) * value +
             std::min(static_cast<double>(k - 1) * delta, 1.0 - delta)) /
            static_cast<double>(k);
  return value;
}

}  // namespace bidcraft
