#include "bidcraft/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bidcraft {

namespace {

void check_pair(std::span<const double> weights,
                std::span<const double> rewards) {
  if (weights.empty()) throw std::invalid_argument("weights must be nonempty");
  if (weights.size() != rewards.size())
    throw std::invalid_argument("weights and rewards must share a length");
}

void check_normalized(std::span<const double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("input weights must sum to one");
}

// Returns false when every factor is exactly one, in which case the weights
// are untouched bit for bit.
bool prod_step_inplace(std::span<double> weights,
                       std::span<const double> rewards, double optimism,
                       double rate) {
  bool moved = false;
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double factor = 1.0 + rate * (rewards[i] - optimism);
    if (factor < kProdFactorFloor) factor = kProdFactorFloor;
    if (factor != 1.0) moved = true;
    weights[i] *= factor;
    sum += weights[i];
  }
  if (!moved) return false;
  for (double& w : weights) w /= sum;
  return true;
}

void hedge_step_inplace(std::span<double> weights,
                        std::span<const double> rewards, double rate) {
  double top = -std::numeric_limits<double>::infinity();
  for (double r : rewards) top = std::max(top, rate * r);
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] *= std::exp(rate * rewards[i] - top);
    sum += weights[i];
  }
  for (double& w : weights) w /= sum;
}

int sample_index(std::span<const double> weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = u * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (cum > target) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Offset of a uniform draw into a run of `limit` equal weights.
int flat_offset(double target, double weight, int limit) {
  double off = std::floor(target / weight);
  if (!(off >= 0.0)) off = 0.0;
  const double cap = static_cast<double>(limit - 1);
  if (off > cap) off = cap;
  return static_cast<int>(off);
}

}  // namespace

double compute_optimism(const AuctionRound& round) {
  return std::max(round.valuation - round.rival_high_bid, 0.0);
}

std::vector<double> prod_update(std::span<const double> weights,
                                std::span<const double> rewards,
                                double optimism, double learning_rate) {
  check_pair(weights, rewards);
  check_normalized(weights);
  std::vector<double> out(weights.begin(), weights.end());
  prod_step_inplace(out, rewards, optimism, learning_rate);
  return out;
}

std::vector<double> hedge_step(std::span<const double> weights,
                               std::span<const double> rewards,
                               double learning_rate) {
  check_pair(weights, rewards);
  check_normalized(weights);
  std::vector<double> out(weights.begin(), weights.end());
  hedge_step_inplace(out, rewards, learning_rate);
  return out;
}

// ---- BidPolicy sequencing ----------------------------------------------

BidProposal BidPolicy::propose(double valuation, Rng& rng) {
  if (awaiting_observe_)
    throw std::logic_error("propose called twice without an observe");
  if (!(valuation >= 0.0 && valuation <= 1.0))
    throw std::invalid_argument("valuation must lie in [0, 1]");
  pending_valuation_ = valuation;
  BidProposal proposal = do_propose(valuation, rng);
  awaiting_observe_ = true;
  return proposal;
}

double BidPolicy::expected_reward(const AuctionRound& round) const {
  if (!awaiting_observe_)
    throw std::logic_error("expected_reward requires a pending proposal");
  require_pending_valuation(round);
  return pending_expected_reward(round);
}

void BidPolicy::observe(const AuctionRound& round) {
  if (!awaiting_observe_)
    throw std::logic_error("observe called twice without an intervening propose");
  require_pending_valuation(round);
  do_observe(round);
  awaiting_observe_ = false;
}

void BidPolicy::require_pending_valuation(const AuctionRound& round) const {
  if (round.valuation != pending_valuation_)
    throw std::logic_error("round valuation differs from the proposed one");
}

// ---- HedgePolicy ---------------------------------------------------------

HedgePolicy::HedgePolicy(std::int64_t horizon, HedgeConfig config,
                         bool restarting)
    : name_(restarting ? "restart_hedge" : "hedge"),
      grid_(config.epsilon),
      batch_size_(config.batch_size > 0 ? config.batch_size : horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  const int n = grid_.count();
  weights_.assign(static_cast<std::size_t>(n), 1.0 / n);
  scratch_.assign(static_cast<std::size_t>(n), 0.0);
  learning_rate_ =
      config.learning_rate > 0.0
          ? config.learning_rate
          : std::sqrt(8.0 * std::log(static_cast<double>(std::max(n, 2))) /
                      static_cast<double>(batch_size_));
}

BidProposal HedgePolicy::do_propose(double valuation, Rng& rng) {
  const int idx = sample_index(weights_, rng.uniform());
  return {grid_.expert_bid(idx, valuation), idx};
}

double HedgePolicy::pending_expected_reward(const AuctionRound& round) const {
  expert_rewards(grid_, round, scratch_);
  return dot(weights_, scratch_);
}

void HedgePolicy::do_observe(const AuctionRound& round) {
  expert_rewards(grid_, round, scratch_);
  hedge_step_inplace(weights_, scratch_, learning_rate_);
  if (++rounds_in_batch_ >= batch_size_) {
    std::fill(weights_.begin(), weights_.end(), 1.0 / grid_.count());
    rounds_in_batch_ = 0;
  }
}

// ---- ProdRestartPolicy ---------------------------------------------------

ProdRestartConfig ProdRestartConfig::analysis_defaults(std::int64_t horizon) {
  const double t = static_cast<double>(horizon);
  return {0.5, 1.0 / t, 1.0 / t};
}

ProdRestartConfig ProdRestartConfig::simulation_defaults(std::int64_t horizon) {
  const double t = static_cast<double>(horizon);
  return {1.0, std::min(1.0, 4.0 / std::sqrt(t)), 1.0 / t};
}

ProdRestartPolicy::ProdRestartPolicy(std::int64_t horizon,
                                     ProdRestartConfig config)
    : horizon_(horizon), config_(config), grid_(config.epsilon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (!(config.learning_rate > 0.0))
    throw std::invalid_argument("learning rate must be positive");
  if (!(config.c > 0.0))
    throw std::invalid_argument("restart guard constant must be positive");
  const int n = grid_.count();
  weights_.assign(static_cast<std::size_t>(n), 1.0 / n);
  scratch_.assign(static_cast<std::size_t>(n), 0.0);
}

double ProdRestartPolicy::restart_threshold() const {
  return std::sqrt(static_cast<double>(horizon_) /
                   (closed_variation_ + batch_variation_ + config_.c));
}

BidProposal ProdRestartPolicy::do_propose(double valuation, Rng& rng) {
  const int idx = sample_index(weights_, rng.uniform());
  return {grid_.expert_bid(idx, valuation), idx};
}

double ProdRestartPolicy::pending_expected_reward(
    const AuctionRound& round) const {
  expert_rewards(grid_, round, scratch_);
  return dot(weights_, scratch_);
}

void ProdRestartPolicy::do_observe(const AuctionRound& round) {
  ++rounds_in_batch_;
  if (last_rival_in_batch_)
    batch_variation_ += std::abs(round.rival_high_bid - *last_rival_in_batch_);
  last_rival_in_batch_ = round.rival_high_bid;

  expert_rewards(grid_, round, scratch_);
  prod_step_inplace(weights_, scratch_, compute_optimism(round),
                    config_.learning_rate);

  if (static_cast<double>(rounds_in_batch_) >= restart_threshold()) {
    ++batch_index_;
    closed_variation_ += batch_variation_;
    batch_variation_ = 0.0;
    rounds_in_batch_ = 0;
    last_rival_in_batch_.reset();
    std::fill(weights_.begin(), weights_.end(), 1.0 / grid_.count());
  }
}

// ---- OmdRestartPolicy ------------------------------------------------

OmdRestartConfig OmdRestartConfig::simulation_defaults(std::int64_t horizon) {
  if (horizon < 2) throw std::invalid_argument("horizon must be at least 2");
  const double t = static_cast<double>(horizon);
  return {std::sqrt(0.9 * std::log(t)), 1.0 / std::pow(t, 0.9),
          kDefaultSwitchTolerance};
}

OmdRestartPolicy::OmdRestartPolicy(std::int64_t horizon,
                                   OmdRestartConfig config)
    : config_(config), grid_(config.epsilon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (!(config.learning_rate > 0.0))
    throw std::invalid_argument("learning rate must be positive");
  if (!(config.switch_tolerance >= 0.0))
    throw std::invalid_argument("switch tolerance must be nonnegative");
  sums_.assign(static_cast<std::size_t>(grid_.count()), 0.0);
}

BidProposal OmdRestartPolicy::do_propose(double valuation, Rng& rng) {
  const int n = grid_.count();
  const double eta = config_.learning_rate;
  ExpertWindow owin{0, 0};
  if (last_rival_)
    owin = positive_reward_window(grid_, {valuation, *last_rival_});

  const bool have_sums = sums_lo_ < sums_hi_;
  const bool have_optimism = !owin.empty();
  if (have_sums || have_optimism) {
    wlo_ = have_sums ? (have_optimism ? std::min(sums_lo_, owin.lo) : sums_lo_)
                     : owin.lo;
    whi_ = have_sums ? (have_optimism ? std::max(sums_hi_, owin.hi) : sums_hi_)
                     : owin.hi;
  } else {
    wlo_ = whi_ = 0;
  }

  exp_weights_.resize(static_cast<std::size_t>(whi_ - wlo_));
  // Flat experts sit at logit zero; include that in the max when any exist.
  double top = (wlo_ > 0 || whi_ < n)
                   ? 0.0
                   : -std::numeric_limits<double>::infinity();
  for (int i = wlo_; i < whi_; ++i) {
    double logit = eta * sums_[static_cast<std::size_t>(i)];
    if (i >= owin.lo && i < owin.hi)
      logit += eta * (valuation - grid_.threshold(i));
    exp_weights_[static_cast<std::size_t>(i - wlo_)] = logit;
    top = std::max(top, logit);
  }
  double materialized = 0.0;
  for (double& w : exp_weights_) {
    w = std::exp(w - top);
    materialized += w;
  }
  flat_weight_ = std::exp(-top);
  total_mass_ =
      materialized + static_cast<double>(n - (whi_ - wlo_)) * flat_weight_;

  // Sample by walking the three runs: flat left, materialized, flat right.
  double target = rng.uniform() * total_mass_;
  int idx = -1;
  const double left_mass = static_cast<double>(wlo_) * flat_weight_;
  if (wlo_ > 0 && flat_weight_ > 0.0 && target < left_mass) {
    idx = flat_offset(target, flat_weight_, wlo_);
  } else {
    target -= left_mass;
    double cum = 0.0;
    for (int k = 0; k < whi_ - wlo_; ++k) {
      cum += exp_weights_[static_cast<std::size_t>(k)];
      if (cum > target) {
        idx = wlo_ + k;
        break;
      }
    }
    if (idx < 0) {
      target -= materialized;
      if (whi_ < n && flat_weight_ > 0.0)
        idx = whi_ + flat_offset(target, flat_weight_, n - whi_);
      else
        idx = std::max(whi_ - 1, 0);  // numeric tail of the scan
    }
  }
  return {grid_.expert_bid(idx, valuation), idx};
}

double OmdRestartPolicy::materialized_weight(int i) const {
  return (i >= wlo_ && i < whi_)
             ? exp_weights_[static_cast<std::size_t>(i - wlo_)]
             : flat_weight_;
}

double OmdRestartPolicy::pending_expected_reward(
    const AuctionRound& round) const {
  const ExpertWindow rwin = positive_reward_window(grid_, round);
  double sum = 0.0;
  for (int i = rwin.lo; i < rwin.hi; ++i)
    sum += materialized_weight(i) * (round.valuation - grid_.threshold(i));
  return sum / total_mass_;
}

std::vector<double> OmdRestartPolicy::last_distribution() const {
  std::vector<double> out(static_cast<std::size_t>(grid_.count()));
  for (int i = 0; i < grid_.count(); ++i)
    out[static_cast<std::size_t>(i)] = materialized_weight(i) / total_mass_;
  return out;
}

void OmdRestartPolicy::do_observe(const AuctionRound& round) {
  const double m = round.rival_high_bid;
  const double move = last_rival_ ? std::abs(m - *last_rival_) : 0.0;
  const bool switched = !first_round_of_batch_ && move != 0.0 &&
                        move >= config_.switch_tolerance;
  if (switched) {
    // The dying batch's sums never carry over; the next round opens fresh.
    std::fill(sums_.begin() + sums_lo_, sums_.begin() + sums_hi_, 0.0);
    sums_lo_ = sums_hi_ = 0;
    ++batch_index_;
    first_round_of_batch_ = true;
  } else {
    const ExpertWindow rwin = positive_reward_window(grid_, round);
    for (int i = rwin.lo; i < rwin.hi; ++i)
      sums_[static_cast<std::size_t>(i)] +=
          round.valuation - grid_.threshold(i);
    if (!rwin.empty()) {
      if (sums_lo_ >= sums_hi_) {
        sums_lo_ = rwin.lo;
        sums_hi_ = rwin.hi;
      } else {
        sums_lo_ = std::min(sums_lo_, rwin.lo);
        sums_hi_ = std::max(sums_hi_, rwin.hi);
      }
    }
    first_round_of_batch_ = false;
  }
  last_rival_ = m;
}

// ---- CombinerPolicy ------------------------------------------------------

CombinerPolicy::CombinerPolicy(std::int64_t horizon,
                               std::unique_ptr<BidPolicy> a,
                               std::unique_ptr<BidPolicy> b,
                               double learning_rate)
    : a_(std::move(a)), b_(std::move(b)) {
  if (!a_ || !b_) throw std::invalid_argument("combiner needs two children");
  if (learning_rate <= 0.0) {
    if (horizon < 2) throw std::invalid_argument("horizon must be at least 2");
    const double t = static_cast<double>(horizon);
    learning_rate = 0.5 * std::sqrt(std::log(t) / t);
  }
  if (!(learning_rate > 0.0 && learning_rate < 1.0))
    throw std::invalid_argument("combiner learning rate must lie in (0, 1)");
  learning_rate_ = learning_rate;
  log_weight_a_ = std::log(learning_rate_);
  weight_b_ = 1.0 - learning_rate_;
}

double CombinerPolicy::mix_probability() const {
  return 1.0 / (1.0 + std::exp(std::log(weight_b_) - log_weight_a_));
}

double CombinerPolicy::weight_a() const { return std::exp(log_weight_a_); }

BidProposal CombinerPolicy::do_propose(double valuation, Rng& rng) {
  proposal_a_ = a_->propose(valuation, rng);
  proposal_b_ = b_->propose(valuation, rng);
  const bool pick_a = rng.uniform() < mix_probability();
  return pick_a ? proposal_a_ : proposal_b_;
}

double CombinerPolicy::pending_expected_reward(
    const AuctionRound& round) const {
  const double p = mix_probability();
  return p * a_->expected_reward(round) +
         (1.0 - p) * b_->expected_reward(round);
}

void CombinerPolicy::do_observe(const AuctionRound& round) {
  const double delta =
      reward(proposal_a_.bid, round) - reward(proposal_b_.bid, round);
  log_weight_a_ += std::log1p(learning_rate_ * delta);
  a_->observe(round);
  b_->observe(round);
}

}  // namespace bidcraft
