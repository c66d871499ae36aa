#include "bidcraft/environments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "bidcraft/util.hpp"

namespace bidcraft {

namespace {

std::int64_t segment_count(double variation_target) {
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(variation_target - 1e-9)));
}

bool is_pattern_kind(EnvKind kind) {
  switch (kind) {
    case EnvKind::kConstant:
    case EnvKind::kExponential:
    case EnvKind::kLinear:
    case EnvKind::kMultiSegment:
    case EnvKind::kSinusoidal:
      return true;
    default:
      return false;
  }
}

void validate_pattern_fit(const EnvironmentSpec& spec, EnvKind kind) {
  if (kind != EnvKind::kSinusoidal &&
      3 * segment_count(spec.variation_target) > spec.horizon)
    throw std::invalid_argument(
        "variation_target needs 3 rounds per segment but horizon is too "
        "short");
}

template <typename T>
T field_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("environment spec field '") + key +
                                "' has the wrong type");
  }
}

}  // namespace

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kConstant: return "constant";
    case EnvKind::kExponential: return "exponential";
    case EnvKind::kLinear: return "linear";
    case EnvKind::kMultiSegment: return "multi_segment";
    case EnvKind::kSinusoidal: return "sinusoidal";
    case EnvKind::kLowerBoundVt: return "lower_bound_vt";
    case EnvKind::kLowerBoundLt: return "lower_bound_lt";
    case EnvKind::kBudgetPacing: return "budget_pacing";
  }
  throw std::invalid_argument("unknown environment kind");
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "constant") return EnvKind::kConstant;
  if (name == "exponential") return EnvKind::kExponential;
  if (name == "linear") return EnvKind::kLinear;
  if (name == "multi_segment") return EnvKind::kMultiSegment;
  if (name == "sinusoidal") return EnvKind::kSinusoidal;
  if (name == "lower_bound_vt") return EnvKind::kLowerBoundVt;
  if (name == "lower_bound_lt") return EnvKind::kLowerBoundLt;
  if (name == "budget_pacing") return EnvKind::kBudgetPacing;
  throw std::invalid_argument(
      "unknown environment kind '" + name +
      "' (expected constant, exponential, linear, multi_segment, sinusoidal, "
      "lower_bound_vt, lower_bound_lt, or budget_pacing)");
}

void validate_spec(const EnvironmentSpec& spec) {
  if (spec.horizon < 1)
    throw std::invalid_argument("horizon must be at least 1");
  if (!(spec.variation_target >= 0.0))
    throw std::invalid_argument("variation_target must be nonnegative");
  if (!(spec.beta > 0.0 && spec.beta <= 1.0))
    throw std::invalid_argument("beta must lie in (0, 1]");

  const double t_real = static_cast<double>(spec.horizon);
  switch (spec.kind) {
    case EnvKind::kConstant:
    case EnvKind::kExponential:
    case EnvKind::kLinear:
    case EnvKind::kMultiSegment:
    case EnvKind::kSinusoidal:
      validate_pattern_fit(spec, spec.kind);
      break;
    case EnvKind::kLowerBoundVt: {
      if (!(spec.variation_target >= 36.0 / t_real &&
            spec.variation_target <= t_real / 4.0))
        throw std::invalid_argument(
            "variation_target must lie in [36/horizon, horizon/4]");
      if (nudged_floor(std::sqrt(t_real / spec.variation_target)) < 2)
        throw std::invalid_argument(
            "variation_target leaves batches shorter than 2 rounds");
      break;
    }
    case EnvKind::kLowerBoundLt:
      if (spec.switch_target < 1 || 3 * spec.switch_target > spec.horizon)
        throw std::invalid_argument(
            "switch_target must lie in [1, horizon/3]");
      break;
    case EnvKind::kBudgetPacing: {
      if (spec.opponents < 1)
        throw std::invalid_argument("opponents must be at least 1");
      if (spec.budgets.empty())
        throw std::invalid_argument("budgets must be provided");
      if (spec.budgets.size() != 1 &&
          spec.budgets.size() != static_cast<std::size_t>(spec.opponents))
        throw std::invalid_argument(
            "budgets must have one entry or one per opponent");
      for (double b : spec.budgets)
        if (!(b > 0.0))
          throw std::invalid_argument("budgets must be positive");
      if (!(spec.value_scale > 0.0 && spec.value_scale <= 1.0))
        throw std::invalid_argument("value_scale must lie in (0, 1]");
      if (!is_pattern_kind(spec.opponent_pattern))
        throw std::invalid_argument(
            "opponent_pattern must be a rival-bid pattern kind");
      validate_pattern_fit(spec, spec.opponent_pattern);
      break;
    }
  }
}

nlohmann::json to_json(const EnvironmentSpec& spec) {
  return nlohmann::json{
      {"kind", to_string(spec.kind)},
      {"horizon", spec.horizon},
      {"variation_target", spec.variation_target},
      {"switch_target", spec.switch_target},
      {"beta", spec.beta},
      {"seed", spec.seed},
      {"opponents", spec.opponents},
      {"budgets", spec.budgets},
      {"value_scale", spec.value_scale},
      {"opponent_pattern", to_string(spec.opponent_pattern)},
  };
}

EnvironmentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::invalid_argument("environment spec must be a JSON object");
  if (!j.contains("kind"))
    throw std::invalid_argument("environment spec field 'kind' is required");
  EnvironmentSpec spec;
  spec.kind = env_kind_from_string(field_or<std::string>(j, "kind", ""));
  if (!j.contains("horizon"))
    throw std::invalid_argument(
        "environment spec field 'horizon' is required");
  spec.horizon = field_or<std::int64_t>(j, "horizon", 1);
  spec.variation_target = field_or<double>(j, "variation_target", 0.0);
  spec.switch_target = field_or<std::int64_t>(j, "switch_target", 0);
  spec.beta = field_or<double>(j, "beta", 2.0 / 3.0);
  spec.seed = field_or<std::uint64_t>(j, "seed", 0);
  spec.opponents = field_or<int>(j, "opponents", 20);
  spec.budgets = field_or<std::vector<double>>(j, "budgets", {});
  spec.value_scale = field_or<double>(j, "value_scale", 0.8);
  spec.opponent_pattern = env_kind_from_string(
      field_or<std::string>(j, "opponent_pattern", "constant"));
  return spec;
}

std::string env_digest(const EnvironmentSpec& spec) {
  std::uint64_t h = fnv1a64(to_json(spec).dump());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = "0123456789abcdef"[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::vector<double> building_block(BlockKind kind, std::int64_t length,
                                   std::int64_t tau) {
  if (length < 3)
    throw std::invalid_argument("segment length must be at least 3");
  if (tau < 1 || tau > length)
    throw std::invalid_argument("jump location must lie in [1, length]");
  std::vector<double> out(static_cast<std::size_t>(length), 0.0);
  for (std::int64_t t = tau + 1; t <= length; ++t) {
    double v = 1.0;
    if (kind == BlockKind::kExponential)
      v = 1.0 - std::exp(-10.0 * static_cast<double>(t - tau) /
                         static_cast<double>(length));
    else if (kind == BlockKind::kLinear)
      v = static_cast<double>(t - tau) / static_cast<double>(length - tau);
    out[static_cast<std::size_t>(t - 1)] = v;
  }
  return out;
}

std::vector<double> gen_building_block(BlockKind kind, std::int64_t length,
                                       double beta, Rng& rng) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("beta must lie in (0, 1]");
  const std::int64_t hi = std::max<std::int64_t>(
      1, nudged_floor(beta * static_cast<double>(length)));
  return building_block(kind, length, rng.uniform_int(1, hi));
}

std::vector<double> compose_segments(std::span<const SegmentPlan> plan) {
  std::vector<double> out;
  for (const SegmentPlan& seg : plan) {
    std::vector<double> block = building_block(seg.kind, seg.length, seg.tau);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

std::vector<double> gen_multi_segment(EnvKind kind,
                                      const EnvironmentSpec& spec, Rng& rng) {
  const std::int64_t segments = segment_count(spec.variation_target);
  if (3 * segments > spec.horizon)
    throw std::invalid_argument(
        "variation_target needs 3 rounds per segment but horizon is too "
        "short");
  const std::int64_t base = spec.horizon / segments;
  const std::int64_t extra = spec.horizon % segments;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(spec.horizon));
  for (std::int64_t s = 0; s < segments; ++s) {
    const std::int64_t length = base + (s < extra ? 1 : 0);
    BlockKind block;
    switch (kind) {
      case EnvKind::kConstant: block = BlockKind::kConstant; break;
      case EnvKind::kExponential: block = BlockKind::kExponential; break;
      case EnvKind::kLinear: block = BlockKind::kLinear; break;
      case EnvKind::kMultiSegment:
        block = static_cast<BlockKind>(rng.uniform_int(0, 2));
        break;
      default:
        throw std::invalid_argument("kind is not a segmented pattern");
    }
    std::vector<double> piece = gen_building_block(block, length, spec.beta, rng);
    out.insert(out.end(), piece.begin(), piece.end());
  }
  return out;
}

double sinusoidal_value(double variation, std::int64_t horizon,
                        std::int64_t t) {
  const double pi = std::acos(-1.0);
  return 0.5 + 0.5 * std::sin(variation * pi * static_cast<double>(t) /
                              static_cast<double>(horizon));
}

std::vector<double> gen_sinusoidal(const EnvironmentSpec& spec) {
  std::vector<double> out(static_cast<std::size_t>(spec.horizon));
  for (std::int64_t t = 1; t <= spec.horizon; ++t)
    out[static_cast<std::size_t>(t - 1)] =
        sinusoidal_value(spec.variation_target, spec.horizon, t);
  return out;
}

std::vector<double> lower_bound_batches(std::int64_t horizon,
                                        std::int64_t batch_length,
                                        std::int64_t batch_count, double jump,
                                        std::span<const std::int64_t> taus) {
  if (batch_length < 1)
    throw std::invalid_argument("batch length must be positive");
  if (batch_count < 0 || batch_count * batch_length > horizon)
    throw std::invalid_argument("batches must fit in the horizon");
  if (static_cast<std::int64_t>(taus.size()) != batch_count)
    throw std::invalid_argument("need one jump location per batch");
  if (!(jump >= 0.0 && jump <= 1.0))
    throw std::invalid_argument("jump must lie in [0, 1]");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t j = 0; j < batch_count; ++j) {
    const std::int64_t tau = taus[static_cast<std::size_t>(j)];
    if (tau < 1 || tau > batch_length)
      throw std::invalid_argument("jump location must lie in [1, batch length]");
    const bool rising = (j % 2 == 0);
    for (std::int64_t t = 1; t <= batch_length; ++t) {
      // Odd batches replay the rising batch back to front.
      const std::int64_t s = rising ? t : batch_length + 1 - t;
      out.push_back(s >= tau ? jump : 0.0);
    }
  }
  out.resize(static_cast<std::size_t>(horizon), out.empty() ? 0.0 : out.back());
  return out;
}

std::vector<double> gen_lower_bound_vt(const EnvironmentSpec& spec, Rng& rng) {
  const double t_real = static_cast<double>(spec.horizon);
  const double variation = spec.variation_target;
  if (!(variation >= 36.0 / t_real && variation <= t_real / 4.0))
    throw std::invalid_argument(
        "variation_target must lie in [36/horizon, horizon/4]");
  const std::int64_t batch = nudged_floor(std::sqrt(t_real / variation));
  if (batch < 2)
    throw std::invalid_argument(
        "variation_target leaves batches shorter than 2 rounds");
  const std::int64_t count =
      std::min(spec.horizon / batch,
               nudged_floor(variation * static_cast<double>(batch)));
  std::vector<std::int64_t> taus(static_cast<std::size_t>(count));
  for (auto& tau : taus) tau = rng.uniform_int(1, batch);
  return lower_bound_batches(spec.horizon, batch, count, 1.0 / batch, taus);
}

std::vector<double> gen_lower_bound_lt(const EnvironmentSpec& spec, Rng& rng) {
  if (spec.switch_target < 1 || 3 * spec.switch_target > spec.horizon)
    throw std::invalid_argument("switch_target must lie in [1, horizon/3]");
  const std::int64_t count = spec.switch_target;
  const std::int64_t batch = spec.horizon / count;
  std::vector<std::int64_t> taus(static_cast<std::size_t>(count));
  for (auto& tau : taus) tau = rng.uniform_int(1, batch);
  return lower_bound_batches(spec.horizon, batch, count, 0.5, taus);
}

double pacing_bid(const PacingAgentState& state, double value) {
  return std::min(value / (1.0 + state.multiplier), state.remaining_budget);
}

void pacing_settle(PacingAgentState& state, bool won, double payment) {
  const double spent = won ? payment : 0.0;
  state.remaining_budget = std::max(0.0, state.remaining_budget - spent);
  state.multiplier =
      std::clamp(state.multiplier -
                     state.step_size * (state.target_rate - spent),
                 0.0, state.multiplier_cap);
}

VectorEnv::VectorEnv(std::vector<double> valuations,
                     std::vector<double> rival_bids)
    : valuations_(std::move(valuations)), rival_bids_(std::move(rival_bids)) {
  if (valuations_.size() != rival_bids_.size())
    throw std::invalid_argument("valuation and rival-bid streams must share a length");
}

std::int64_t VectorEnv::horizon() const {
  return static_cast<std::int64_t>(valuations_.size());
}

double VectorEnv::valuation(std::int64_t t) {
  return valuations_.at(static_cast<std::size_t>(t));
}

double VectorEnv::rival_bid(std::int64_t t) {
  return rival_bids_.at(static_cast<std::size_t>(t));
}

BudgetPacingEnv::BudgetPacingEnv(const EnvironmentSpec& spec,
                                 std::vector<double> learner_values,
                                 std::vector<double> opponent_values)
    : learner_values_(std::move(learner_values)),
      opponent_values_(std::move(opponent_values)) {
  if (learner_values_.size() != opponent_values_.size())
    throw std::invalid_argument("value streams must share the horizon");
  const double t_real = static_cast<double>(learner_values_.size());
  agents_.resize(static_cast<std::size_t>(spec.opponents));
  round_bids_.assign(agents_.size(), 0.0);
  for (std::size_t k = 0; k < agents_.size(); ++k) {
    const double budget =
        spec.budgets.size() == 1 ? spec.budgets[0] : spec.budgets.at(k);
    agents_[k] = {0.0, std::max(0.0, t_real / budget - 1.0),
                  1.0 / std::sqrt(t_real), budget / t_real, budget};
    initial_budget_total_ += budget;
  }
}

std::int64_t BudgetPacingEnv::horizon() const {
  return static_cast<std::int64_t>(learner_values_.size());
}

double BudgetPacingEnv::valuation(std::int64_t t) {
  return learner_values_.at(static_cast<std::size_t>(t));
}

void BudgetPacingEnv::compute_bids(std::int64_t t) {
  if (cached_round_ == t) return;
  const double value = opponent_values_.at(static_cast<std::size_t>(t));
  for (std::size_t k = 0; k < agents_.size(); ++k)
    round_bids_[k] = pacing_bid(agents_[k], value);
  cached_round_ = t;
}

double BudgetPacingEnv::rival_bid(std::int64_t t) {
  compute_bids(t);
  return *std::max_element(round_bids_.begin(), round_bids_.end());
}

void BudgetPacingEnv::settle(std::int64_t t, double learner_bid) {
  compute_bids(t);
  const auto top = std::max_element(round_bids_.begin(), round_bids_.end());
  const bool learner_won = learner_bid >= *top;
  const std::size_t winner =
      static_cast<std::size_t>(top - round_bids_.begin());
  for (std::size_t k = 0; k < agents_.size(); ++k) {
    const bool won = !learner_won && k == winner;
    if (won) total_payments_ += round_bids_[k];
    pacing_settle(agents_[k], won, round_bids_[k]);
  }
}

std::unique_ptr<EpisodeEnv> make_env(const EnvironmentSpec& spec) {
  validate_spec(spec);
  Rng env_rng(derive_seed(spec.seed, {1}));
  Rng value_rng(derive_seed(spec.seed, {2}));
  const std::size_t t_count = static_cast<std::size_t>(spec.horizon);

  auto uniform_values = [&value_rng, t_count] {
    std::vector<double> values(t_count);
    for (double& v : values) v = value_rng.uniform();
    return values;
  };

  switch (spec.kind) {
    case EnvKind::kConstant:
    case EnvKind::kExponential:
    case EnvKind::kLinear:
    case EnvKind::kMultiSegment: {
      std::vector<double> rivals = gen_multi_segment(spec.kind, spec, env_rng);
      return std::make_unique<VectorEnv>(uniform_values(), std::move(rivals));
    }
    case EnvKind::kSinusoidal:
      return std::make_unique<VectorEnv>(uniform_values(),
                                         gen_sinusoidal(spec));
    case EnvKind::kLowerBoundVt: {
      std::vector<double> rivals = gen_lower_bound_vt(spec, env_rng);
      return std::make_unique<VectorEnv>(std::vector<double>(t_count, 1.0),
                                         std::move(rivals));
    }
    case EnvKind::kLowerBoundLt: {
      std::vector<double> rivals = gen_lower_bound_lt(spec, env_rng);
      return std::make_unique<VectorEnv>(std::vector<double>(t_count, 1.0),
                                         std::move(rivals));
    }
    case EnvKind::kBudgetPacing: {
      EnvironmentSpec pattern = spec;
      pattern.kind = spec.opponent_pattern;
      std::vector<double> opponent_values =
          pattern.kind == EnvKind::kSinusoidal
              ? gen_sinusoidal(pattern)
              : gen_multi_segment(pattern.kind, pattern, env_rng);
      for (double& v : opponent_values) v *= spec.value_scale;
      return std::make_unique<BudgetPacingEnv>(spec, uniform_values(),
                                               std::move(opponent_values));
    }
  }
  throw std::invalid_argument("unknown environment kind");
}

}  // namespace bidcraft
