#include "biasq/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "biasq/errors.hpp"

namespace biasq {

double base_reward(const RewardContext& ctx) { return ctx.v_next - ctx.v_prev; }

double loss_averse(double r, double lambda) {
  if (!(lambda >= 1.0)) throw ConfigError(fmt::format("loss-aversion multiplier must be >= 1, got {}", lambda));
  return r >= 0.0 ? r : lambda * r;
}

double proportional_reward(const RewardContext& ctx) {
  if (ctx.v0 == 0.0) throw InputError("proportional reward needs a non-zero initial portfolio value");
  return (ctx.v_next - ctx.v_prev) / ctx.v0;
}

double population_stddev(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / n);
}

double volatility_penalized_reward(const RewardContext& ctx, double penalty, std::size_t window) {
  auto recent = ctx.recent_rewards;
  if (recent.size() > window) recent = recent.last(window);
  const double r = base_reward(ctx);
  if (recent.size() < 2) return r;
  return r - penalty * population_stddev(recent);
}

double positive_scaled_reward(double r, double kappa) { return r > 0.0 ? kappa * r : r; }

double smoothed_reward(double r, double prev, double s) { return s * r + (1.0 - s) * prev; }

RewardSpec RewardSpec::loss_averse(double lambda, RewardSpec inner) {
  return {LossAverseReward{lambda, std::make_shared<const RewardSpec>(std::move(inner))}};
}

RewardSpec RewardSpec::positive_scaled(double kappa, RewardSpec inner) {
  return {PositiveScaledReward{kappa, std::make_shared<const RewardSpec>(std::move(inner))}};
}

RewardSpec RewardSpec::smoothed(double s, RewardSpec inner) {
  return {SmoothedReward{s, std::make_shared<const RewardSpec>(std::move(inner))}};
}

namespace {

const RewardSpec& inner_or_base(const RewardSpecPtr& p) {
  static const RewardSpec kBase{};
  return p ? *p : kBase;
}

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void validate_node(const RewardSpec& spec, bool is_root) {
  std::visit(Overloaded{
                 [](const BaseReward&) {},
                 [](const ProportionalReward&) {},
                 [](const VolatilityPenalizedReward& v) {
                   if (!(v.penalty >= 0.0)) throw ConfigError(fmt::format("volatility penalty must be >= 0, got {}", v.penalty));
                   if (v.window < 1) throw ConfigError("volatility window must be >= 1");
                 },
                 [](const LossAverseReward& v) {
                   if (!(v.lambda >= 1.0)) throw ConfigError(fmt::format("loss-aversion multiplier must be >= 1, got {}", v.lambda));
                   validate_node(inner_or_base(v.inner), false);
                 },
                 [](const PositiveScaledReward& v) {
                   if (!(v.kappa > 0.0)) throw ConfigError(fmt::format("positive scale must be > 0, got {}", v.kappa));
                   validate_node(inner_or_base(v.inner), false);
                 },
                 [is_root](const SmoothedReward& v) {
                   if (!is_root) throw ConfigError("smoothed reward may only appear at the top of a reward spec");
                   if (!(v.s > 0.0 && v.s <= 1.0)) throw ConfigError(fmt::format("smoothing factor must be in (0, 1], got {}", v.s));
                   validate_node(inner_or_base(v.inner), false);
                 },
             },
             spec.node);
}

}  // namespace

void validate(const RewardSpec& spec) { validate_node(spec, true); }

double evaluate(const RewardSpec& spec, const RewardContext& ctx) {
  return std::visit(Overloaded{
                        [&](const BaseReward&) { return base_reward(ctx); },
                        [&](const ProportionalReward&) { return proportional_reward(ctx); },
                        [&](const VolatilityPenalizedReward& v) {
                          return volatility_penalized_reward(ctx, v.penalty, v.window);
                        },
                        [&](const LossAverseReward& v) {
                          return loss_averse(evaluate(inner_or_base(v.inner), ctx), v.lambda);
                        },
                        [&](const PositiveScaledReward& v) {
                          return positive_scaled_reward(evaluate(inner_or_base(v.inner), ctx), v.kappa);
                        },
                        [&](const SmoothedReward& v) {
                          return smoothed_reward(evaluate(inner_or_base(v.inner), ctx), ctx.prev_reward, v.s);
                        },
                    },
                    spec.node);
}

std::string label(const RewardSpec& spec) {
  return std::visit(Overloaded{
                        [](const BaseReward&) -> std::string { return "base"; },
                        [](const ProportionalReward&) -> std::string { return "proportional"; },
                        [](const VolatilityPenalizedReward&) -> std::string { return "volatility_penalized"; },
                        [](const LossAverseReward& v) {
                          return fmt::format("loss_averse({})", label(inner_or_base(v.inner)));
                        },
                        [](const PositiveScaledReward& v) {
                          return fmt::format("positive_scaled({})", label(inner_or_base(v.inner)));
                        },
                        [](const SmoothedReward& v) {
                          return fmt::format("smoothed({})", label(inner_or_base(v.inner)));
                        },
                    },
                    spec.node);
}

std::size_t history_window(const RewardSpec& spec) {
  return std::visit(Overloaded{
                        [](const VolatilityPenalizedReward& v) { return v.window; },
                        [](const LossAverseReward& v) { return history_window(inner_or_base(v.inner)); },
                        [](const PositiveScaledReward& v) { return history_window(inner_or_base(v.inner)); },
                        [](const SmoothedReward& v) { return history_window(inner_or_base(v.inner)); },
                        [](const auto&) -> std::size_t { return 0; },
                    },
                    spec.node);
}

bool contains_loss_aversion(const RewardSpec& spec) {
  return std::visit(Overloaded{
                        [](const LossAverseReward&) { return true; },
                        [](const PositiveScaledReward& v) { return contains_loss_aversion(inner_or_base(v.inner)); },
                        [](const SmoothedReward& v) { return contains_loss_aversion(inner_or_base(v.inner)); },
                        [](const auto&) { return false; },
                    },
                    spec.node);
}

RewardSpec with_loss_aversion(const RewardSpec& spec, double lambda) {
  if (lambda == 1.0) return spec;
  if (!(lambda >= 1.0)) throw ConfigError(fmt::format("loss-aversion multiplier must be >= 1, got {}", lambda));
  if (contains_loss_aversion(spec)) {
    throw ConfigError("reward spec already applies loss aversion; set lambda to 1 or drop the loss_averse stage");
  }
  return std::visit(Overloaded{
                        [&](const PositiveScaledReward& v) {
                          return RewardSpec::positive_scaled(v.kappa, with_loss_aversion(inner_or_base(v.inner), lambda));
                        },
                        [&](const SmoothedReward& v) {
                          return RewardSpec::smoothed(v.s, with_loss_aversion(inner_or_base(v.inner), lambda));
                        },
                        [&](const auto&) { return RewardSpec::loss_averse(lambda, spec); },
                    },
                    spec.node);
}

RewardTracker::RewardTracker(RewardSpec spec) : spec_(std::move(spec)), window_(history_window(spec_)) {
  validate(spec_);
  history_.reserve(window_);
}

void RewardTracker::reset(double v0) {
  history_.clear();
  v0_ = v0;
  prev_ = 0.0;
}

double RewardTracker::step(double v_prev, double v_next) {
  const RewardContext ctx{v_prev, v_next, v0_, history_, prev_};
  const double r = evaluate(spec_, ctx);
  if (window_ > 0) {
    if (history_.size() == window_) history_.erase(history_.begin());
    history_.push_back(v_next - v_prev);
  }
  prev_ = r;
  return r;
}

}  // namespace biasq
