#include "biasq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "biasq/errors.hpp"

namespace biasq {

void ExperimentConfig::validate() const {
  if (n_states < 2) throw ConfigError(fmt::format("n_states must be >= 2, got {}", n_states));
  if (!(lambda >= 1.0)) throw ConfigError(fmt::format("lambda must be >= 1, got {}", lambda));
  learner().validate();
  biasq::validate(exploration);
  biasq::validate(effective_reward());
  if (!(initial_cash >= 0.0)) throw ConfigError(fmt::format("initial_cash must be >= 0, got {}", initial_cash));
  if (initial_holdings < 0) throw ConfigError(fmt::format("initial_holdings must be >= 0, got {}", initial_holdings));
  if (steps < 2) throw ConfigError(fmt::format("steps must be >= 2, got {}", steps));
  if (!(sigma >= 0.0)) throw ConfigError(fmt::format("sigma must be >= 0, got {}", sigma));
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (const auto* u = std::get_if<SmallPositiveInit>(&q_init); u && !std::isfinite(u->value)) {
    throw ConfigError("small_positive Q init value must be finite");
  }
}

std::string label(const InitStrategy& init) {
  if (std::holds_alternative<ZerosInit>(init)) return "zeros";
  if (std::holds_alternative<UniformRandomInit>(init)) return "uniform";
  const double v = std::get<SmallPositiveInit>(init).value;
  return v == 0.1 ? std::string("small_positive") : fmt::format("small_positive({})", v);
}

std::uint64_t epoch_data_seed(const ExperimentConfig& cfg, std::size_t epoch) {
  return cfg.resample_per_epoch ? derive_seed(cfg.data_seed, "epoch", epoch) : cfg.data_seed;
}

MarketData prepare_market(const ExperimentConfig& cfg, std::uint64_t data_seed) {
  PriceSeries series = generate_prices(data_seed, cfg.steps, cfg.p0, cfg.sigma);
  Discretizer disc = fit_discretizer(series, cfg.n_states);
  std::vector<std::size_t> states;
  states.reserve(series.size());
  for (double p : series.prices) states.push_back(disc.state_of(p));
  return {std::move(series), std::move(disc), std::move(states)};
}

AgentState make_agent(const ExperimentConfig& cfg) {
  const ActionSet actions = cfg.actions();
  InitStrategy init = cfg.q_init;
  if (auto* u = std::get_if<UniformRandomInit>(&init)) u->seed = derive_seed(cfg.run_seed, "q_init", u->seed);
  return {init_qtable(init, cfg.n_states, actions.size()), Rng(derive_seed(cfg.run_seed, "policy")), actions};
}

EpochTrace run_epoch(const MarketData& market, AgentState& agent, const ExperimentConfig& cfg) {
  const auto& prices = market.series.prices;
  const auto& states = market.states;
  const std::size_t steps = prices.size() - 1;

  EpochTrace trace;
  trace.base_rewards.reserve(steps);
  trace.learner_rewards.reserve(steps);
  trace.actions.reserve(steps);

  Portfolio pf{cfg.initial_cash, cfg.initial_holdings};
  RewardTracker rewards(cfg.effective_reward());
  rewards.reset(portfolio_value(pf, prices.front()));

  const std::size_t k = reward_window(cfg.exploration);
  std::vector<double> recent;
  recent.reserve(k);

  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t s = states[t];
    const double eps = epsilon_at(cfg.exploration, recent);
    const Selection sel = select_column(agent.q, s, eps, agent.rng);
    const Action action = agent.actions[sel.column];
    trace.explored += sel.explored ? 1 : 0;

    const double v_before = portfolio_value(pf, prices[t]);
    pf = apply_action(pf, action, prices[t]);
    const double v_after = portfolio_value(pf, prices[t + 1]);

    const double base = v_after - v_before;
    const double r = rewards.step(v_before, v_after);
    td_update(agent.q, s, sel.column, r, states[t + 1], cfg.alpha, cfg.gamma);

    if (k > 0) {
      if (recent.size() == k) recent.erase(recent.begin());
      recent.push_back(cfg.overconfidence_on_base_reward ? base : r);
    }
    trace.base_rewards.push_back(base);
    trace.learner_rewards.push_back(r);
    trace.actions.push_back(action);
  }
  trace.final_portfolio = pf;
  return trace;
}

RunResult run_experiment(const ExperimentConfig& cfg, std::string config_id) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  MarketData market = prepare_market(cfg, epoch_data_seed(cfg, 0));
  AgentState agent = make_agent(cfg);

  RunResult result{std::move(config_id), cfg, {}, agent.q, 0.0};
  result.epochs.reserve(cfg.epochs);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    if (cfg.resample_per_epoch && e > 0) market = prepare_market(cfg, epoch_data_seed(cfg, e));
    const EpochTrace trace = run_epoch(market, agent, cfg);
    result.epochs.push_back(
        epoch_metrics(e, cfg.metrics_on_learner_reward ? trace.learner_rewards : trace.base_rewards));
  }
  result.q = std::move(agent.q);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<GridCell> expand_grid(const GridSpec& grid) {
  std::vector<GridCell> cells;
  for (const Sweep& sweep : grid.sweeps) {
    if (sweep.axes.empty()) continue;
    if (std::any_of(sweep.axes.begin(), sweep.axes.end(), [](const Axis& a) { return a.values.empty(); })) continue;

    std::vector<std::size_t> idx(sweep.axes.size(), 0);
    for (bool done = false; !done;) {
      GridCell cell{"", sweep.name, grid.base};
      std::string id = sweep.name + ":";
      for (std::size_t i = 0; i < sweep.axes.size(); ++i) {
        const AxisValue& v = sweep.axes[i].values[idx[i]];
        v.apply(cell.config);
        if (i > 0) id += ',';
        id += sweep.axes[i].name + "=" + v.label;
      }
      cell.config_id = std::move(id);
      cell.config.run_seed = derive_seed(grid.master_seed, cell.config_id);
      cells.push_back(std::move(cell));

      // odometer increment, last axis fastest
      for (std::size_t pos = sweep.axes.size();;) {
        if (pos == 0) {
          done = true;
          break;
        }
        --pos;
        if (++idx[pos] < sweep.axes[pos].values.size()) break;
        idx[pos] = 0;
      }
    }
  }
  if (cells.empty()) throw ConfigError("grid has no cells");
  return cells;
}

std::vector<RunResult> run_grid(const GridSpec& grid, std::size_t parallelism) {
  const std::vector<GridCell> cells = expand_grid(grid);
  for (const auto& c : cells) c.config.validate();

  std::vector<std::optional<RunResult>> slots(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        slots[i] = run_experiment(cells[i].config, cells[i].config_id);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(parallelism, 1, cells.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<RunResult> results;
  results.reserve(cells.size());
  for (auto& s : slots) results.push_back(std::move(*s));
  return results;
}

namespace {

template <class T, class Label, class Apply>
Axis make_axis(std::string name, const std::vector<T>& values, Label&& lbl, Apply&& apply) {
  Axis axis{std::move(name), {}};
  for (const T& v : values) {
    axis.values.push_back({lbl(v), [v, apply](ExperimentConfig& c) { apply(c, v); }});
  }
  return axis;
}

const auto kNumber = [](auto v) { return fmt::format("{}", v); };

}  // namespace

Axis n_states_axis(std::vector<std::size_t> values) {
  return make_axis("n_states", values, kNumber, [](ExperimentConfig& c, std::size_t v) { c.n_states = v; });
}

Axis lambda_axis(std::vector<double> values) {
  return make_axis("lambda", values, kNumber, [](ExperimentConfig& c, double v) { c.lambda = v; });
}

Axis gamma_axis(std::vector<double> values) {
  return make_axis("gamma", values, kNumber, [](ExperimentConfig& c, double v) { c.gamma = v; });
}

Axis action_set_axis(std::vector<ActionSet::Kind> values) {
  return make_axis(
      "action_set", values, [](ActionSet::Kind k) { return std::string(to_string(k)); },
      [](ExperimentConfig& c, ActionSet::Kind v) { c.action_set = v; });
}

Axis q_init_axis(std::vector<InitStrategy> values) {
  return make_axis(
      "q_init", values, [](const InitStrategy& i) { return label(i); },
      [](ExperimentConfig& c, const InitStrategy& v) { c.q_init = v; });
}

Axis initial_holdings_axis(std::vector<std::int64_t> values) {
  return make_axis("initial_holdings", values, kNumber,
                   [](ExperimentConfig& c, std::int64_t v) { c.initial_holdings = v; });
}

Axis reward_axis(std::vector<RewardSpec> values) {
  return make_axis(
      "reward", values, [](const RewardSpec& r) { return label(r); },
      [](ExperimentConfig& c, const RewardSpec& v) { c.reward = v; });
}

GridSpec ablation_grid(ExperimentConfig base, std::uint64_t master_seed) {
  GridSpec grid{std::move(base), master_seed, {}};
  grid.sweeps = {
      {"state_space", {n_states_axis({5, 10, 15, 20})}},
      {"loss_aversion", {lambda_axis({1.0, 1.5, 2.0, 2.5, 3.0})}},
      {"discount", {gamma_axis({0.5, 0.7, 0.9, 0.99})}},
      {"action_space", {action_set_axis({ActionSet::Kind::Full, ActionSet::Kind::Reduced})}},
      {"q_init", {q_init_axis({ZerosInit{}, UniformRandomInit{0}, SmallPositiveInit{0.1}})}},
      {"portfolio_init", {initial_holdings_axis({0, 5, 10})}},
      {"reward_variant",
       {reward_axis({RewardSpec::proportional(), RewardSpec::volatility_penalized(0.5, 10),
                     RewardSpec::positive_scaled(1.5), RewardSpec::smoothed(0.5)})}},
  };
  return grid;
}

}  // namespace biasq
