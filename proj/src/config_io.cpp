#include "biasq/config_io.hpp"

#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "biasq/errors.hpp"

namespace biasq {

namespace {

double get_real(const Json& v, std::string_view what) {
  if (!v.is_number()) throw ConfigError(fmt::format("'{}' must be a number, got {}", what, v.dump()));
  return v.get<double>();
}

std::uint64_t get_unsigned(const Json& v, std::string_view what) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(fmt::format("'{}' must be a non-negative integer, got {}", what, v.dump()));
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const Json& v, std::string_view what) {
  if (!v.is_boolean()) throw ConfigError(fmt::format("'{}' must be true or false, got {}", what, v.dump()));
  return v.get<bool>();
}

std::string type_tag(const Json& j, std::string_view what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_object() && j.contains("type") && j["type"].is_string()) return j["type"].get<std::string>();
  throw ConfigError(fmt::format("'{}' must be a type name or an object with a \"type\" field, got {}", what, j.dump()));
}

// Visits every key of a tagged object except "type"; rejects keys not in `allowed`.
template <class F>
void for_fields(const Json& j, std::string_view what, std::initializer_list<std::string_view> allowed, F&& f) {
  if (!j.is_object()) return;
  for (const auto& [key, value] : j.items()) {
    if (key == "type") continue;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(fmt::format("unknown field '{}' in {}", key, what));
    }
    f(key, value);
  }
}

}  // namespace

RewardSpec reward_from_json(const Json& j) {
  const std::string type = type_tag(j, "reward");
  if (type == "base") {
    for_fields(j, "reward base", {}, [](auto&&...) {});
    return RewardSpec::base();
  }
  if (type == "proportional") {
    for_fields(j, "reward proportional", {}, [](auto&&...) {});
    return RewardSpec::proportional();
  }
  if (type == "volatility_penalized") {
    VolatilityPenalizedReward v;
    for_fields(j, "reward volatility_penalized", {"penalty", "window"}, [&](const std::string& k, const Json& x) {
      if (k == "penalty") v.penalty = get_real(x, k);
      else v.window = get_unsigned(x, k);
    });
    return {v};
  }
  RewardSpec inner = RewardSpec::base();
  if (type == "loss_averse") {
    double lambda = 2.0;
    for_fields(j, "reward loss_averse", {"lambda", "inner"}, [&](const std::string& k, const Json& x) {
      if (k == "lambda") lambda = get_real(x, k);
      else inner = reward_from_json(x);
    });
    return RewardSpec::loss_averse(lambda, std::move(inner));
  }
  if (type == "positive_scaled") {
    double kappa = 1.5;
    for_fields(j, "reward positive_scaled", {"kappa", "inner"}, [&](const std::string& k, const Json& x) {
      if (k == "kappa") kappa = get_real(x, k);
      else inner = reward_from_json(x);
    });
    return RewardSpec::positive_scaled(kappa, std::move(inner));
  }
  if (type == "smoothed") {
    double s = 0.5;
    for_fields(j, "reward smoothed", {"s", "inner"}, [&](const std::string& k, const Json& x) {
      if (k == "s") s = get_real(x, k);
      else inner = reward_from_json(x);
    });
    return RewardSpec::smoothed(s, std::move(inner));
  }
  throw ConfigError(fmt::format("unknown reward type '{}'", type));
}

Json to_json(const RewardSpec& spec) {
  const auto inner_json = [](const RewardSpecPtr& p) { return p ? to_json(*p) : Json("base"); };
  return std::visit(
      [&](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BaseReward>) {
          return "base";
        } else if constexpr (std::is_same_v<T, ProportionalReward>) {
          return "proportional";
        } else if constexpr (std::is_same_v<T, VolatilityPenalizedReward>) {
          return {{"type", "volatility_penalized"}, {"penalty", v.penalty}, {"window", v.window}};
        } else if constexpr (std::is_same_v<T, LossAverseReward>) {
          return {{"type", "loss_averse"}, {"lambda", v.lambda}, {"inner", inner_json(v.inner)}};
        } else if constexpr (std::is_same_v<T, PositiveScaledReward>) {
          return {{"type", "positive_scaled"}, {"kappa", v.kappa}, {"inner", inner_json(v.inner)}};
        } else {
          return {{"type", "smoothed"}, {"s", v.s}, {"inner", inner_json(v.inner)}};
        }
      },
      spec.node);
}

InitStrategy init_from_json(const Json& j) {
  const std::string type = type_tag(j, "q_init");
  if (type == "zeros") {
    for_fields(j, "q_init zeros", {}, [](auto&&...) {});
    return ZerosInit{};
  }
  if (type == "uniform") {
    UniformRandomInit u;
    for_fields(j, "q_init uniform", {"seed"}, [&](const std::string& k, const Json& x) { u.seed = get_unsigned(x, k); });
    return u;
  }
  if (type == "small_positive") {
    SmallPositiveInit p;
    for_fields(j, "q_init small_positive", {"value"}, [&](const std::string& k, const Json& x) { p.value = get_real(x, k); });
    return p;
  }
  throw ConfigError(fmt::format("unknown q_init type '{}'", type));
}

Json to_json(const InitStrategy& init) {
  if (std::holds_alternative<ZerosInit>(init)) return "zeros";
  if (const auto* u = std::get_if<UniformRandomInit>(&init)) return {{"type", "uniform"}, {"seed", u->seed}};
  return {{"type", "small_positive"}, {"value", std::get<SmallPositiveInit>(init).value}};
}

ExplorationSchedule exploration_from_json(const Json& j) {
  const std::string type = type_tag(j, "exploration");
  if (type == "fixed") {
    FixedEpsilon f;
    for_fields(j, "exploration fixed", {"epsilon"}, [&](const std::string& k, const Json& x) { f.epsilon = get_real(x, k); });
    return f;
  }
  if (type == "overconfident") {
    OverconfidentEpsilon o;
    for_fields(j, "exploration overconfident", {"epsilon0", "beta", "window"}, [&](const std::string& k, const Json& x) {
      if (k == "epsilon0") o.epsilon0 = get_real(x, k);
      else if (k == "beta") o.beta = get_real(x, k);
      else o.window = get_unsigned(x, k);
    });
    return o;
  }
  throw ConfigError(fmt::format("unknown exploration type '{}'", type));
}

Json to_json(const ExplorationSchedule& sched) {
  if (const auto* f = std::get_if<FixedEpsilon>(&sched)) return {{"type", "fixed"}, {"epsilon", f->epsilon}};
  const auto& o = std::get<OverconfidentEpsilon>(sched);
  return {{"type", "overconfident"}, {"epsilon0", o.epsilon0}, {"beta", o.beta}, {"window", o.window}};
}

void apply_config_field(ExperimentConfig& cfg, const std::string& key, const Json& v) {
  if (key == "n_states") cfg.n_states = get_unsigned(v, key);
  else if (key == "lambda") cfg.lambda = get_real(v, key);
  else if (key == "gamma") cfg.gamma = get_real(v, key);
  else if (key == "alpha") cfg.alpha = get_real(v, key);
  else if (key == "exploration") cfg.exploration = exploration_from_json(v);
  else if (key == "reward") cfg.reward = reward_from_json(v);
  else if (key == "action_set") {
    const std::string s = v.is_string() ? v.get<std::string>() : "";
    if (s == "full") cfg.action_set = ActionSet::Kind::Full;
    else if (s == "reduced") cfg.action_set = ActionSet::Kind::Reduced;
    else throw ConfigError(fmt::format("action_set must be \"full\" or \"reduced\", got {}", v.dump()));
  }
  else if (key == "q_init") cfg.q_init = init_from_json(v);
  else if (key == "initial_cash") cfg.initial_cash = get_real(v, key);
  else if (key == "initial_holdings") {
    const auto h = get_unsigned(v, key);
    if (h > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) throw ConfigError("initial_holdings too large");
    cfg.initial_holdings = static_cast<std::int64_t>(h);
  }
  else if (key == "steps") cfg.steps = get_unsigned(v, key);
  else if (key == "p0") cfg.p0 = get_real(v, key);
  else if (key == "sigma") cfg.sigma = get_real(v, key);
  else if (key == "epochs") cfg.epochs = get_unsigned(v, key);
  else if (key == "data_seed") cfg.data_seed = get_unsigned(v, key);
  else if (key == "run_seed") cfg.run_seed = get_unsigned(v, key);
  else if (key == "resample_per_epoch") cfg.resample_per_epoch = get_bool(v, key);
  else if (key == "overconfidence_on_base_reward") cfg.overconfidence_on_base_reward = get_bool(v, key);
  else if (key == "metrics_on_learner_reward") cfg.metrics_on_learner_reward = get_bool(v, key);
  else throw ConfigError(fmt::format("unknown config key '{}'", key));
}

std::string axis_label(const std::string& key, const Json& value) {
  if (key == "reward") return label(reward_from_json(value));
  if (key == "q_init") return label(init_from_json(value));
  if (key == "exploration") return type_tag(value, key);
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number_unsigned()) return fmt::format("{}", value.get<std::uint64_t>());
  if (value.is_number_integer()) return fmt::format("{}", value.get<std::int64_t>());
  if (value.is_number()) return fmt::format("{}", value.get<double>());
  return value.dump();
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig base) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  for (const auto& [key, value] : j.items()) apply_config_field(base, key, value);
  base.validate();
  return base;
}

Json to_json(const ExperimentConfig& cfg) {
  return {
      {"n_states", cfg.n_states},
      {"lambda", cfg.lambda},
      {"gamma", cfg.gamma},
      {"alpha", cfg.alpha},
      {"exploration", to_json(cfg.exploration)},
      {"reward", to_json(cfg.reward)},
      {"action_set", std::string(to_string(cfg.action_set))},
      {"q_init", to_json(cfg.q_init)},
      {"initial_cash", cfg.initial_cash},
      {"initial_holdings", cfg.initial_holdings},
      {"steps", cfg.steps},
      {"p0", cfg.p0},
      {"sigma", cfg.sigma},
      {"epochs", cfg.epochs},
      {"data_seed", cfg.data_seed},
      {"run_seed", cfg.run_seed},
      {"resample_per_epoch", cfg.resample_per_epoch},
      {"overconfidence_on_base_reward", cfg.overconfidence_on_base_reward},
      {"metrics_on_learner_reward", cfg.metrics_on_learner_reward},
  };
}

GridSpec grid_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("grid spec must be a JSON object");
  GridSpec grid;
  for (const auto& [key, value] : j.items()) {
    if (key == "master_seed") {
      grid.master_seed = get_unsigned(value, key);
    } else if (key == "base") {
      grid.base = config_from_json(value);
    } else if (key == "sweeps") {
      if (!value.is_array()) throw ConfigError("'sweeps' must be an array");
      for (const Json& sw : value) {
        if (!sw.is_object() || !sw.contains("name") || !sw["name"].is_string() || !sw.contains("axes") ||
            !sw["axes"].is_object()) {
          throw ConfigError(fmt::format("each sweep needs a string 'name' and an object 'axes', got {}", sw.dump()));
        }
        Sweep sweep{sw["name"].get<std::string>(), {}};
        for (const auto& [axis_key, values] : sw["axes"].items()) {
          if (!values.is_array() || values.empty()) {
            throw ConfigError(fmt::format("axis '{}' in sweep '{}' needs a non-empty array", axis_key, sweep.name));
          }
          Axis axis{axis_key, {}};
          for (const Json& v : values) {
            ExperimentConfig probe;
            apply_config_field(probe, axis_key, v);  // reject bad values up front
            axis.values.push_back({axis_label(axis_key, v), [axis_key, v](ExperimentConfig& c) {
                                     apply_config_field(c, axis_key, v);
                                   }});
          }
          sweep.axes.push_back(std::move(axis));
        }
        grid.sweeps.push_back(std::move(sweep));
      }
    } else {
      throw ConfigError(fmt::format("unknown grid key '{}'", key));
    }
  }
  return grid;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("'{}': {}", path.string(), e.what()));
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  try {
    return config_from_json(read_json_file(path));
  } catch (const ConfigError& e) {
    if (std::string_view(e.what()).starts_with("'" + path.string())) throw;
    throw ConfigError(fmt::format("'{}': {}", path.string(), e.what()));
  }
}

GridSpec load_grid(const std::filesystem::path& path) {
  try {
    return grid_from_json(read_json_file(path));
  } catch (const ConfigError& e) {
    if (std::string_view(e.what()).starts_with("'" + path.string())) throw;
    throw ConfigError(fmt::format("'{}': {}", path.string(), e.what()));
  }
}

}  // namespace biasq
