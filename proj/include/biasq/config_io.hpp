#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "biasq/harness.hpp"

namespace biasq {

using Json = nlohmann::ordered_json;

// Config files are JSON. An experiment config is a flat object whose keys are
// the ExperimentConfig fields (see configs/baseline.json); omitted keys keep
// their defaults and unknown keys are rejected. Tagged variants:
//
//   exploration  {"type": "fixed", "epsilon": 0.1}
//                {"type": "overconfident", "epsilon0": 0.1, "beta": 1.0, "window": 10}
//   reward       "base" | "proportional"
//                {"type": "volatility_penalized", "penalty": 0.5, "window": 10}
//                {"type": "loss_averse", "lambda": 2, "inner": <reward>}
//                {"type": "positive_scaled", "kappa": 1.5, "inner": <reward>}
//                {"type": "smoothed", "s": 0.5, "inner": <reward>}
//   q_init       "zeros" | {"type": "uniform", "seed": 0} | {"type": "small_positive", "value": 0.1}
//   action_set   "full" | "reduced"
//
// A grid file holds {"master_seed": N, "base": <config>, "sweeps": [{"name": ..,
// "axes": {"<config key>": [values...], ...}}, ...]}.

RewardSpec reward_from_json(const Json& j);
Json to_json(const RewardSpec& spec);

InitStrategy init_from_json(const Json& j);
Json to_json(const InitStrategy& init);

ExplorationSchedule exploration_from_json(const Json& j);
Json to_json(const ExplorationSchedule& sched);

/// Sets one field by its config-file key. Throws ConfigError for unknown keys or bad values.
void apply_config_field(ExperimentConfig& cfg, const std::string& key, const Json& value);

/// Axis label for a config value, matching the built-in axis helpers.
std::string axis_label(const std::string& key, const Json& value);

/// Fields in j override base; the result is validated.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {});
Json to_json(const ExperimentConfig& cfg);

GridSpec grid_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
ExperimentConfig load_config(const std::filesystem::path& path);
GridSpec load_grid(const std::filesystem::path& path);

}  // namespace biasq
