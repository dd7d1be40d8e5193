#include <gtest/gtest.h>

#include "biasq/config_io.hpp"
#include "biasq/errors.hpp"

using namespace biasq;

namespace {

const std::filesystem::path kSource = BIASQ_SOURCE_DIR;

}  // namespace

TEST(ConfigIo, EmptyObjectGivesDefaults) {
  const ExperimentConfig c = config_from_json(Json::object());
  EXPECT_EQ(to_json(c), to_json(ExperimentConfig{}));
}

TEST(ConfigIo, RoundTrip) {
  ExperimentConfig c;
  c.n_states = 7;
  c.lambda = 2.25;
  c.exploration = OverconfidentEpsilon{0.2, 0.5, 4};
  c.reward = RewardSpec::smoothed(0.5, RewardSpec::volatility_penalized(0.25, 6));
  c.action_set = ActionSet::Kind::Reduced;
  c.q_init = UniformRandomInit{9};
  c.initial_holdings = 3;
  c.resample_per_epoch = true;
  c.run_seed = 123;
  const Json j = to_json(c);
  const ExperimentConfig back = config_from_json(j);
  EXPECT_EQ(to_json(back), j);
  EXPECT_EQ(label(back.reward), label(c.reward));
  EXPECT_EQ(back.action_set, ActionSet::Kind::Reduced);
}

TEST(ConfigIo, RewardShorthandAndNesting) {
  EXPECT_EQ(label(reward_from_json("base")), "base");
  const RewardSpec r = reward_from_json(Json::parse(R"({"type": "positive_scaled", "kappa": 1.5,
                                                         "inner": "proportional"})"));
  EXPECT_EQ(label(r), label(RewardSpec::positive_scaled(1.5, RewardSpec::proportional())));
}

TEST(ConfigIo, RejectsUnknownOrInvalidInput) {
  EXPECT_THROW(config_from_json(Json::parse(R"({"n_state": 5})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"n_states": 1})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"lambda": "two"})")), ConfigError);
  EXPECT_THROW(reward_from_json("mystery"), ConfigError);
  EXPECT_THROW(exploration_from_json(Json::parse(R"({"type": "fixed", "eps": 0.1})")), ConfigError);
  EXPECT_THROW(init_from_json(Json::parse(R"({"type": "uniform", "seed": -1})")), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(ConfigIo, ShippedConfigsLoad) {
  EXPECT_NO_THROW(load_config(kSource / "configs/baseline.json"));
  const ExperimentConfig o = load_config(kSource / "configs/overconfident.json");
  EXPECT_EQ(o.lambda, 2.0);
  EXPECT_TRUE(std::holds_alternative<OverconfidentEpsilon>(o.exploration));
  EXPECT_THROW(load_config(kSource / "tests/data/bad_config.json"), ConfigError);
}

TEST(ConfigIo, GridFileMatchesBuiltInAblation) {
  const auto from_file = expand_grid(load_grid(kSource / "configs/ablation_grid.json"));
  const auto built_in = expand_grid(ablation_grid());
  ASSERT_EQ(from_file.size(), built_in.size());
  for (std::size_t i = 0; i < built_in.size(); ++i) {
    EXPECT_EQ(from_file[i].config_id, built_in[i].config_id);
    EXPECT_EQ(from_file[i].config.run_seed, built_in[i].config.run_seed);
    EXPECT_EQ(to_json(from_file[i].config), to_json(built_in[i].config));
  }
}
