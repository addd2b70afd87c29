#include <gtest/gtest.h>

#include <fstream>

#include "test_util.hpp"
#include "transg/config.hpp"
#include "transg/error.hpp"

namespace {

using namespace transg;
using namespace transg::trainer;
using nlohmann::json;

std::string config_error_message(const json& j) {
  try {
    train_config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(Config, DefaultsAreValid) {
  TrainConfig c;
  EXPECT_TRUE(c.violations().empty());
  EXPECT_EQ(c.alpha, 0.5);
  EXPECT_EQ(c.beta, 0.5);
  EXPECT_EQ(c.lambda, 0.5);
  EXPECT_EQ(c.tau1, 0.07);
  EXPECT_EQ(c.tau2, 14.0);
  EXPECT_EQ(c.lr, 3.5e-4);
  EXPECT_EQ(c.batch_size, 256u);
  EXPECT_EQ(c.mask_nodes, 10u);
  EXPECT_EQ(c.mask_frames, 2u);
  EXPECT_EQ(c.model.layers, 2u);
  EXPECT_EQ(c.model.heads, 8u);
  EXPECT_EQ(c.epochs, 150u);
}

TEST(Config, ListsEveryViolationAtOnce) {
  const std::string msg =
      config_error_message({{"alpha", 2.0}, {"tau1", 0.0}, {"head_dim", 3}, {"lr", -1.0}});
  EXPECT_NE(msg.find("alpha"), std::string::npos) << msg;
  EXPECT_NE(msg.find("tau1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("heads * head_dim"), std::string::npos) << msg;
  EXPECT_NE(msg.find("lr"), std::string::npos) << msg;
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
  const std::string msg = config_error_message({{"alpah", 0.5}, {"epochs", "many"}});
  EXPECT_NE(msg.find("alpah"), std::string::npos) << msg;
  EXPECT_NE(msg.find("epochs"), std::string::npos) << msg;
  EXPECT_THROW(train_config_from_json({{"mode", "fancy"}}), ConfigError);
  EXPECT_THROW(train_config_from_json(json::array()), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  TrainConfig c;
  c.mode = TrainMode::unsupervised;
  c.model.d = 16;
  c.model.heads = 2;
  c.model.head_dim = 8;
  c.seed = 42;
  c.dbscan_eps = 0.3;
  const TrainConfig back = train_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Config, ModesParse) {
  for (TrainMode m : ablation_modes()) EXPECT_EQ(parse_mode(mode_name(m)), m);
  EXPECT_EQ(ablation_modes().size(), 5u);
  EXPECT_EQ(ablation_modes().front(), TrainMode::baseline);
  EXPECT_EQ(ablation_modes().back(), TrainMode::sgt_gpc_stpr);
  EXPECT_EQ(parse_mode("unsupervised"), TrainMode::unsupervised);
}

TEST(Config, OverridesParseJsonLiterals) {
  json j = {{"epochs", 3}};
  apply_overrides(j, {"epochs=7", "alpha=0.25", "mode=pc", "normalize_contrastive=false"});
  EXPECT_EQ(j["epochs"], 7);
  EXPECT_EQ(j["alpha"], 0.25);
  EXPECT_EQ(j["mode"], "pc");
  EXPECT_EQ(j["normalize_contrastive"], false);
  EXPECT_THROW(apply_overrides(j, {"novalue"}), ConfigError);
}

TEST(Config, FilePrecedenceAndPathResolution) {
  const auto dir = transg::testing::scratch_dir();
  std::filesystem::create_directories(dir / "cfg");
  std::ofstream(dir / "cfg" / "run.json")
      << json{{"epochs", 5}, {"lr", 0.001}, {"manifest", "data/manifest.json"}, {"output_dir", "out"}}
             .dump();
  const auto run = load_run_config(dir / "cfg" / "run.json", {"epochs=9"});
  EXPECT_EQ(run.train.epochs, 9u);
  EXPECT_EQ(run.train.lr, 0.001);
  EXPECT_EQ(run.train.seed, 0u);
  EXPECT_EQ(run.manifest, dir / "cfg" / "data" / "manifest.json");
  EXPECT_EQ(run.output_dir, dir / "cfg" / "out");
  const auto over = load_run_config(dir / "cfg" / "run.json", {"output_dir=elsewhere"});
  EXPECT_EQ(over.output_dir, std::filesystem::path("elsewhere"));
}

TEST(Config, MissingOrMalformedFile) {
  const auto dir = transg::testing::scratch_dir();
  EXPECT_THROW(load_run_config(dir / "absent.json"), IoError);
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW(load_run_config(dir / "bad.json"), ParseError);
}

TEST(Config, ModeCoherence) {
  TrainConfig c;
  c.mode = TrainMode::unsupervised;
  c.full_prototype_refresh = true;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.batch_size = 4;
  c.instances_per_id = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  c.mode = TrainMode::unsupervised;
  EXPECT_NO_THROW(c.validate());
}

}  // namespace
