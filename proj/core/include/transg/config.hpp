#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "transg/sgt.hpp"

namespace transg::trainer {

enum class TrainMode { baseline, pc, sgt_ds, sgt_gpc, sgt_gpc_stpr, unsupervised };

const char* mode_name(TrainMode mode);
TrainMode parse_mode(const std::string& name);
// Table order of the ablation suite.
const std::vector<TrainMode>& ablation_modes();

struct TrainConfig {
  sgt::SgtConfig model;

  double alpha = 0.5;   // sequence vs skeleton level GPC
  double beta = 0.5;    // structure vs trajectory reconstruction
  double lambda = 0.5;  // GPC vs STPR
  double tau1 = 0.07;
  double tau2 = 14.0;
  std::size_t mask_nodes = 10;  // a
  std::size_t mask_frames = 2;  // b
  // Sequence length f; 0 accepts whatever the dataset manifest declares.
  std::size_t frames = 0;

  double lr = 3.5e-4;
  std::size_t batch_size = 256;
  std::size_t epochs = 150;
  std::size_t instances_per_id = 4;
  TrainMode mode = TrainMode::sgt_gpc_stpr;
  std::uint64_t seed = 0;

  bool normalize_contrastive = true;
  bool detach_prototypes = false;
  bool full_prototype_refresh = false;
  double dbscan_eps = 0.6;
  std::size_t dbscan_min_pts = 2;

  // Probe/gallery evaluation every N epochs (and after the last); 0 disables.
  std::size_t eval_every = 10;
  std::size_t eval_batch_size = 64;

  // Every violated constraint, one message each.
  std::vector<std::string> violations() const;
  // Throws ConfigError joining all violations.
  void validate() const;
};

// A run description: training settings plus where data comes from and
// where outputs go.
struct RunConfig {
  TrainConfig train;
  std::filesystem::path manifest;
  std::filesystem::path output_dir;
};

nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const RunConfig& config);

// Unknown keys and wrongly typed values are collected together with range
// violations and reported in one ConfigError.
TrainConfig train_config_from_json(const nlohmann::json& j);
RunConfig run_config_from_json(const nlohmann::json& j);

// Precedence: built-in defaults < file < overrides. Each override is
// "key=value"; the value is read as a JSON literal when it parses as one and
// as a string otherwise. Relative paths in the file resolve against the file's
// directory; relative paths in overrides against the working directory.
RunConfig load_run_config(const std::filesystem::path& file,
                          const std::vector<std::string>& overrides = {});
void apply_overrides(nlohmann::json& j, const std::vector<std::string>& overrides);

}  // namespace transg::trainer
