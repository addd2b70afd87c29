#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "transg/config.hpp"
#include "transg/graphpe.hpp"
#include "transg/numerics/tensor.hpp"
#include "transg/sgt.hpp"
#include "transg/skeledata.hpp"

namespace transg::trainer {

inline constexpr int kCheckpointVersion = 1;

// Per-step or per-epoch loss components. Terms a mode does not compute are 0.
struct LossTerms {
  double total = 0.0;
  double gpc_seq = 0.0;
  double gpc_ske = 0.0;
  double stpr_st = 0.0;
  double stpr_tr = 0.0;

  LossTerms& operator+=(const LossTerms& o);
  LossTerms scaled(double s) const;
};

// What is needed besides the weights to rebuild the network.
struct ModelInfo {
  std::size_t joints = 0;
  std::size_t frames = 0;
  std::vector<skeledata::Edge> edges;
  std::vector<int> class_ids;  // classifier rows, sgt_ds only
  sgt::EncoderKind kind = sgt::EncoderKind::sgt;
};

enum class TensorKind { parameter, buffer, adam_m, adam_v };

struct StoredTensor {
  std::string name;
  TensorKind kind = TensorKind::parameter;
  numerics::Shape shape;
  std::vector<double> values;
};

struct TrainingProgress {
  std::size_t epoch = 0;          // completed epochs
  std::size_t step_in_epoch = 0;  // steps taken in the current epoch
  long global_step = 0;
  long adam_steps = 0;
  LossTerms epoch_sums;           // running sums over the current epoch
  std::size_t epoch_gpc_skips = 0;
  double best_map = -1.0;
  std::size_t best_epoch = 0;
};

struct Checkpoint {
  TrainConfig config;
  ModelInfo model;
  std::vector<StoredTensor> tensors;
  TrainingProgress progress;
  std::string rng_state;
  std::vector<int> pseudo_labels;  // unsupervised mode only
};

// Writes <dir>/manifest.json and <dir>/params.bin (little-endian f32, tensors
// concatenated in manifest order). Values are stored at f32 precision.
void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& checkpoint);

// Throws IoError when files are missing, ParseError on malformed or truncated
// content and IncompatibleCheckpoint on a version mismatch. Nothing is
// returned unless everything parsed.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

// An inference-ready network restored from a checkpoint.
struct LoadedModel {
  TrainConfig config;
  ModelInfo model;
  sgt::EncoderState state;
  graphpe::SkeletonGraphSpec graph;
};

LoadedModel load_model(const std::filesystem::path& dir);

// Builds the network a checkpoint describes and copies its parameters and
// buffers in. Throws IncompatibleCheckpoint on missing names or shape changes.
sgt::EncoderState restore_state(const Checkpoint& checkpoint);

}  // namespace transg::trainer
