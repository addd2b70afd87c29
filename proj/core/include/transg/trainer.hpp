#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "transg/checkpoint.hpp"
#include "transg/config.hpp"
#include "transg/evalrank.hpp"
#include "transg/graphpe.hpp"
#include "transg/numerics/adam.hpp"
#include "transg/numerics/rng.hpp"
#include "transg/objectives.hpp"
#include "transg/sampler.hpp"
#include "transg/sgt.hpp"
#include "transg/skeledata.hpp"

namespace transg::trainer {

// Fusion weights a mode actually trains with. Ablation rows that drop a term
// pin its weight (e.g. the GPC-only rows use lambda = 1), so logged
// components always recombine to the logged total with these weights.
struct LossWeights {
  double alpha = 0.5;
  double beta = 0.5;
  double lambda = 0.5;
};
LossWeights effective_weights(const TrainConfig& config);

struct LossBreakdown {
  numerics::Tensor total;
  numerics::Tensor gpc_seq;  // holds the cross-entropy in sgt_ds mode
  numerics::Tensor gpc_ske;
  numerics::Tensor stpr_st;
  numerics::Tensor stpr_tr;
  bool gpc_skipped = false;  // fewer than two classes among the batch labels

  LossTerms values() const;
};

// The training objective of `config.mode` on one batch. `class_ids` maps
// labels to classifier rows (sgt_ds). With `fixed_prototypes` the GPC terms
// contrast against those instead of batch prototypes. Labels below zero are
// left out of the GPC terms.
LossBreakdown compute_loss(const TrainConfig& config, sgt::EncoderState& state,
                           const graphpe::SkeletonGraphSpec& graph,
                           const skeledata::Batch& batch, const objectives::MaskPlan& plan,
                           const std::vector<int>& class_ids = {},
                           const objectives::PrototypeSet* fixed_prototypes = nullptr);

struct EvalMetrics {
  double mean_ap = 0.0;  // fractions in [0, 1]
  double rank1 = 0.0;
  double rank5 = 0.0;
  double rank10 = 0.0;
};

struct StepRecord {
  long step = 0;  // 1-based global index
  LossTerms losses;
  bool gpc_skipped = false;
  std::size_t batch_size = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  LossTerms losses;       // means over the epoch's steps
  std::size_t steps = 0;
  std::size_t gpc_skipped_steps = 0;
  std::size_t clusters = 0;  // unsupervised mode: pseudo-label clusters this epoch
  std::optional<EvalMetrics> metrics;
};

// Owns the run: network, optimizer, sampler and RNG. The dataset must
// outlive the trainer. A single thread drives it.
class Trainer {
 public:
  Trainer(TrainConfig config, const skeledata::Dataset& dataset);
  // Resumes exactly where `checkpoint` left off.
  Trainer(const Checkpoint& checkpoint, const skeledata::Dataset& dataset);

  // One optimizer step. Throws DivergenceError on a non-finite loss.
  StepRecord step();
  // Finishes the current epoch (resuming mid-epoch if needed) and evaluates
  // when the schedule asks for it.
  EpochRecord run_epoch();
  // Runs the remaining epochs up to config.epochs.
  std::vector<EpochRecord> train(const std::function<void(const EpochRecord&)>& on_epoch = {});

  bool can_evaluate() const;
  EvalMetrics evaluate();

  Checkpoint checkpoint() const;

  const TrainConfig& config() const { return config_; }
  const sgt::EncoderState& state() const { return state_; }
  sgt::EncoderState& state() { return state_; }
  const graphpe::SkeletonGraphSpec& graph() const { return graph_; }
  const TrainingProgress& progress() const { return progress_; }
  const std::vector<int>& pseudo_labels() const { return pseudo_labels_; }
  std::size_t steps_per_epoch() const { return steps_per_epoch_; }
  std::size_t batch_size() const { return batch_size_; }
  const numerics::SeededRng& rng() const { return rng_; }
  // Records a new best probe mAP; true when it improved.
  bool note_metrics(const EvalMetrics& metrics);

 private:
  void setup();
  void refresh_epoch_state();
  void round_state();

  TrainConfig config_;
  const skeledata::Dataset* data_;
  ModelInfo model_;
  graphpe::SkeletonGraphSpec graph_;
  sgt::EncoderState state_;
  std::optional<numerics::Adam> adam_;
  numerics::SeededRng rng_;
  TrainingProgress progress_;
  std::vector<int> pseudo_labels_;
  std::optional<objectives::PrototypeSet> full_prototypes_;
  std::size_t clusters_ = 0;
  std::size_t steps_per_epoch_ = 0;
  std::size_t batch_size_ = 0;
};

// Mode checks against a dataset: label requirements, mask sizes, f.
void check_dataset(const TrainConfig& config, const skeledata::Dataset& dataset);

// Metrics log: one row per epoch under the fixed header
// epoch,L_total,L_gpc_seq,L_gpc_ske,L_stpr_st,L_stpr_tr,mAP,R1,R5,R10 with
// metrics in percent and left blank for epochs without evaluation.
void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& records);
std::string metrics_csv_header();
std::string metrics_csv_row(const EpochRecord& record);

struct AblationRow {
  TrainMode mode;
  EvalMetrics metrics;
  std::size_t epochs = 0;
  double seconds = 0.0;
};

// Trains and evaluates every ablation mode on the same splits with the same
// seed, in table order. The baseline row matches raw concatenated joints.
std::vector<AblationRow> train_ablation_suite(
    const TrainConfig& config, const skeledata::Dataset& dataset,
    const std::function<void(const AblationRow&)>& on_row = {});
void write_ablation_csv(const std::filesystem::path& path, const std::vector<AblationRow>& rows);

struct GradcheckRow {
  std::string group;
  std::size_t size = 0;
  double max_rel_error = 0.0;
  double max_abs_grad = 0.0;
  bool passed = false;
};

struct GradcheckReport {
  std::vector<GradcheckRow> rows;
  bool passed = false;
  double seconds = 0.0;
  double loss = 0.0;
};

// Compares analytic gradients of the full objective with central finite
// differences for every parameter tensor, on one fixed batch and mask plan.
// Relative error per element is |g - n| / max(|g|, |n|, floor).
GradcheckReport gradcheck(const TrainConfig& config, const skeledata::Dataset& dataset,
                          double tolerance = 1e-4, double step = 1e-5, double floor = 1e-6);

// J=4 chain, f=2, d=8, H=2, d_k=4, one layer, batches of 4 over 2 identities,
// a=1, b=1.
TrainConfig tiny_config();
skeledata::Dataset tiny_dataset(std::uint64_t seed = 7);

}  // namespace transg::trainer
