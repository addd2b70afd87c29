#include "transg/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "transg/dbscan.hpp"
#include "transg/error.hpp"
#include "transg/synth.hpp"

namespace transg::trainer {

namespace ops = numerics::ops;
using numerics::Tensor;
using skeledata::Dataset;

namespace {

bool is_supervised(TrainMode m) { return m != TrainMode::unsupervised; }
bool uses_sgt(TrainMode m) { return m != TrainMode::pc && m != TrainMode::baseline; }

double value_or_zero(const Tensor& t) { return t.defined() ? t.item() : 0.0; }

float to_f32(double v) { return static_cast<float>(v); }

void round_values(std::span<double> values) {
  for (double& v : values) v = static_cast<double>(to_f32(v));
}

std::vector<int> sorted_labels(const std::vector<skeledata::SkeletonSequence>& seqs) {
  std::set<int> s;
  for (const auto& q : seqs)
    if (q.identity >= 0) s.insert(q.identity);
  return {s.begin(), s.end()};
}

}  // namespace

LossTerms& LossTerms::operator+=(const LossTerms& o) {
  total += o.total;
  gpc_seq += o.gpc_seq;
  gpc_ske += o.gpc_ske;
  stpr_st += o.stpr_st;
  stpr_tr += o.stpr_tr;
  return *this;
}

LossTerms LossTerms::scaled(double s) const {
  return {total * s, gpc_seq * s, gpc_ske * s, stpr_st * s, stpr_tr * s};
}

LossWeights effective_weights(const TrainConfig& c) {
  switch (c.mode) {
    case TrainMode::baseline:
    case TrainMode::pc:
    case TrainMode::sgt_ds:
      return {1.0, c.beta, 1.0};
    case TrainMode::sgt_gpc:
      return {c.alpha, c.beta, 1.0};
    case TrainMode::sgt_gpc_stpr:
    case TrainMode::unsupervised:
      return {c.alpha, c.beta, c.lambda};
  }
  return {c.alpha, c.beta, c.lambda};
}

LossTerms LossBreakdown::values() const {
  return {value_or_zero(total), value_or_zero(gpc_seq), value_or_zero(gpc_ske),
          value_or_zero(stpr_st), value_or_zero(stpr_tr)};
}

LossBreakdown compute_loss(const TrainConfig& config, sgt::EncoderState& state,
                           const graphpe::SkeletonGraphSpec& graph,
                           const skeledata::Batch& batch, const objectives::MaskPlan& plan,
                           const std::vector<int>& class_ids,
                           const objectives::PrototypeSet* fixed_prototypes) {
  if (config.mode == TrainMode::baseline) {
    throw ConfigError("baseline mode has no training objective");
  }
  const LossWeights w = effective_weights(config);
  const auto reps = sgt::encode(batch, graph, state, sgt::Mode::train);
  LossBreakdown out;

  Tensor gpc;
  if (w.lambda > 0.0) {
    if (config.mode == TrainMode::sgt_ds) {
      std::vector<std::size_t> targets;
      targets.reserve(batch.size);
      for (int label : batch.labels) {
        auto it = std::lower_bound(class_ids.begin(), class_ids.end(), label);
        if (it == class_ids.end() || *it != label) {
          throw ContractViolation("label " + std::to_string(label) + " has no classifier row");
        }
        targets.push_back(static_cast<std::size_t>(it - class_ids.begin()));
      }
      Tensor logits = state.classifier(reps.sequence_reps);
      out.gpc_seq =
          ops::scale(ops::mean(ops::pick(ops::log_softmax_last(logits), targets)), -1.0);
      gpc = out.gpc_seq;
    } else {
      std::vector<std::size_t> rows;
      std::vector<int> labels;
      for (std::size_t i = 0; i < batch.size; ++i) {
        if (batch.labels[i] < 0) continue;
        rows.push_back(i);
        labels.push_back(batch.labels[i]);
      }
      const std::set<int> distinct(labels.begin(), labels.end());
      if (distinct.size() < 2) {
        out.gpc_skipped = true;
      } else {
        const bool all_rows = rows.size() == batch.size;
        Tensor seq = all_rows ? reps.sequence_reps
                              : objectives::select_rows(reps.sequence_reps, rows);
        objectives::PrototypeSet batch_protos;
        const objectives::PrototypeSet* protos = fixed_prototypes;
        if (!protos) {
          batch_protos = objectives::compute_prototypes(seq, labels, config.detach_prototypes);
          protos = &batch_protos;
        }
        if (w.alpha > 0.0) {
          out.gpc_seq = objectives::gpc_seq_loss(seq, labels, *protos, config.tau1,
                                                 config.normalize_contrastive);
        }
        if (w.alpha < 1.0) {
          Tensor ske = all_rows ? reps.skeleton_reps
                                : objectives::select_rows(reps.skeleton_reps, rows);
          out.gpc_ske = objectives::gpc_ske_loss(ske, labels, *protos, state.proj_skeleton,
                                                 state.proj_prototype, config.tau2,
                                                 config.normalize_contrastive);
        }
        gpc = objectives::gpc_loss(out.gpc_seq, out.gpc_ske, w.alpha);
      }
    }
  }

  if (w.lambda < 1.0) {
    const Tensor truth = sgt::batch_tensor(batch);
    if (w.beta > 0.0) {
      out.stpr_st =
          objectives::stpr_structure(reps.node_reps, plan, state.recon_structure, truth);
    }
    if (w.beta < 1.0) {
      out.stpr_tr =
          objectives::stpr_trajectory(reps.node_reps, plan, state.recon_trajectory, truth);
    }
  }

  if (!gpc.defined() && w.lambda > 0.0) gpc = Tensor::scalar(0.0);
  out.total = objectives::total_loss(gpc, out.stpr_st, out.stpr_tr, w.beta, w.lambda);
  return out;
}

void check_dataset(const TrainConfig& config, const Dataset& dataset) {
  const auto& m = dataset.manifest;
  if (dataset.train.empty()) throw SchemaError("no sequences in the train split");
  if (config.frames != 0 && config.frames != m.frames) {
    throw ConfigError("config frames f=" + std::to_string(config.frames) +
                      " but the dataset provides f=" + std::to_string(m.frames));
  }
  const LossWeights w = effective_weights(config);
  if (config.mode != TrainMode::baseline && w.lambda < 1.0) {
    std::vector<std::string> v;
    if (config.mask_nodes >= m.joints) {
      v.push_back("mask_nodes (a=" + std::to_string(config.mask_nodes) +
                  ") must be smaller than J=" + std::to_string(m.joints));
    }
    if (config.mask_frames >= m.frames) {
      v.push_back("mask_frames (b=" + std::to_string(config.mask_frames) +
                  ") must be smaller than f=" + std::to_string(m.frames));
    }
    if (!v.empty()) {
      std::string msg = v[0];
      for (std::size_t i = 1; i < v.size(); ++i) msg += "; " + v[i];
      throw ConfigError(msg);
    }
  }
  if (is_supervised(config.mode)) {
    for (const auto& s : dataset.train) {
      if (s.identity < 0) {
        throw SchemaError(std::string("mode ") + mode_name(config.mode) +
                          " needs identity labels, but sequence " + s.source_id +
                          " is unlabeled");
      }
    }
    if (sorted_labels(dataset.train).size() < 2) {
      throw SchemaError(std::string("mode ") + mode_name(config.mode) +
                        " needs at least 2 training identities");
    }
  }
}

Trainer::Trainer(TrainConfig config, const Dataset& dataset)
    : config_(std::move(config)), data_(&dataset), rng_(config_.seed) {
  setup();
}

Trainer::Trainer(const Checkpoint& ckpt, const Dataset& dataset)
    : config_(ckpt.config), data_(&dataset), rng_(ckpt.config.seed) {
  setup();
  const auto& m = dataset.manifest;
  if (ckpt.model.joints != m.joints || ckpt.model.frames != m.frames ||
      ckpt.model.edges != m.edges) {
    throw IncompatibleCheckpoint("checkpoint was trained on J=" +
                                 std::to_string(ckpt.model.joints) + ", f=" +
                                 std::to_string(ckpt.model.frames) +
                                 " with a different skeleton than the dataset");
  }
  if (ckpt.model.class_ids != model_.class_ids) {
    throw IncompatibleCheckpoint("checkpoint identities differ from the dataset's train split");
  }
  state_ = restore_state(ckpt);
  std::vector<numerics::NamedTensor> params = state_.parameters();
  adam_.emplace(params, numerics::AdamOptions{config_.lr});
  auto& mom1 = adam_->first_moments();
  auto& mom2 = adam_->second_moments();
  for (std::size_t i = 0; i < params.size(); ++i) {
    bool found_m = false, found_v = false;
    for (const auto& t : ckpt.tensors) {
      if (t.name != params[i].name) continue;
      if (t.kind == TensorKind::adam_m && t.values.size() == mom1[i].size()) {
        mom1[i] = t.values;
        found_m = true;
      } else if (t.kind == TensorKind::adam_v && t.values.size() == mom2[i].size()) {
        mom2[i] = t.values;
        found_v = true;
      }
    }
    if (!found_m || !found_v) {
      throw IncompatibleCheckpoint("optimizer state for " + params[i].name + " is missing");
    }
  }
  adam_->set_steps(ckpt.progress.adam_steps);
  for (const auto& t : ckpt.tensors) {
    if (t.kind == TensorKind::buffer && t.name == "trainer.prototypes") {
      objectives::PrototypeSet set;
      set.class_ids = model_.class_ids;
      set.counts.assign(set.class_ids.size(), 0);
      set.prototypes = Tensor::from(t.shape, t.values);
      full_prototypes_ = std::move(set);
    }
  }
  progress_ = ckpt.progress;
  rng_ = numerics::SeededRng::deserialize(ckpt.rng_state);
  pseudo_labels_ = ckpt.pseudo_labels;
  if (!pseudo_labels_.empty() && pseudo_labels_.size() != dataset.train.size()) {
    throw IncompatibleCheckpoint("pseudo-labels do not match the train split size");
  }
  std::set<int> clusters;
  for (int l : pseudo_labels_)
    if (l >= 0) clusters.insert(l);
  clusters_ = clusters.size();
}

void Trainer::setup() {
  config_.validate();
  check_dataset(config_, *data_);
  const auto& m = data_->manifest;
  model_.joints = m.joints;
  model_.frames = m.frames;
  model_.edges = m.edges;
  model_.kind = config_.mode == TrainMode::pc ? sgt::EncoderKind::linear : sgt::EncoderKind::sgt;
  if (is_supervised(config_.mode)) model_.class_ids = sorted_labels(data_->train);

  graph_ = graphpe::build_graph(m.joints, m.edges);
  if (uses_sgt(config_.mode) && config_.model.use_pe) {
    graph_ = graphpe::compute_pe(std::move(graph_), config_.model.pe_dim);
  }
  const std::size_t classes = config_.mode == TrainMode::sgt_ds ? model_.class_ids.size() : 0;
  state_ = sgt::EncoderState::create(config_.model, m.joints, m.frames, classes, model_.kind, rng_);
  adam_.emplace(state_.parameters(), numerics::AdamOptions{config_.lr});
  round_state();

  const std::size_t n = data_->train.size();
  if (config_.mode == TrainMode::baseline) {
    batch_size_ = 0;
    steps_per_epoch_ = 0;
  } else if (is_supervised(config_.mode)) {
    const std::size_t labels = model_.class_ids.size();
    const std::size_t per_batch = std::min(config_.batch_size / config_.instances_per_id, labels);
    batch_size_ = per_batch * config_.instances_per_id;
    steps_per_epoch_ = (n + batch_size_ - 1) / batch_size_;
  } else {
    batch_size_ = std::min(config_.batch_size, n);
    steps_per_epoch_ = (n + batch_size_ - 1) / batch_size_;
  }
}

void Trainer::round_state() {
  for (auto& p : state_.parameters()) round_values(p.tensor.mutable_data());
  for (auto& b : state_.buffers()) round_values(*b.values);
  if (adam_) {
    for (auto& m : adam_->first_moments()) round_values(m);
    for (auto& v : adam_->second_moments()) round_values(v);
  }
  if (full_prototypes_) round_values(full_prototypes_->prototypes.mutable_data());
}

void Trainer::refresh_epoch_state() {
  const LossWeights w = effective_weights(config_);
  if (config_.mode == TrainMode::unsupervised) {
    const auto reps = evalrank::embed_split(state_, graph_, data_->train, config_.eval_batch_size);
    pseudo_labels_ = pseudo_label(reps.values, reps.rows, reps.cols, config_.dbscan_eps,
                                  config_.dbscan_min_pts);
    std::set<int> clusters;
    for (int l : pseudo_labels_)
      if (l >= 0) clusters.insert(l);
    clusters_ = clusters.size();
  } else if (config_.full_prototype_refresh && w.lambda > 0.0 &&
             config_.mode != TrainMode::sgt_ds) {
    const auto reps = evalrank::embed_split(state_, graph_, data_->train, config_.eval_batch_size);
    const auto labels = evalrank::identities(data_->train);
    numerics::NoGradGuard no_grad;
    full_prototypes_ = objectives::compute_prototypes(
        Tensor::from({reps.rows, reps.cols}, reps.values), labels, true);
    round_values(full_prototypes_->prototypes.mutable_data());
  }
}

StepRecord Trainer::step() {
  if (config_.mode == TrainMode::baseline) {
    throw ConfigError("baseline mode has no training step");
  }
  if (progress_.step_in_epoch == 0) refresh_epoch_state();

  const bool supervised = is_supervised(config_.mode);
  std::vector<int> labels =
      supervised ? evalrank::identities(data_->train) : pseudo_labels_;
  if (labels.empty()) labels.assign(data_->train.size(), -1);
  skeledata::BatchSampler sampler(data_->train, std::move(labels), config_.instances_per_id);
  const auto batch = sampler.sample(
      config_.batch_size,
      supervised ? skeledata::SamplingMode::supervised : skeledata::SamplingMode::unsupervised,
      rng_);
  objectives::MaskPlan plan;
  if (effective_weights(config_).lambda < 1.0) {
    plan = objectives::MaskPlan::sample(batch.size, batch.frames, batch.joints,
                                        config_.mask_nodes, config_.mask_frames, rng_);
  }

  const long index = progress_.global_step + 1;
  const auto loss = compute_loss(config_, state_, graph_, batch, plan, model_.class_ids,
                                 full_prototypes_ ? &*full_prototypes_ : nullptr);
  const LossTerms values = loss.values();
  for (double v : {values.total, values.gpc_seq, values.gpc_ske, values.stpr_st, values.stpr_tr}) {
    if (!std::isfinite(v)) {
      throw DivergenceError("non-finite loss at step " + std::to_string(index), index);
    }
  }

  adam_->zero_grad();
  loss.total.backward();
  adam_->step();
  round_state();

  progress_.global_step = index;
  progress_.adam_steps = adam_->steps();
  progress_.epoch_sums += values;
  if (loss.gpc_skipped) ++progress_.epoch_gpc_skips;
  ++progress_.step_in_epoch;
  return {index, values, loss.gpc_skipped, batch.size};
}

EpochRecord Trainer::run_epoch() {
  EpochRecord rec;
  rec.epoch = progress_.epoch + 1;
  if (config_.mode != TrainMode::baseline) {
    while (progress_.step_in_epoch < steps_per_epoch_) step();
    rec.steps = progress_.step_in_epoch;
    rec.losses = progress_.epoch_sums.scaled(1.0 / static_cast<double>(rec.steps));
    rec.gpc_skipped_steps = progress_.epoch_gpc_skips;
    rec.clusters = clusters_;
  }
  progress_.epoch = rec.epoch;
  progress_.step_in_epoch = 0;
  progress_.epoch_sums = {};
  progress_.epoch_gpc_skips = 0;

  const bool scheduled = config_.eval_every > 0 &&
                         (rec.epoch % config_.eval_every == 0 || rec.epoch >= config_.epochs);
  if (scheduled && can_evaluate()) {
    rec.metrics = evaluate();
    note_metrics(*rec.metrics);
  }
  return rec;
}

std::vector<EpochRecord> Trainer::train(const std::function<void(const EpochRecord&)>& on_epoch) {
  std::vector<EpochRecord> records;
  if (config_.mode == TrainMode::baseline) {
    EpochRecord rec;
    if (can_evaluate()) {
      rec.metrics = evaluate();
      note_metrics(*rec.metrics);
    }
    if (on_epoch) on_epoch(rec);
    records.push_back(rec);
    return records;
  }
  while (progress_.epoch < config_.epochs) {
    records.push_back(run_epoch());
    if (on_epoch) on_epoch(records.back());
  }
  return records;
}

bool Trainer::can_evaluate() const {
  try {
    skeledata::validate_for_evaluation(*data_);
    return true;
  } catch (const Error&) {
    return false;
  }
}

EvalMetrics Trainer::evaluate() {
  skeledata::validate_for_evaluation(*data_);
  evalrank::RepMatrix probe, gallery;
  if (config_.mode == TrainMode::baseline) {
    probe = evalrank::raw_features(data_->probe);
    gallery = evalrank::raw_features(data_->gallery);
  } else {
    probe = evalrank::embed_split(state_, graph_, data_->probe, config_.eval_batch_size);
    gallery = evalrank::embed_split(state_, graph_, data_->gallery, config_.eval_batch_size);
  }
  const auto probe_ids = evalrank::identities(data_->probe);
  const auto gallery_ids = evalrank::identities(data_->gallery);
  const auto report = evalrank::match(probe, gallery, probe_ids, gallery_ids);
  return {report.mean_ap, report.rank1, report.rank5, report.rank10};
}

bool Trainer::note_metrics(const EvalMetrics& metrics) {
  if (metrics.mean_ap <= progress_.best_map) return false;
  progress_.best_map = metrics.mean_ap;
  progress_.best_epoch = progress_.epoch;
  return true;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.config = config_;
  c.model = model_;
  auto& state = const_cast<sgt::EncoderState&>(state_);
  const auto params = state.parameters();
  for (const auto& p : params) {
    c.tensors.push_back({p.name, TensorKind::parameter, p.tensor.shape(),
                         {p.tensor.data().begin(), p.tensor.data().end()}});
  }
  for (const auto& b : state.buffers()) {
    c.tensors.push_back({b.name, TensorKind::buffer, {b.values->size()}, *b.values});
  }
  if (full_prototypes_) {
    const auto& t = full_prototypes_->prototypes;
    c.tensors.push_back({"trainer.prototypes", TensorKind::buffer, t.shape(),
                         {t.data().begin(), t.data().end()}});
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    c.tensors.push_back({params[i].name, TensorKind::adam_m, params[i].tensor.shape(),
                         adam_->first_moments()[i]});
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    c.tensors.push_back({params[i].name, TensorKind::adam_v, params[i].tensor.shape(),
                         adam_->second_moments()[i]});
  }
  c.progress = progress_;
  c.rng_state = rng_.serialize();
  c.pseudo_labels = pseudo_labels_;
  return c;
}

std::string metrics_csv_header() {
  return "epoch,L_total,L_gpc_seq,L_gpc_ske,L_stpr_st,L_stpr_tr,mAP,R1,R5,R10";
}

std::string metrics_csv_row(const EpochRecord& r) {
  std::ostringstream os;
  os << std::setprecision(17) << r.epoch << ',' << r.losses.total << ',' << r.losses.gpc_seq
     << ',' << r.losses.gpc_ske << ',' << r.losses.stpr_st << ',' << r.losses.stpr_tr;
  if (r.metrics) {
    os << std::setprecision(6) << ',' << 100.0 * r.metrics->mean_ap << ','
       << 100.0 * r.metrics->rank1 << ',' << 100.0 * r.metrics->rank5 << ','
       << 100.0 * r.metrics->rank10;
  } else {
    os << ",,,,";
  }
  return os.str();
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << metrics_csv_header() << '\n';
  for (const auto& r : records) out << metrics_csv_row(r) << '\n';
}

std::vector<AblationRow> train_ablation_suite(const TrainConfig& config, const Dataset& dataset,
                                              const std::function<void(const AblationRow&)>& on_row) {
  skeledata::validate_for_evaluation(dataset);
  std::vector<AblationRow> rows;
  for (TrainMode mode : ablation_modes()) {
    const auto start = std::chrono::steady_clock::now();
    TrainConfig c = config;
    c.mode = mode;
    c.eval_every = 0;
    Trainer t(c, dataset);
    if (mode != TrainMode::baseline) t.train();
    AblationRow row{mode, t.evaluate(), mode == TrainMode::baseline ? 0 : c.epochs,
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count()};
    if (on_row) on_row(row);
    rows.push_back(row);
  }
  return rows;
}

void write_ablation_csv(const std::filesystem::path& path, const std::vector<AblationRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "mode,epochs,mAP,R1,R5,R10\n" << std::fixed << std::setprecision(4);
  for (const auto& r : rows) {
    out << mode_name(r.mode) << ',' << r.epochs << ',' << 100.0 * r.metrics.mean_ap << ','
        << 100.0 * r.metrics.rank1 << ',' << 100.0 * r.metrics.rank5 << ','
        << 100.0 * r.metrics.rank10 << '\n';
  }
}

GradcheckReport gradcheck(const TrainConfig& config, const Dataset& dataset, double tolerance,
                          double h, double floor) {
  const auto start = std::chrono::steady_clock::now();
  TrainConfig c = config;
  Trainer trainer(c, dataset);
  c = trainer.config();
  auto& state = trainer.state();
  const auto& graph = trainer.graph();
  numerics::SeededRng rng(c.seed ^ 0x9e3779b97f4a7c15ULL);

  const bool supervised = is_supervised(c.mode);
  std::vector<int> labels = evalrank::identities(dataset.train);
  if (!supervised) {
    // Stand-in pseudo-labels: the true identities, only to exercise GPC.
    for (int& l : labels) l = std::max(l, 0);
  }
  skeledata::BatchSampler sampler(dataset.train, labels, c.instances_per_id);
  const auto batch = sampler.sample(c.batch_size, skeledata::SamplingMode::supervised, rng);
  objectives::MaskPlan plan;
  if (effective_weights(c).lambda < 1.0) {
    plan = objectives::MaskPlan::sample(batch.size, batch.frames, batch.joints, c.mask_nodes,
                                        c.mask_frames, rng);
  }
  std::vector<int> class_ids = evalrank::identities(dataset.train);
  std::sort(class_ids.begin(), class_ids.end());
  class_ids.erase(std::unique(class_ids.begin(), class_ids.end()), class_ids.end());

  auto params = state.parameters();
  for (auto& p : params) p.tensor.zero_grad();
  const auto loss = compute_loss(c, state, graph, batch, plan, class_ids);
  GradcheckReport report;
  report.loss = loss.total.item();
  loss.total.backward();

  numerics::NoGradGuard no_grad;
  auto eval = [&] { return compute_loss(c, state, graph, batch, plan, class_ids).total.item(); };
  report.passed = true;
  for (auto& p : params) {
    GradcheckRow row;
    row.group = p.name;
    row.size = p.tensor.numel();
    const std::vector<double> analytic(p.tensor.grad().begin(), p.tensor.grad().end());
    auto values = p.tensor.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + h;
      const double up = eval();
      values[i] = original - h;
      const double down = eval();
      values[i] = original;
      const double numeric = (up - down) / (2.0 * h);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
      row.max_rel_error = std::max(row.max_rel_error, std::abs(analytic[i] - numeric) / denom);
      row.max_abs_grad = std::max(row.max_abs_grad, std::abs(analytic[i]));
    }
    row.passed = row.max_rel_error < tolerance;
    report.passed = report.passed && row.passed;
    report.rows.push_back(row);
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.model.d = 8;
  c.model.heads = 2;
  c.model.head_dim = 4;
  c.model.layers = 1;
  c.model.pe_dim = 2;
  c.frames = 2;
  c.mask_nodes = 1;
  c.mask_frames = 1;
  c.batch_size = 4;
  c.instances_per_id = 2;
  c.epochs = 2;
  c.eval_every = 0;
  c.eval_batch_size = 4;
  c.seed = 11;
  return c;
}

Dataset tiny_dataset(std::uint64_t seed) {
  skeledata::Topology topo;
  topo.name = "chain4";
  topo.joints = 4;
  topo.edges = {{0, 1}, {1, 2}, {2, 3}};
  numerics::SeededRng rng(seed);
  return skeledata::generate_synthetic_dataset(2, {4, 2, 2}, 2, topo, rng);
}

}  // namespace transg::trainer
