#include "transg/objectives.hpp"

#include <algorithm>
#include <map>

#include "transg/error.hpp"

namespace transg::objectives {

namespace ops = numerics::ops;

void check_unit_interval(const char* name, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1], got " + std::to_string(value));
  }
}

void check_temperature(const char* name, double tau) {
  if (!(tau > 0.0)) {
    throw ConfigError(std::string(name) + " must be positive, got " + std::to_string(tau));
  }
}

std::size_t PrototypeSet::index_of(int label) const {
  auto it = std::lower_bound(class_ids.begin(), class_ids.end(), label);
  if (it == class_ids.end() || *it != label) {
    throw ContractViolation("label " + std::to_string(label) + " has no prototype");
  }
  return static_cast<std::size_t>(it - class_ids.begin());
}

std::vector<std::size_t> PrototypeSet::targets(std::span<const int> labels) const {
  std::vector<std::size_t> t;
  t.reserve(labels.size());
  for (int l : labels) t.push_back(index_of(l));
  return t;
}

Tensor select_rows(const Tensor& x, std::span<const std::size_t> rows) {
  const std::size_t n = x.dim(0);
  const std::size_t width = x.numel() / std::max<std::size_t>(n, 1);
  std::vector<double> sel(rows.size() * n, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= n) throw DimensionError("select_rows: row index out of range");
    sel[r * n + rows[r]] = 1.0;
  }
  numerics::Shape out_shape = x.shape();
  out_shape[0] = rows.size();
  Tensor flat = ops::reshape(x, {n, width});
  return ops::reshape(ops::matmul(Tensor::from({rows.size(), n}, std::move(sel)), flat),
                      std::move(out_shape));
}

PrototypeSet compute_prototypes(const Tensor& sequence_reps, std::span<const int> labels,
                                bool detach) {
  if (sequence_reps.rank() != 2 || sequence_reps.dim(0) != labels.size()) {
    throw DimensionError("compute_prototypes: reps " +
                         numerics::shape_str(sequence_reps.shape()) + " vs " +
                         std::to_string(labels.size()) + " labels");
  }
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) members[labels[i]].push_back(i);
  if (members.size() < 2) {
    throw ContractViolation("graph prototypes need at least 2 distinct classes, got " +
                            std::to_string(members.size()));
  }
  PrototypeSet set;
  const std::size_t n = labels.size();
  std::vector<double> avg(members.size() * n, 0.0);
  std::size_t c = 0;
  for (const auto& [label, idx] : members) {
    set.class_ids.push_back(label);
    set.counts.push_back(idx.size());
    for (std::size_t i : idx) avg[c * n + i] = 1.0 / static_cast<double>(idx.size());
    ++c;
  }
  const Tensor source = detach ? sequence_reps.detach() : sequence_reps;
  set.prototypes = ops::matmul(Tensor::from({members.size(), n}, std::move(avg)), source);
  return set;
}

namespace {

Tensor contrast(const Tensor& queries, const Tensor& keys, std::span<const std::size_t> targets,
                double tau, bool normalize) {
  Tensor q = normalize ? ops::l2_normalize_last(queries) : queries;
  Tensor k = normalize ? ops::l2_normalize_last(keys) : keys;
  Tensor logits = ops::scale(ops::matmul(q, ops::transpose2d(k)), 1.0 / tau);
  return ops::scale(ops::mean(ops::pick(ops::log_softmax_last(logits), targets)), -1.0);
}

}  // namespace

Tensor gpc_seq_loss(const Tensor& sequence_reps, std::span<const int> labels,
                    const PrototypeSet& prototypes, double tau1, bool normalize) {
  check_temperature("tau1", tau1);
  if (sequence_reps.rank() != 2 || sequence_reps.dim(0) != labels.size()) {
    throw DimensionError("gpc_seq_loss: reps " + numerics::shape_str(sequence_reps.shape()) +
                         " vs " + std::to_string(labels.size()) + " labels");
  }
  const auto targets = prototypes.targets(labels);
  return contrast(sequence_reps, prototypes.prototypes, targets, tau1, normalize);
}

Tensor gpc_ske_loss(const Tensor& skeleton_reps, std::span<const int> labels,
                    const PrototypeSet& prototypes, const numerics::Linear& proj_skeleton,
                    const numerics::Linear& proj_prototype, double tau2, bool normalize) {
  check_temperature("tau2", tau2);
  if (skeleton_reps.rank() != 3 || skeleton_reps.dim(0) != labels.size()) {
    throw DimensionError("gpc_ske_loss: reps " + numerics::shape_str(skeleton_reps.shape()) +
                         " vs " + std::to_string(labels.size()) + " labels");
  }
  const std::size_t b = skeleton_reps.dim(0);
  const std::size_t f = skeleton_reps.dim(1);
  const std::size_t d = skeleton_reps.dim(2);
  const auto per_seq = prototypes.targets(labels);
  std::vector<std::size_t> targets;
  targets.reserve(b * f);
  for (std::size_t i = 0; i < b; ++i) targets.insert(targets.end(), f, per_seq[i]);
  Tensor projected = ops::reshape(proj_skeleton(skeleton_reps), {b * f, d});
  return contrast(projected, proj_prototype(prototypes.prototypes), targets, tau2, normalize);
}

Tensor gpc_loss(const Tensor& seq_term, const Tensor& ske_term, double alpha) {
  check_unit_interval("alpha", alpha);
  if (alpha == 1.0) return seq_term;
  if (alpha == 0.0) return ske_term;
  return ops::add(ops::scale(seq_term, alpha), ops::scale(ske_term, 1.0 - alpha));
}

MaskPlan MaskPlan::sample(std::size_t batch, std::size_t frames, std::size_t joints,
                          std::size_t a, std::size_t b, numerics::SeededRng& rng) {
  if (a >= joints) {
    throw ConfigError("structure mask count a=" + std::to_string(a) + " must be below J=" +
                      std::to_string(joints));
  }
  if (b >= frames) {
    throw ConfigError("trajectory mask count b=" + std::to_string(b) + " must be below f=" +
                      std::to_string(frames));
  }
  MaskPlan plan;
  plan.batch = batch;
  plan.frames = frames;
  plan.joints = joints;
  plan.node_masks = a;
  plan.trajectory_masks = b;
  plan.node_keep.assign(batch * frames * joints, 1.0);
  plan.trajectory_keep.assign(batch * frames, 1.0);
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t t = 0; t < frames; ++t)
      for (std::size_t j : rng.sample_without_replacement(joints, a))
        plan.node_keep[(i * frames + t) * joints + j] = 0.0;
    for (std::size_t t : rng.sample_without_replacement(frames, b))
      plan.trajectory_keep[i * frames + t] = 0.0;
  }
  return plan;
}

namespace {

void check_plan(const Tensor& node_reps, const MaskPlan& plan) {
  if (node_reps.rank() != 4 || node_reps.dim(0) != plan.batch ||
      node_reps.dim(1) != plan.frames || node_reps.dim(2) != plan.joints) {
    throw DimensionError("mask plan for [" + std::to_string(plan.batch) + ", " +
                         std::to_string(plan.frames) + ", " + std::to_string(plan.joints) +
                         "] applied to node reps " + numerics::shape_str(node_reps.shape()));
  }
}

Tensor l1_per_sequence(const Tensor& prediction, const Tensor& ground_truth) {
  if (prediction.shape() != ground_truth.shape()) {
    throw DimensionError("reconstruction " + numerics::shape_str(prediction.shape()) +
                         " vs ground truth " + numerics::shape_str(ground_truth.shape()));
  }
  return ops::scale(ops::abs_sum(ops::sub(prediction, ground_truth)),
                    1.0 / static_cast<double>(prediction.dim(0)));
}

}  // namespace

Tensor structure_prompt(const Tensor& node_reps, const MaskPlan& plan) {
  check_plan(node_reps, plan);
  return ops::masked_mean(node_reps, 2, plan.node_keep);
}

Tensor trajectory_prompt(const Tensor& node_reps, const MaskPlan& plan) {
  check_plan(node_reps, plan);
  return ops::masked_mean(node_reps, 1, plan.trajectory_keep);
}

Tensor stpr_structure(const Tensor& node_reps, const MaskPlan& plan,
                      const numerics::Mlp& recon_structure, const Tensor& ground_truth) {
  Tensor prompt = structure_prompt(node_reps, plan);
  Tensor pred = ops::reshape(recon_structure(prompt), {plan.batch, plan.frames, plan.joints, 3});
  return l1_per_sequence(pred, ground_truth);
}

Tensor stpr_trajectory(const Tensor& node_reps, const MaskPlan& plan,
                       const numerics::Mlp& recon_trajectory, const Tensor& ground_truth) {
  Tensor prompt = trajectory_prompt(node_reps, plan);
  Tensor per_node =
      ops::reshape(recon_trajectory(prompt), {plan.batch, plan.joints, plan.frames, 3});
  return l1_per_sequence(ops::permute(per_node, {0, 2, 1, 3}), ground_truth);
}

Tensor stpr_loss(const Tensor& structure_term, const Tensor& trajectory_term, double beta) {
  check_unit_interval("beta", beta);
  if (beta == 1.0) return structure_term;
  if (beta == 0.0) return trajectory_term;
  return ops::add(ops::scale(structure_term, beta), ops::scale(trajectory_term, 1.0 - beta));
}

Tensor total_loss(const Tensor& gpc, const Tensor& structure_term, const Tensor& trajectory_term,
                  double beta, double lambda) {
  check_unit_interval("lambda", lambda);
  check_unit_interval("beta", beta);
  if (lambda == 1.0) return gpc;
  Tensor stpr = stpr_loss(structure_term, trajectory_term, beta);
  if (lambda == 0.0) return stpr;
  return ops::add(ops::scale(gpc, lambda), ops::scale(stpr, 1.0 - lambda));
}

double combine_losses(double gpc_seq, double gpc_ske, double stpr_st, double stpr_tr,
                      double alpha, double beta, double lambda) {
  const double gpc = alpha * gpc_seq + (1.0 - alpha) * gpc_ske;
  const double stpr = beta * stpr_st + (1.0 - beta) * stpr_tr;
  return lambda * gpc + (1.0 - lambda) * stpr;
}

}  // namespace transg::objectives
