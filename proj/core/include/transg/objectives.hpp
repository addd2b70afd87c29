#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "transg/numerics/layers.hpp"
#include "transg/numerics/rng.hpp"
#include "transg/numerics/tensor.hpp"

namespace transg::objectives {

using numerics::Tensor;

// Identity prototypes: the mean sequence representation of each class.
struct PrototypeSet {
  std::vector<int> class_ids;      // ascending
  std::vector<std::size_t> counts;
  Tensor prototypes;               // C x d

  std::size_t size() const { return class_ids.size(); }
  // Row of `label` in prototypes; throws ContractViolation when absent.
  std::size_t index_of(int label) const;
  std::vector<std::size_t> targets(std::span<const int> labels) const;
};

// Means over the rows of sequence_reps [B, d] sharing a label; negative
// labels are ignored. Gradients flow into the reps unless `detach`. Needs at
// least two distinct classes.
PrototypeSet compute_prototypes(const Tensor& sequence_reps, std::span<const int> labels,
                                bool detach = false);

// Rows of x [B, ...] at `rows`, as a differentiable gather.
Tensor select_rows(const Tensor& x, std::span<const std::size_t> rows);

// Mean over sequences of -log softmax_c(S . c_c / tau1) at the own class.
// With `normalize`, S and the prototypes are L2-normalized first.
Tensor gpc_seq_loss(const Tensor& sequence_reps, std::span<const int> labels,
                    const PrototypeSet& prototypes, double tau1, bool normalize = true);

// The same contrast per frame, between F_1(s^t) and F_2(c), averaged over
// all B*f skeleton-level terms.
Tensor gpc_ske_loss(const Tensor& skeleton_reps, std::span<const int> labels,
                    const PrototypeSet& prototypes, const numerics::Linear& proj_skeleton,
                    const numerics::Linear& proj_prototype, double tau2, bool normalize = true);

// alpha * seq + (1 - alpha) * ske; at alpha = 1 `ske` may be undefined.
Tensor gpc_loss(const Tensor& seq_term, const Tensor& ske_term, double alpha);

// Binary keep-masks (1 = keep) for structure and trajectory prompting.
struct MaskPlan {
  std::size_t batch = 0;
  std::size_t frames = 0;
  std::size_t joints = 0;
  std::size_t node_masks = 0;        // a: masked nodes per frame
  std::size_t trajectory_masks = 0;  // b: masked frames per sequence
  std::vector<double> node_keep;       // B x f x J, exactly J - a ones per frame
  std::vector<double> trajectory_keep; // B x f, exactly f - b ones, shared by all J nodes

  // Uniform without replacement, node masks independent per frame.
  static MaskPlan sample(std::size_t batch, std::size_t frames, std::size_t joints,
                         std::size_t a, std::size_t b, numerics::SeededRng& rng);
};

// s_hat^t = (1 / (J - a)) sum_i m_i h_i^t  -> [B, f, d]
Tensor structure_prompt(const Tensor& node_reps, const MaskPlan& plan);
// T_i = (1 / (f - b)) sum_t u^t h_i^t  -> [B, J, d]
Tensor trajectory_prompt(const Tensor& node_reps, const MaskPlan& plan);

// Mean over sequences of || f_s(s_hat^t) reshaped to J x 3, stacked over t - X ||_1.
Tensor stpr_structure(const Tensor& node_reps, const MaskPlan& plan,
                      const numerics::Mlp& recon_structure, const Tensor& ground_truth);
// Mean over sequences of || f_t(T_i) reshaped to f x 3, transposed to f x J x 3 - X ||_1.
Tensor stpr_trajectory(const Tensor& node_reps, const MaskPlan& plan,
                       const numerics::Mlp& recon_trajectory, const Tensor& ground_truth);

Tensor stpr_loss(const Tensor& structure_term, const Tensor& trajectory_term, double beta);

// lambda * gpc + (1 - lambda) * (beta * st + (1 - beta) * tr). Terms whose
// weight is exactly zero may be undefined.
Tensor total_loss(const Tensor& gpc, const Tensor& structure_term, const Tensor& trajectory_term,
                  double beta, double lambda);

// Scalar form of the fused objective used for logging.
double combine_losses(double gpc_seq, double gpc_ske, double stpr_st, double stpr_tr,
                      double alpha, double beta, double lambda);

void check_unit_interval(const char* name, double value);
void check_temperature(const char* name, double tau);

}  // namespace transg::objectives
