#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "transg/error.hpp"
#include "transg/numerics/layers.hpp"
#include "transg/objectives.hpp"

namespace {

using namespace transg::objectives;
using transg::numerics::Linear;
using transg::numerics::Mlp;
using transg::numerics::SeededRng;
using transg::testing::random_tensor;
namespace ops = transg::numerics::ops;

Linear identity_linear(std::size_t d) {
  Linear l;
  std::vector<double> w(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) w[i * d + i] = 1.0;
  l.weight = Tensor::from({d, d}, w, true);
  l.bias = Tensor::zeros({d}, true);
  return l;
}

MaskPlan full_plan(std::size_t batch, std::size_t frames, std::size_t joints) {
  MaskPlan p;
  p.batch = batch;
  p.frames = frames;
  p.joints = joints;
  p.node_keep.assign(batch * frames * joints, 1.0);
  p.trajectory_keep.assign(batch * frames, 1.0);
  return p;
}

TEST(Prototypes, ClassMeans) {
  const Tensor reps = Tensor::from({3, 2}, {1, 0, 0, 1, 5, 5});
  const std::vector<int> labels{4, 4, 9};
  const auto set = compute_prototypes(reps, labels);
  ASSERT_EQ(set.class_ids, (std::vector<int>{4, 9}));
  EXPECT_EQ(set.counts, (std::vector<std::size_t>{2, 1}));
  EXPECT_DOUBLE_EQ(set.prototypes.at({0, 0}), 0.5);
  EXPECT_DOUBLE_EQ(set.prototypes.at({0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(set.prototypes.at({1, 0}), 5.0);
  EXPECT_EQ(set.index_of(9), 1u);
  EXPECT_THROW(set.index_of(3), transg::ContractViolation);
}

TEST(Prototypes, IdenticalMembersGiveThemselves) {
  const Tensor reps = Tensor::from({3, 2}, {0.3, -2, 0.3, -2, 1, 1});
  const auto set = compute_prototypes(reps, std::vector<int>{0, 0, 1});
  EXPECT_EQ(set.prototypes.at({0, 0}), 0.3);
  EXPECT_EQ(set.prototypes.at({0, 1}), -2.0);
}

TEST(Prototypes, SingleClassIsContractViolation) {
  EXPECT_THROW(compute_prototypes(Tensor::zeros({2, 2}), std::vector<int>{1, 1}),
               transg::ContractViolation);
}

TEST(Prototypes, NoiseLabelsAreIgnored) {
  const Tensor reps = Tensor::from({3, 1}, {1, 100, 3});
  const auto set = compute_prototypes(reps, std::vector<int>{0, -1, 1});
  EXPECT_EQ(set.size(), 2u);
  EXPECT_EQ(set.prototypes.at({0, 0}), 1.0);
}

TEST(Prototypes, DetachStopsGradient) {
  SeededRng rng(1);
  Tensor reps = random_tensor({4, 3}, rng);
  const std::vector<int> labels{0, 0, 1, 1};
  for (bool detach : {false, true}) {
    reps.zero_grad();
    const auto set = compute_prototypes(reps, labels, detach);
    ops::sum(set.prototypes).backward();
    double g = 0;
    if (reps.has_grad())
      for (double v : reps.grad()) g += std::abs(v);
    if (detach) EXPECT_EQ(g, 0.0);
    else EXPECT_NEAR(g, 6.0, 1e-12);  // 12 entries, each 1/n_k = 0.5
  }
}

TEST(GpcSeq, UniformSimilarityIsLogC) {
  // Every rep orthogonal to both prototypes.
  const Tensor reps = Tensor::from({2, 3}, {0, 0, 1, 0, 0, -2});
  PrototypeSet set;
  set.class_ids = {0, 1};
  set.counts = {1, 1};
  set.prototypes = Tensor::from({2, 3}, {1, 0, 0, 0, 1, 0});
  EXPECT_NEAR(gpc_seq_loss(reps, std::vector<int>{0, 1}, set, 0.07).item(), std::log(2.0), 1e-9);
  set.class_ids = {0, 1, 2};
  set.counts = {1, 1, 1};
  set.prototypes = Tensor::from({3, 3}, {1, 0, 0, 0, 1, 0, -1, 0, 0});
  EXPECT_NEAR(gpc_seq_loss(reps, std::vector<int>{2, 1}, set, 0.5).item(), std::log(3.0), 1e-9);
}

TEST(GpcSeq, SeparatedClassesClosedForm) {
  const Tensor reps = Tensor::from({1, 2}, {3, 0});
  PrototypeSet set;
  set.class_ids = {0, 1};
  set.counts = {1, 1};
  set.prototypes = Tensor::from({2, 2}, {2, 0, 0, 5});
  const double expected = std::log1p(std::exp(-1.0 / 0.07));
  // e^{-1/0.07} = e^{-14.2857...}
  EXPECT_NEAR(expected, 6.2487e-7, 1e-11);
  const double loss = gpc_seq_loss(reps, std::vector<int>{0}, set, 0.07).item();
  EXPECT_NEAR(loss, expected, 1e-15);
  EXPECT_GE(loss, 0.0);
}

TEST(GpcSeq, MonotoneInOwnPrototypeDistance) {
  PrototypeSet set;
  set.class_ids = {0, 1};
  set.counts = {1, 1};
  set.prototypes = Tensor::from({2, 2}, {1, 0, 0, 1});
  double previous = INFINITY;
  // Rotate the rep from the other prototype towards its own.
  for (int k = 0; k <= 20; ++k) {
    const double theta = M_PI / 2 * (1.0 - k / 20.0);
    const Tensor rep = Tensor::from({1, 2}, {std::cos(theta), std::sin(theta)});
    const double loss = gpc_seq_loss(rep, std::vector<int>{0}, set, 0.07).item();
    EXPECT_LE(loss, previous);
    previous = loss;
  }
}

TEST(GpcSeq, RejectsNonPositiveTemperature) {
  PrototypeSet set;
  set.class_ids = {0, 1};
  set.counts = {1, 1};
  set.prototypes = Tensor::zeros({2, 2});
  EXPECT_THROW(gpc_seq_loss(Tensor::zeros({1, 2}), std::vector<int>{0}, set, 0.0),
               transg::ConfigError);
  EXPECT_THROW(gpc_ske_loss(Tensor::zeros({1, 1, 2}), std::vector<int>{0}, set, identity_linear(2),
                            identity_linear(2), -1.0),
               transg::ConfigError);
}

TEST(GpcSke, CollapsesToSequenceLevelForSingleFrame) {
  SeededRng rng(2);
  const Tensor seq = random_tensor({4, 3}, rng);
  const std::vector<int> labels{0, 1, 0, 1};
  const auto set = compute_prototypes(seq, labels);
  const double a = gpc_seq_loss(seq, labels, set, 0.3).item();
  const double b = gpc_ske_loss(ops::reshape(seq, {4, 1, 3}), labels, set, identity_linear(3),
                                identity_linear(3), 0.3)
                       .item();
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(GpcSke, UniformSimilarityIsLogC) {
  const Tensor ske = Tensor::from({1, 2, 3}, {0, 0, 1, 0, 0, 4});
  PrototypeSet set;
  set.class_ids = {0, 1};
  set.counts = {1, 1};
  set.prototypes = Tensor::from({2, 3}, {1, 0, 0, 0, 1, 0});
  EXPECT_NEAR(gpc_ske_loss(ske, std::vector<int>{1}, set, identity_linear(3), identity_linear(3), 14)
                  .item(),
              std::log(2.0), 1e-9);
}

TEST(GpcSke, ProjectionGradientMatchesFiniteDifferences) {
  SeededRng rng(3);
  const Tensor ske = random_tensor({4, 2, 3}, rng, false);
  const std::vector<int> labels{0, 1, 1, 0};
  const Tensor protos = random_tensor({2, 3}, rng, false);
  Linear f2 = Linear::create(3, 3, true, rng);
  transg::testing::expect_gradients_match(
      [&](const std::vector<Tensor>& in) {
        PrototypeSet set;
        set.class_ids = {0, 1};
        set.counts = {2, 2};
        set.prototypes = protos;
        Linear f1{in[0], in[1]};
        return gpc_ske_loss(ske, labels, set, f1, f2, 0.5);
      },
      {random_tensor({3, 3}, rng), random_tensor({3}, rng)}, 1e-4, 1e-5);
}

TEST(GpcLoss, Fusion) {
  const Tensor seq = Tensor::scalar(2.0), ske = Tensor::scalar(4.0);
  EXPECT_DOUBLE_EQ(gpc_loss(seq, ske, 0.5).item(), 3.0);
  EXPECT_EQ(gpc_loss(seq, ske, 1.0).item(), 2.0);
  EXPECT_EQ(gpc_loss(seq, ske, 0.0).item(), 4.0);
  EXPECT_THROW(gpc_loss(seq, ske, 1.5), transg::ConfigError);
  EXPECT_THROW(gpc_loss(seq, ske, -0.1), transg::ConfigError);
}

TEST(MaskPlan, ExactMaskCounts) {
  SeededRng rng(4);
  const auto plan = MaskPlan::sample(5, 6, 20, 10, 2, rng);
  for (std::size_t i = 0; i < 5; ++i) {
    double kept_frames = 0;
    for (std::size_t t = 0; t < 6; ++t) {
      kept_frames += plan.trajectory_keep[i * 6 + t];
      double kept = 0;
      for (std::size_t j = 0; j < 20; ++j) kept += plan.node_keep[(i * 6 + t) * 20 + j];
      EXPECT_EQ(kept, 10.0);
    }
    EXPECT_EQ(kept_frames, 4.0);
  }
  EXPECT_THROW(MaskPlan::sample(1, 6, 20, 20, 2, rng), transg::ConfigError);
  EXPECT_THROW(MaskPlan::sample(1, 6, 20, 3, 6, rng), transg::ConfigError);
}

TEST(Stpr, StructurePromptMaskedMean) {
  // J=4, d=2, nodes 2 and 3 (0-based 1, 2) masked.
  const Tensor h = Tensor::from({1, 1, 4, 2}, {1, 0, 7, 7, -9, 4, 3, 2});
  auto plan = full_plan(1, 1, 4);
  plan.node_masks = 2;
  plan.node_keep = {1, 0, 0, 1};
  const Tensor s = structure_prompt(h, plan);
  EXPECT_EQ(s.at({0, 0, 0}), 2.0);
  EXPECT_EQ(s.at({0, 0, 1}), 1.0);
}

TEST(Stpr, TrajectoryPromptSingleFrame) {
  SeededRng rng(5);
  const Tensor h = random_tensor({1, 2, 3, 2}, rng, false);
  auto plan = full_plan(1, 2, 3);
  plan.trajectory_masks = 1;
  plan.trajectory_keep = {1, 0};
  const Tensor tp = trajectory_prompt(h, plan);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t o = 0; o < 2; ++o) EXPECT_EQ(tp.at({0, j, o}), h.at({0, 0, j, o}));
}

TEST(Stpr, TrajectoryPromptUnmaskedIsTemporalMean) {
  SeededRng rng(6);
  const Tensor h = random_tensor({2, 3, 2, 2}, rng, false);
  const Tensor tp = trajectory_prompt(h, full_plan(2, 3, 2));
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t o = 0; o < 2; ++o) {
        const double m = (h.at({b, 0, j, o}) + h.at({b, 1, j, o}) + h.at({b, 2, j, o})) / 3;
        EXPECT_NEAR(tp.at({b, j, o}), m, 1e-15);
      }
}

TEST(Stpr, PromptsIgnoreMaskedValues) {
  SeededRng rng(7);
  const auto plan = MaskPlan::sample(3, 4, 6, 2, 1, rng);
  const Tensor h = random_tensor({3, 4, 6, 5}, rng, false);
  std::vector<double> perturbed(h.data().begin(), h.data().end());
  std::vector<double> perturbed_t = perturbed;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t t = 0; t < 4; ++t)
      for (std::size_t j = 0; j < 6; ++j)
        for (std::size_t o = 0; o < 5; ++o) {
          const std::size_t k = ((i * 4 + t) * 6 + j) * 5 + o;
          if (plan.node_keep[(i * 4 + t) * 6 + j] == 0.0) perturbed[k] += 100.0 * (o + 1);
          if (plan.trajectory_keep[i * 4 + t] == 0.0) perturbed_t[k] -= 50.0;
        }
  const Tensor s0 = structure_prompt(h, plan);
  const Tensor s1 = structure_prompt(Tensor::from(h.shape(), perturbed), plan);
  const Tensor t0 = trajectory_prompt(h, plan);
  const Tensor t1 = trajectory_prompt(Tensor::from(h.shape(), perturbed_t), plan);
  for (std::size_t i = 0; i < s0.numel(); ++i) EXPECT_EQ(s0.data()[i], s1.data()[i]);
  for (std::size_t i = 0; i < t0.numel(); ++i) EXPECT_EQ(t0.data()[i], t1.data()[i]);
}

// A head whose output is a constant vector (zero weights, chosen bias).
Mlp constant_head(std::size_t in, std::size_t out, std::vector<double> bias) {
  SeededRng rng(0);
  Mlp m = Mlp::create(in, 2 * in, out, rng);
  for (double& w : m.output.weight.mutable_data()) w = 0.0;
  std::copy(bias.begin(), bias.end(), m.output.bias.mutable_data().begin());
  return m;
}

TEST(Stpr, StructureL1Example) {
  const Tensor h = Tensor::from({1, 1, 1, 2}, {0.4, -1});
  const Mlp head = constant_head(2, 3, {1, 2, 3});
  EXPECT_EQ(stpr_structure(h, full_plan(1, 1, 1), head, Tensor::zeros({1, 1, 1, 3})).item(), 6.0);
  EXPECT_EQ(stpr_structure(h, full_plan(1, 1, 1), head, Tensor::from({1, 1, 1, 3}, {1, 2, 3})).item(),
            0.0);
}

TEST(Stpr, TrajectoryIsZeroAtPerfectReconstructionAndPositiveOtherwise) {
  // f=2, J=2: the head predicts frames (1,2,3) and (4,5,6) for every node.
  SeededRng rng(8);
  const Tensor h = random_tensor({2, 2, 2, 3}, rng, false);
  const Mlp head = constant_head(3, 6, {1, 2, 3, 4, 5, 6});
  std::vector<double> gt;
  for (int b = 0; b < 2; ++b)
    for (double v : {1, 2, 3, 1, 2, 3, 4, 5, 6, 4, 5, 6}) gt.push_back(v);
  const auto plan = full_plan(2, 2, 2);
  EXPECT_EQ(stpr_trajectory(h, plan, head, Tensor::from({2, 2, 2, 3}, gt)).item(), 0.0);
  gt[0] += 0.5;
  EXPECT_NEAR(stpr_trajectory(h, plan, head, Tensor::from({2, 2, 2, 3}, gt)).item(), 0.25, 1e-15);
}

TEST(Stpr, ShapeErrors) {
  const Mlp head = constant_head(2, 3, {0, 0, 0});
  EXPECT_THROW(stpr_structure(Tensor::zeros({1, 1, 2, 2}), full_plan(1, 1, 1), head,
                              Tensor::zeros({1, 1, 1, 3})),
               transg::DimensionError);
}

TEST(TotalLoss, FusionExamples) {
  const Tensor g = Tensor::scalar(2), st = Tensor::scalar(4), tr = Tensor::scalar(8);
  EXPECT_DOUBLE_EQ(total_loss(g, st, tr, 0.5, 0.5).item(), 4.0);
  EXPECT_EQ(total_loss(g, st, tr, 0.5, 1.0).item(), 2.0);
  EXPECT_DOUBLE_EQ(total_loss(g, st, tr, 0.5, 0.0).item(), 6.0);
  EXPECT_DOUBLE_EQ(stpr_loss(st, tr, 0.25).item(), 7.0);
  EXPECT_DOUBLE_EQ(combine_losses(2, 4, 4, 8, 0.5, 0.5, 0.5), 0.5 * 3 + 0.5 * 6);
  EXPECT_THROW(total_loss(g, st, tr, 0.5, 2.0), transg::ConfigError);
  EXPECT_THROW(total_loss(g, st, tr, -1.0, 0.5), transg::ConfigError);
}

TEST(SelectRows, PicksRowsWithGradient) {
  SeededRng rng(9);
  const Tensor x = random_tensor({4, 2, 3}, rng);
  const std::vector<std::size_t> rows{3, 1};
  const Tensor y = select_rows(x, rows);
  ASSERT_EQ(y.shape(), (transg::numerics::Shape{2, 2, 3}));
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(y.data()[k], x.data()[18 + k]);
  ops::sum(y).backward();
  EXPECT_EQ(x.grad()[0], 0.0);
  EXPECT_EQ(x.grad()[6], 1.0);
  EXPECT_THROW(select_rows(x, std::vector<std::size_t>{4}), transg::DimensionError);
}

}  // namespace
