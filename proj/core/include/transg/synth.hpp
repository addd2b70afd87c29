#pragma once

#include <vector>

#include "transg/numerics/rng.hpp"
#include "transg/skeledata.hpp"

namespace transg::skeledata {

struct SynthOptions {
  double noise_sigma = 0.01;   // meters
  double min_bone_scale = 0.85;
  double max_bone_scale = 1.15;
  double min_amplitude = 0.01;  // per-joint sway, meters
  double max_amplitude = 0.06;
  double min_period = 10.0;     // gait cycle, frames
  double max_period = 14.0;
};

// Per-identity body and gait parameters.
struct IdentityProfile {
  std::vector<double> bone_scale;       // one per topology edge
  std::vector<Point3> template_pose;    // rest pose with scaled bones, root at origin
  std::vector<Point3> amplitude;        // per joint, per axis
  std::vector<double> joint_phase;      // per joint
  double angular_frequency = 0.0;       // radians per frame
};

IdentityProfile make_identity_profile(const Topology& topology, const SynthOptions& options,
                                      numerics::SeededRng& rng);

// One f-frame sequence of `profile`, starting at gait phase `phase_offset`.
SkeletonSequence animate(const IdentityProfile& profile, std::size_t frames, double phase_offset,
                         double noise_sigma, numerics::SeededRng& rng);

// n_ids identities with labels 1..n_ids and seqs_per_id sequences each, grouped
// by identity. Each identity draws a profile; each sequence a uniform phase.
std::vector<SkeletonSequence> generate_synthetic(std::size_t n_ids, std::size_t seqs_per_id,
                                                 std::size_t frames, const Topology& topology,
                                                 numerics::SeededRng& rng,
                                                 const SynthOptions& options = {});

struct SyntheticSplitSizes {
  std::size_t train = 20;
  std::size_t probe = 5;
  std::size_t gallery = 5;
};

struct SyntheticRecordings {
  std::vector<SkeletonSequence> train;
  std::vector<SkeletonSequence> probe;
  std::vector<SkeletonSequence> gallery;
};

// Uncentered sequences for all three splits, as written to disk by the
// synth command. Identities are drawn in order; each draws its profile, then
// its train, probe and gallery sequences.
SyntheticRecordings generate_synthetic_recordings(std::size_t n_ids,
                                                  const SyntheticSplitSizes& sizes,
                                                  std::size_t frames, const Topology& topology,
                                                  numerics::SeededRng& rng,
                                                  const SynthOptions& options = {});

// Same identities across splits: every identity's profile generates its
// train, probe and gallery sequences. Root centering follows the topology root.
Dataset generate_synthetic_dataset(std::size_t n_ids, const SyntheticSplitSizes& sizes,
                                   std::size_t frames, const Topology& topology,
                                   numerics::SeededRng& rng, const SynthOptions& options = {});

}  // namespace transg::skeledata
