#include "transg/synth.hpp"

#include <cmath>
#include <numbers>
#include <queue>

#include "transg/error.hpp"

namespace transg::skeledata {

using numerics::SeededRng;

namespace {

// Rest pose for layouts without one: random bone directions of length 0.25 m
// from a fixed seed, so a topology always maps to the same template.
std::vector<Point3> fallback_rest_pose(const Topology& topo) {
  SeededRng fixed(0x5eed);
  std::vector<std::vector<std::size_t>> adj(topo.joints);
  for (auto [a, b] : topo.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<Point3> pose(topo.joints, Point3{0, 0, 0});
  std::vector<bool> placed(topo.joints, false);
  for (std::size_t start = 0; start < topo.joints; ++start) {
    const std::size_t s = start == 0 ? topo.root : start;
    if (placed[s]) continue;
    placed[s] = true;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t v : adj[u]) {
        if (placed[v]) continue;
        placed[v] = true;
        Point3 dir{fixed.normal(), fixed.normal(), fixed.normal()};
        const double n = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
        for (int a = 0; a < 3; ++a) pose[v][a] = pose[u][a] + 0.25 * dir[a] / n;
        q.push(v);
      }
    }
  }
  return pose;
}

}  // namespace

IdentityProfile make_identity_profile(const Topology& topo, const SynthOptions& opt,
                                      SeededRng& rng) {
  const std::vector<Point3> rest =
      topo.rest_pose.size() == topo.joints ? topo.rest_pose : fallback_rest_pose(topo);

  IdentityProfile p;
  p.bone_scale.resize(topo.edges.size());
  for (double& s : p.bone_scale) s = rng.uniform(opt.min_bone_scale, opt.max_bone_scale);

  // Scaled forward kinematics outward from the root; joints in other
  // components keep their rest position as anchor.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(topo.joints);
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    auto [a, b] = topo.edges[e];
    adj[a].push_back({b, e});
    adj[b].push_back({a, e});
  }
  p.template_pose.assign(topo.joints, Point3{0, 0, 0});
  std::vector<bool> placed(topo.joints, false);
  for (std::size_t start = 0; start < topo.joints; ++start) {
    const std::size_t s = start == 0 ? topo.root : start;
    if (placed[s]) continue;
    placed[s] = true;
    if (s != topo.root) {
      for (int a = 0; a < 3; ++a) p.template_pose[s][a] = rest[s][a] - rest[topo.root][a];
    }
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (auto [v, e] : adj[u]) {
        if (placed[v]) continue;
        placed[v] = true;
        for (int a = 0; a < 3; ++a) {
          p.template_pose[v][a] =
              p.template_pose[u][a] + p.bone_scale[e] * (rest[v][a] - rest[u][a]);
        }
        q.push(v);
      }
    }
  }

  p.amplitude.resize(topo.joints);
  p.joint_phase.resize(topo.joints);
  for (std::size_t j = 0; j < topo.joints; ++j) {
    for (double& a : p.amplitude[j]) a = rng.uniform(opt.min_amplitude, opt.max_amplitude);
    p.joint_phase[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  p.angular_frequency = 2.0 * std::numbers::pi / rng.uniform(opt.min_period, opt.max_period);
  return p;
}

SkeletonSequence animate(const IdentityProfile& p, std::size_t frames, double phase_offset,
                         double noise_sigma, SeededRng& rng) {
  SkeletonSequence s;
  s.frames = frames;
  s.joints = p.template_pose.size();
  s.coords.resize(frames * s.joints * 3);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t j = 0; j < s.joints; ++j) {
      const double wave =
          std::sin(p.angular_frequency * static_cast<double>(t) + p.joint_phase[j] + phase_offset);
      for (std::size_t a = 0; a < 3; ++a) {
        double v = p.template_pose[j][a] + p.amplitude[j][a] * wave;
        if (noise_sigma > 0.0) v += rng.normal(0.0, noise_sigma);
        s.coords[(t * s.joints + j) * 3 + a] = v;
      }
    }
  return s;
}

namespace {

SkeletonSequence draw_sequence(const IdentityProfile& p, std::size_t frames, int id,
                               const std::string& tag, std::size_t k, const SynthOptions& opt,
                               SeededRng& rng) {
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  SkeletonSequence s = animate(p, frames, phase, opt.noise_sigma, rng);
  s.identity = id;
  s.source_id = "synth:" + tag + ":" + std::to_string(id) + ":" + std::to_string(k);
  return s;
}

}  // namespace

std::vector<SkeletonSequence> generate_synthetic(std::size_t n_ids, std::size_t seqs_per_id,
                                                 std::size_t frames, const Topology& topology,
                                                 SeededRng& rng, const SynthOptions& options) {
  SyntheticSplitSizes sizes{seqs_per_id, 0, 0};
  return generate_synthetic_recordings(n_ids, sizes, frames, topology, rng, options).train;
}

SyntheticRecordings generate_synthetic_recordings(std::size_t n_ids,
                                                  const SyntheticSplitSizes& sizes,
                                                  std::size_t frames, const Topology& topology,
                                                  SeededRng& rng, const SynthOptions& options) {
  if (n_ids < 2) {
    throw ConfigError("synthetic data needs at least 2 identities, got " + std::to_string(n_ids));
  }
  if (frames == 0) throw ConfigError("synthetic sequences need at least one frame");
  validate_edges(topology.joints, topology.edges);
  SyntheticRecordings out;
  for (std::size_t i = 0; i < n_ids; ++i) {
    const int id = static_cast<int>(i) + 1;
    const IdentityProfile profile = make_identity_profile(topology, options, rng);
    for (std::size_t k = 0; k < sizes.train; ++k)
      out.train.push_back(draw_sequence(profile, frames, id, "train", k, options, rng));
    for (std::size_t k = 0; k < sizes.probe; ++k)
      out.probe.push_back(draw_sequence(profile, frames, id, "probe", k, options, rng));
    for (std::size_t k = 0; k < sizes.gallery; ++k)
      out.gallery.push_back(draw_sequence(profile, frames, id, "gallery", k, options, rng));
  }
  return out;
}

Dataset generate_synthetic_dataset(std::size_t n_ids, const SyntheticSplitSizes& sizes,
                                   std::size_t frames, const Topology& topology, SeededRng& rng,
                                   const SynthOptions& options) {
  auto rec = generate_synthetic_recordings(n_ids, sizes, frames, topology, rng, options);
  Dataset ds;
  ds.manifest.name = "synthetic-" + topology.name;
  ds.manifest.joints = topology.joints;
  ds.manifest.frames = frames;
  ds.manifest.edges = topology.edges;
  ds.manifest.root_joint = topology.root;
  prepare_split(ds.train, rec.train, ds.manifest, ds.dropped_short_recordings);
  prepare_split(ds.probe, rec.probe, ds.manifest, ds.dropped_short_recordings);
  prepare_split(ds.gallery, rec.gallery, ds.manifest, ds.dropped_short_recordings);
  return ds;
}

}  // namespace transg::skeledata
