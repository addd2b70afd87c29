#include "transg/sampler.hpp"

#include <algorithm>
#include <map>

#include "transg/error.hpp"

namespace transg::skeledata {

Batch make_batch(const std::vector<SkeletonSequence>& pool,
                 const std::vector<std::size_t>& indices, const std::vector<int>& labels) {
  if (indices.empty()) throw SamplingError("empty batch");
  Batch b;
  b.size = indices.size();
  b.frames = pool[indices[0]].frames;
  b.joints = pool[indices[0]].joints;
  b.coords.reserve(b.size * b.frames * b.joints * 3);
  for (std::size_t i : indices) {
    const auto& s = pool.at(i);
    if (s.frames != b.frames || s.joints != b.joints) {
      throw DimensionError("batch mixes sequence shapes (" + std::to_string(s.frames) + "x" +
                           std::to_string(s.joints) + " vs " + std::to_string(b.frames) + "x" +
                           std::to_string(b.joints) + ")");
    }
    b.coords.insert(b.coords.end(), s.coords.begin(), s.coords.end());
    b.labels.push_back(labels.empty() ? s.identity : labels.at(i));
  }
  b.indices = indices;
  return b;
}

BatchSampler::BatchSampler(const std::vector<SkeletonSequence>& pool, std::vector<int> labels,
                           std::size_t instances_per_label)
    : pool_(&pool), labels_(std::move(labels)), instances_(instances_per_label) {
  if (pool.empty()) throw SamplingError("cannot sample from an empty pool");
  if (labels_.size() != pool.size()) {
    throw SamplingError("label list does not match the pool size");
  }
  if (instances_ == 0) throw ConfigError("instances per label must be positive");
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] >= 0) by_label[labels_[i]].push_back(i);
  for (auto& [_, members] : by_label) groups_.push_back(std::move(members));
}

Batch BatchSampler::sample(std::size_t batch_size, SamplingMode mode,
                           numerics::SeededRng& rng) const {
  if (batch_size == 0) throw SamplingError("batch size must be positive");
  std::vector<std::size_t> picked;
  if (mode == SamplingMode::unsupervised) {
    picked = rng.sample_without_replacement(pool_->size(), std::min(batch_size, pool_->size()));
    return make_batch(*pool_, picked, labels_);
  }
  if (groups_.size() < 2) {
    throw SamplingError("supervised sampling needs at least 2 labels, found " +
                        std::to_string(groups_.size()));
  }
  const std::size_t labels_per_batch = std::min(batch_size / instances_, groups_.size());
  if (labels_per_batch < 2) {
    throw SamplingError("batch size " + std::to_string(batch_size) + " with " +
                        std::to_string(instances_) + " instances per label holds fewer than 2 labels");
  }
  auto chosen = rng.sample_without_replacement(groups_.size(), labels_per_batch);
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t g : chosen) {
    const auto& members = groups_[g];
    if (members.size() >= instances_) {
      for (std::size_t k : rng.sample_without_replacement(members.size(), instances_))
        picked.push_back(members[k]);
    } else {
      for (std::size_t k = 0; k < instances_; ++k)
        picked.push_back(members[rng.uniform_index(members.size())]);
    }
  }
  return make_batch(*pool_, picked, labels_);
}

}  // namespace transg::skeledata
