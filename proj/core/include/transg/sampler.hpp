#pragma once

#include <cstddef>
#include <vector>

#include "transg/numerics/rng.hpp"
#include "transg/skeledata.hpp"

namespace transg::skeledata {

// B sequences stacked as B x f x J x 3.
struct Batch {
  std::size_t size = 0;
  std::size_t frames = 0;
  std::size_t joints = 0;
  std::vector<double> coords;
  std::vector<int> labels;
  std::vector<std::size_t> indices;  // positions in the pool
};

enum class SamplingMode { supervised, unsupervised };

Batch make_batch(const std::vector<SkeletonSequence>& pool,
                 const std::vector<std::size_t>& indices, const std::vector<int>& labels);

// Draws training batches from a pool. `labels` is parallel to the pool and
// may hold pseudo-labels; -1 marks a sequence with no usable label.
//
// Supervised mode draws P = min(batch_size / K, #labels) distinct labels
// uniformly and K sequences of each (distinct when the label has at least K,
// otherwise with replacement). Unsupervised mode draws min(batch_size, N)
// distinct sequences uniformly and ignores labels.
class BatchSampler {
 public:
  BatchSampler(const std::vector<SkeletonSequence>& pool, std::vector<int> labels,
               std::size_t instances_per_label = 4);

  Batch sample(std::size_t batch_size, SamplingMode mode, numerics::SeededRng& rng) const;
  std::size_t label_count() const { return groups_.size(); }

 private:
  const std::vector<SkeletonSequence>* pool_;
  std::vector<int> labels_;
  std::size_t instances_;
  std::vector<std::vector<std::size_t>> groups_;  // sorted by label
};

}  // namespace transg::skeledata
