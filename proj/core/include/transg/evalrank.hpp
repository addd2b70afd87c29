#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "transg/graphpe.hpp"
#include "transg/sgt.hpp"
#include "transg/skeledata.hpp"

namespace transg::evalrank {

// Row-major representation matrix.
struct RepMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

enum class Metric { euclidean, cosine };

struct RankedMatch {
  std::size_t gallery_index;
  double distance;
  bool correct;
};

struct ProbeRanking {
  std::size_t probe_index = 0;
  int identity = 0;
  bool excluded = false;           // identity absent from the gallery
  std::vector<RankedMatch> ranking;  // ascending distance, ties by gallery index
  std::size_t first_hit = 0;       // 1-based rank of the first correct match
  double average_precision = 0.0;
};

struct RankingReport {
  std::vector<ProbeRanking> probes;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
  double rank1 = 0.0;  // fractions in [0, 1]
  double rank5 = 0.0;
  double rank10 = 0.0;
  double mean_ap = 0.0;
};

// Ranks the gallery for every probe by distance (ties broken by gallery
// index). Rank-k is the fraction of probes with a correct identity in the
// top k; AP averages precision@r over the ranks r of all correct matches.
// Probes whose identity is absent from the gallery are excluded and counted.
RankingReport match(const RepMatrix& probe, const RepMatrix& gallery,
                    std::span<const int> probe_ids, std::span<const int> gallery_ids,
                    Metric metric = Metric::euclidean);

// Raw sequence representations S (inference-mode normalization, no masks,
// no projection heads), encoded in chunks of batch_size.
RepMatrix embed_split(sgt::EncoderState& state, const graphpe::SkeletonGraphSpec& graph,
                      const std::vector<skeledata::SkeletonSequence>& sequences,
                      std::size_t batch_size = 64);

// Flattened f*J*3 coordinates, the representation of the no-training baseline.
RepMatrix raw_features(const std::vector<skeledata::SkeletonSequence>& sequences);

std::vector<int> identities(const std::vector<skeledata::SkeletonSequence>& sequences);

// Aggregates as one CSV row (percentages) under a fixed header.
void write_report_csv(const std::filesystem::path& path, const RankingReport& report);
// One JSON object per probe with its full ranking.
void write_rankings_jsonl(const std::filesystem::path& path, const RankingReport& report);

}  // namespace transg::evalrank
