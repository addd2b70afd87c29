#include "transg/evalrank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>

#include "transg/error.hpp"
#include "transg/numerics/parallel.hpp"
#include "transg/sampler.hpp"

namespace transg::evalrank {

namespace {

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  if (metric == Metric::euclidean) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  return 1.0 - dot / std::max(std::sqrt(na) * std::sqrt(nb), 1e-12);
}

}  // namespace

RankingReport match(const RepMatrix& probe, const RepMatrix& gallery,
                    std::span<const int> probe_ids, std::span<const int> gallery_ids,
                    Metric metric) {
  if (gallery.rows == 0) throw ContractViolation("match: the gallery is empty");
  if (probe.rows == 0) throw ContractViolation("match: the probe set is empty");
  if (probe.cols != gallery.cols) {
    throw DimensionError("match: probe width " + std::to_string(probe.cols) +
                         " vs gallery width " + std::to_string(gallery.cols));
  }
  if (probe_ids.size() != probe.rows || gallery_ids.size() != gallery.rows) {
    throw DimensionError("match: identity lists do not match the representation counts");
  }

  const std::set<int> gallery_set(gallery_ids.begin(), gallery_ids.end());
  RankingReport report;
  report.probes.resize(probe.rows);
  numerics::parallel_for(probe.rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      ProbeRanking& pr = report.probes[p];
      pr.probe_index = p;
      pr.identity = probe_ids[p];
      pr.excluded = !gallery_set.count(pr.identity);
      pr.ranking.reserve(gallery.rows);
      for (std::size_t g = 0; g < gallery.rows; ++g) {
        pr.ranking.push_back(
            {g, distance(probe.row(p), gallery.row(g), metric), gallery_ids[g] == pr.identity});
      }
      std::stable_sort(pr.ranking.begin(), pr.ranking.end(),
                       [](const RankedMatch& a, const RankedMatch& b) {
                         return a.distance < b.distance;
                       });
      if (pr.excluded) continue;
      std::size_t hits = 0;
      double precision_sum = 0.0;
      for (std::size_t r = 0; r < pr.ranking.size(); ++r) {
        if (!pr.ranking[r].correct) continue;
        ++hits;
        if (hits == 1) pr.first_hit = r + 1;
        precision_sum += static_cast<double>(hits) / static_cast<double>(r + 1);
      }
      pr.average_precision = precision_sum / static_cast<double>(hits);
    }
  });

  for (const auto& pr : report.probes) {
    if (pr.excluded) {
      ++report.excluded;
      continue;
    }
    ++report.evaluated;
    report.rank1 += pr.first_hit <= 1 ? 1.0 : 0.0;
    report.rank5 += pr.first_hit <= 5 ? 1.0 : 0.0;
    report.rank10 += pr.first_hit <= 10 ? 1.0 : 0.0;
    report.mean_ap += pr.average_precision;
  }
  if (report.evaluated > 0) {
    const double n = static_cast<double>(report.evaluated);
    report.rank1 /= n;
    report.rank5 /= n;
    report.rank10 /= n;
    report.mean_ap /= n;
  }
  return report;
}

RepMatrix embed_split(sgt::EncoderState& state, const graphpe::SkeletonGraphSpec& graph,
                      const std::vector<skeledata::SkeletonSequence>& sequences,
                      std::size_t batch_size) {
  RepMatrix out;
  out.cols = state.config.d;
  if (sequences.empty()) return out;
  if (batch_size == 0) throw ConfigError("embedding batch size must be positive");
  for (const auto& s : sequences) {
    if (s.joints != state.joints) {
      throw SchemaError("sequence " + s.source_id + " has J=" + std::to_string(s.joints) +
                        " but the checkpoint was trained with J=" + std::to_string(state.joints));
    }
    if (s.frames != state.frames) {
      throw SchemaError("sequence " + s.source_id + " has f=" + std::to_string(s.frames) +
                        " but the checkpoint was trained with f=" + std::to_string(state.frames));
    }
  }
  numerics::NoGradGuard no_grad;
  out.rows = sequences.size();
  out.values.reserve(out.rows * out.cols);
  for (std::size_t begin = 0; begin < sequences.size(); begin += batch_size) {
    const std::size_t end = std::min(sequences.size(), begin + batch_size);
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    const auto batch = skeledata::make_batch(sequences, idx, {});
    const auto reps = sgt::encode(batch, graph, state, sgt::Mode::infer);
    auto v = reps.sequence_reps.data();
    out.values.insert(out.values.end(), v.begin(), v.end());
  }
  return out;
}

RepMatrix raw_features(const std::vector<skeledata::SkeletonSequence>& sequences) {
  RepMatrix out;
  out.rows = sequences.size();
  out.cols = sequences.empty() ? 0 : sequences[0].coords.size();
  for (const auto& s : sequences) {
    if (s.coords.size() != out.cols) throw DimensionError("raw_features: mixed sequence shapes");
    out.values.insert(out.values.end(), s.coords.begin(), s.coords.end());
  }
  return out;
}

std::vector<int> identities(const std::vector<skeledata::SkeletonSequence>& sequences) {
  std::vector<int> ids;
  ids.reserve(sequences.size());
  for (const auto& s : sequences) ids.push_back(s.identity);
  return ids;
}

void write_report_csv(const std::filesystem::path& path, const RankingReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "probes,excluded,mAP,R1,R5,R10\n";
  out << std::fixed << std::setprecision(4) << report.evaluated << ',' << report.excluded << ','
      << 100.0 * report.mean_ap << ',' << 100.0 * report.rank1 << ',' << 100.0 * report.rank5
      << ',' << 100.0 * report.rank10 << '\n';
}

void write_rankings_jsonl(const std::filesystem::path& path, const RankingReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& pr : report.probes) {
    nlohmann::json j;
    j["probe"] = pr.probe_index;
    j["id"] = pr.identity;
    j["excluded"] = pr.excluded;
    j["first_hit"] = pr.first_hit;
    j["ap"] = pr.average_precision;
    auto& ranking = j["ranking"] = nlohmann::json::array();
    for (const auto& m : pr.ranking) ranking.push_back({m.gallery_index, m.distance, m.correct});
    out << j.dump() << '\n';
  }
}

}  // namespace transg::evalrank
