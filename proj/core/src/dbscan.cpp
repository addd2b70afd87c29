#include "transg/dbscan.hpp"

#include <cmath>

#include "transg/error.hpp"

namespace transg::trainer {

std::vector<int> dbscan(std::span<const double> points, std::size_t n, std::size_t d, double eps,
                        std::size_t min_pts) {
  if (points.size() != n * d) throw DimensionError("dbscan: point matrix size mismatch");
  if (!(eps > 0.0)) throw ConfigError("dbscan eps must be positive");
  for (double v : points)
    if (!std::isfinite(v)) throw ContractViolation("dbscan: non-finite coordinate");

  const double eps2 = eps * eps;
  auto neighbors = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = points[i * d + k] - points[j * d + k];
        s += diff * diff;
      }
      if (s <= eps2) out.push_back(j);
    }
    return out;
  };

  constexpr int kUnvisited = -2;
  std::vector<int> label(n, kUnvisited);
  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    auto seeds = neighbors(i);
    if (seeds.size() < min_pts) {
      label[i] = kNoise;
      continue;
    }
    label[i] = cluster;
    for (std::size_t q = 0; q < seeds.size(); ++q) {
      const std::size_t p = seeds[q];
      if (label[p] == kNoise) label[p] = cluster;
      if (label[p] != kUnvisited) continue;
      label[p] = cluster;
      auto more = neighbors(p);
      if (more.size() >= min_pts) seeds.insert(seeds.end(), more.begin(), more.end());
    }
    ++cluster;
  }
  return label;
}

std::vector<int> pseudo_label(std::span<const double> reps, std::size_t n, std::size_t d,
                              double eps, std::size_t min_pts) {
  if (reps.size() != n * d) throw DimensionError("pseudo_label: rep matrix size mismatch");
  std::vector<double> unit(reps.begin(), reps.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += unit[i * d + k] * unit[i * d + k];
    const double norm = std::max(std::sqrt(s), 1e-12);
    for (std::size_t k = 0; k < d; ++k) unit[i * d + k] /= norm;
  }
  return dbscan(unit, n, d, eps, min_pts);
}

}  // namespace transg::trainer
