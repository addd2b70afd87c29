#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace transg::trainer {

inline constexpr int kNoise = -1;

// Density-based clustering over Euclidean distance. Points are rows of a
// row-major n x d matrix. min_pts counts the point itself. Clusters are
// numbered 0, 1, ... in order of their lowest-index core point; a border
// point joins the first cluster that reaches it.
std::vector<int> dbscan(std::span<const double> points, std::size_t n, std::size_t d, double eps,
                        std::size_t min_pts);

// DBSCAN on L2-normalized copies of the representations.
std::vector<int> pseudo_label(std::span<const double> reps, std::size_t n, std::size_t d,
                              double eps, std::size_t min_pts);

}  // namespace transg::trainer
