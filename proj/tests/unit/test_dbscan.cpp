#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <set>

#include "transg/dbscan.hpp"
#include "transg/numerics/rng.hpp"

namespace {

using transg::numerics::SeededRng;
using transg::trainer::dbscan;
using transg::trainer::kNoise;

// Set-based reference: clusters are the connected components of core points
// under the eps-neighborhood relation; border points join the cluster of the
// lowest-index core point whose lowest-index core member is smallest among
// reachable clusters. Output is canonicalized by first core point order.
std::vector<int> reference_dbscan(const std::vector<double>& p, std::size_t n, std::size_t d,
                                  double eps, std::size_t min_pts) {
  auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0;
    for (std::size_t k = 0; k < d; ++k) s += (p[a * d + k] - p[b * d + k]) * (p[a * d + k] - p[b * d + k]);
    return std::sqrt(s);
  };
  std::vector<std::vector<bool>> near(n, std::vector<bool>(n));
  std::vector<bool> core(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t count = 0;
    for (std::size_t b = 0; b < n; ++b) count += near[a][b] = dist(a, b) <= eps;
    core[a] = count >= min_pts;
  }
  // Union-find over core points.
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = root(parent[i]);
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (core[a] && core[b] && near[a][b]) {
        const std::size_t ra = root(a), rb = root(b);
        parent[std::max(ra, rb)] = std::min(ra, rb);
      }
  // Root is the lowest-index core member, so cluster order is root order.
  std::vector<int> id(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (core[i] && root(i) == i) id[i] = next++;
  std::vector<int> labels(n, kNoise);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      labels[i] = id[root(i)];
      continue;
    }
    int best = kNoise;
    for (std::size_t c = 0; c < n; ++c)
      if (core[c] && near[i][c]) {
        const int cid = id[root(c)];
        if (best == kNoise || cid < best) best = cid;
      }
    labels[i] = best;
  }
  return labels;
}

// Two labelings agree on core points exactly; border points must be assigned
// to a cluster containing a core neighbor (assignment among several is
// order-dependent in DBSCAN).
void expect_equivalent(const std::vector<int>& got, const std::vector<int>& want,
                       const std::vector<double>& p, std::size_t d, double eps,
                       std::size_t min_pts) {
  const std::size_t n = want.size();
  ASSERT_EQ(got.size(), n);
  auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0;
    for (std::size_t k = 0; k < d; ++k) s += (p[a * d + k] - p[b * d + k]) * (p[a * d + k] - p[b * d + k]);
    return std::sqrt(s);
  };
  std::vector<bool> core(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t c = 0;
    for (std::size_t b = 0; b < n; ++b) c += dist(a, b) <= eps;
    core[a] = c >= min_pts;
  }
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_EQ(got[i] == kNoise, want[i] == kNoise) << "point " << i;
    if (core[i]) {
      EXPECT_EQ(got[i], want[i]) << "core point " << i;
    } else if (got[i] != kNoise) {
      bool reachable = false;
      for (std::size_t c = 0; c < n; ++c)
        reachable |= core[c] && dist(i, c) <= eps && got[c] == got[i];
      EXPECT_TRUE(reachable) << "border point " << i;
    }
  }
}

TEST(Dbscan, MatchesReferenceOnRandomFixtures) {
  for (int fixture = 0; fixture < 10; ++fixture) {
    SeededRng rng(100 + fixture);
    const std::size_t n = 20 + rng.uniform_index(60);
    const std::size_t d = 1 + rng.uniform_index(3);
    std::vector<double> p(n * d);
    for (double& v : p) v = rng.uniform(0.0, 4.0);
    const double eps = rng.uniform(0.3, 1.0);
    const std::size_t min_pts = 1 + rng.uniform_index(5);
    const auto want = reference_dbscan(p, n, d, eps, min_pts);
    expect_equivalent(dbscan(p, n, d, eps, min_pts), want, p, d, eps, min_pts);
  }
}

TEST(Dbscan, TwoSeparatedBlobs) {
  SeededRng rng(1);
  std::vector<double> p;
  for (int blob = 0; blob < 2; ++blob)
    for (int i = 0; i < 15; ++i) {
      p.push_back(blob * 10.0 + rng.uniform(-0.2, 0.2));
      p.push_back(rng.uniform(-0.2, 0.2));
    }
  const auto labels = dbscan(p, 30, 2, 1.0, 3);
  std::set<int> first(labels.begin(), labels.begin() + 15), second(labels.begin() + 15, labels.end());
  EXPECT_EQ(first, std::set<int>{0});
  EXPECT_EQ(second, std::set<int>{1});
}

TEST(Dbscan, MinPtsAboveCountIsAllNoise) {
  const std::vector<double> p{0, 0.1, 0.2};
  for (int l : dbscan(p, 3, 1, 1.0, 4)) EXPECT_EQ(l, kNoise);
}

TEST(Dbscan, SinglePoint) {
  const std::vector<double> p{1.5, -2};
  EXPECT_EQ(dbscan(p, 1, 2, 0.1, 1), std::vector<int>{0});
}

TEST(PseudoLabel, UsesDirectionOnly) {
  // Same directions at different scales cluster together after normalization.
  const std::vector<double> reps{1, 0, 5, 0, 0, 1, 0, 7};
  const auto labels = transg::trainer::pseudo_label(reps, 4, 2, 0.1, 2);
  EXPECT_EQ(labels, (std::vector<int>{0, 0, 1, 1}));
}

}  // namespace
