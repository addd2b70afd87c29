#include "transg/graphpe.hpp"

#include <cmath>
#include <sstream>

#include "transg/error.hpp"
#include "transg/numerics/sym_eig.hpp"

namespace transg::graphpe {

std::size_t SkeletonGraphSpec::trivial_count() const {
  std::size_t n = 0;
  for (double v : spectrum)
    if (v < kTrivialEigenvalueTolerance) ++n;
  return n;
}

numerics::Tensor SkeletonGraphSpec::pe_tensor() const {
  return numerics::Tensor::from({joints, pe_dim}, pe);
}

SkeletonGraphSpec build_graph(std::size_t joints, const std::vector<skeledata::Edge>& edges) {
  if (joints == 0) throw ConfigError("skeleton graph needs at least one joint");
  skeledata::validate_edges(joints, edges);
  SkeletonGraphSpec g;
  g.joints = joints;
  g.edges = edges;
  g.adjacency.assign(joints * joints, 0.0);
  for (auto [a, b] : edges) g.adjacency[a * joints + b] = g.adjacency[b * joints + a] = 1.0;
  g.degree.assign(joints, 0.0);
  for (std::size_t i = 0; i < joints; ++i)
    for (std::size_t j = 0; j < joints; ++j) g.degree[i] += g.adjacency[i * joints + j];
  for (std::size_t i = 0; i < joints; ++i) {
    if (g.degree[i] == 0.0) {
      throw ConfigError("joint " + std::to_string(i) +
                        " is isolated; D^-1/2 is undefined for degree-0 nodes");
    }
  }
  g.laplacian.assign(joints * joints, 0.0);
  for (std::size_t i = 0; i < joints; ++i)
    for (std::size_t j = 0; j < joints; ++j) {
      const double norm_adj =
          g.adjacency[i * joints + j] / std::sqrt(g.degree[i] * g.degree[j]);
      g.laplacian[i * joints + j] = (i == j ? 1.0 : 0.0) - norm_adj;
    }
  g.spectrum = numerics::sym_eig(g.laplacian, joints).values;
  return g;
}

SkeletonGraphSpec compute_pe(SkeletonGraphSpec g, std::size_t k) {
  const auto eig = numerics::sym_eig(g.laplacian, g.joints);
  g.spectrum = eig.values;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < g.joints && keep.size() < k; ++c)
    if (eig.values[c] > kTrivialEigenvalueTolerance) keep.push_back(c);
  if (keep.size() < k) {
    std::ostringstream os;
    os << "positional encoding K=" << k << " exceeds the " << (g.joints - g.trivial_count())
       << " non-trivial Laplacian eigenvalues; spectrum = [";
    for (std::size_t i = 0; i < eig.values.size(); ++i) os << (i ? ", " : "") << eig.values[i];
    os << "]";
    throw ConfigError(os.str());
  }
  g.pe_dim = k;
  g.pe.assign(g.joints * k, 0.0);
  g.pe_eigenvalues.clear();
  for (std::size_t c = 0; c < k; ++c) {
    g.pe_eigenvalues.push_back(eig.values[keep[c]]);
    for (std::size_t i = 0; i < g.joints; ++i) g.pe[i * k + c] = eig.vector(i, keep[c]);
  }
  return g;
}

}  // namespace transg::graphpe
