#pragma once

#include <cstddef>
#include <vector>

#include "transg/numerics/tensor.hpp"
#include "transg/skeledata.hpp"

namespace transg::graphpe {

// Eigenvalues at or below this are treated as trivial (one per component).
inline constexpr double kTrivialEigenvalueTolerance = 1e-8;

struct SkeletonGraphSpec {
  std::size_t joints = 0;
  std::vector<skeledata::Edge> edges;
  std::vector<double> adjacency;  // J x J, 0/1, symmetric
  std::vector<double> degree;     // diagonal of D
  std::vector<double> laplacian;  // I - D^-1/2 A D^-1/2
  std::vector<double> spectrum;   // all Laplacian eigenvalues, ascending

  std::size_t pe_dim = 0;
  std::vector<double> pe;          // J x K, row i = positional encoding of node i
  std::vector<double> pe_eigenvalues;

  std::size_t trivial_count() const;
  // J x K tensor (J x 0 when K = 0).
  numerics::Tensor pe_tensor() const;
};

// Throws ConfigError for invalid edges or any isolated node.
SkeletonGraphSpec build_graph(std::size_t joints, const std::vector<skeledata::Edge>& edges);

// Keeps the K eigenvectors with the smallest eigenvalues above the trivial
// tolerance, sign-fixed. Throws ConfigError listing the spectrum when fewer
// than K exist.
SkeletonGraphSpec compute_pe(SkeletonGraphSpec graph, std::size_t k);

}  // namespace transg::graphpe
