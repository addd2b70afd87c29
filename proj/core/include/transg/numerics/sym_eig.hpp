#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace transg::numerics {

struct SymEigResult {
  std::size_t n = 0;
  // Ascending.
  std::vector<double> values;
  // Row-major n x n; column k is the unit eigenvector for values[k].
  std::vector<double> vectors;

  double vector(std::size_t row, std::size_t k) const { return vectors[row * n + k]; }
};

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Throws ContractViolation when |M - M^T| exceeds 1e-10 anywhere. Each
// eigenvector is sign-fixed so its largest-magnitude entry is positive (the
// first such entry on ties).
SymEigResult sym_eig(std::span<const double> matrix, std::size_t n);

}  // namespace transg::numerics
