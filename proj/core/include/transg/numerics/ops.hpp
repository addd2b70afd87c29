#pragma once

#include <span>
#include <vector>

#include "transg/numerics/tensor.hpp"

// Differentiable primitives. Every op validates shapes and throws
// DimensionError quoting the offending shapes.
namespace transg::numerics::ops {

// Elementwise binary ops. `b` may equal `a`'s shape or any trailing suffix
// of it, in which case it is broadcast over the leading axes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

Tensor relu(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor abs(const Tensor& a);

// a[..., k] @ b[k, m] -> [..., m]
Tensor matmul(const Tensor& a, const Tensor& b);
// x[..., in] @ weight[out, in]^T + bias[out]; bias may be undefined.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias = {});
// Batched a[g, n, k] @ b[g, k, m], or @ b[g, m, k]^T with transpose_b.
Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b = false);

Tensor reshape(const Tensor& a, Shape shape);
Tensor permute(const Tensor& a, const std::vector<std::size_t>& order);
Tensor transpose2d(const Tensor& a);
Tensor concat_last(const std::vector<Tensor>& parts);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
// Sum of |a|.
Tensor abs_sum(const Tensor& a);
// Mean along `axis`; the axis is removed.
Tensor mean_axis(const Tensor& a, std::size_t axis);
// Weighted mean along `axis`. weights has shape a.shape[0..axis] inclusive and
// is broadcast over the trailing axes; out = sum_i w_i a_i / sum_i w_i. With a
// 0/1 mask this is the mean over unmasked positions, and masked positions
// receive exactly zero gradient.
Tensor masked_mean(const Tensor& a, std::size_t axis, std::span<const double> weights);

Tensor softmax_last(const Tensor& a);
Tensor log_softmax_last(const Tensor& a);
Tensor l2_normalize_last(const Tensor& a, double eps = 1e-12);
// a[n, c] -> [n] with out_i = a[i, index_i].
Tensor pick(const Tensor& a, std::span<const std::size_t> index);

struct BatchNormStats {
  std::vector<double> running_mean;
  std::vector<double> running_var;
};

// Batch normalization over every row of x[..., c] per channel. Training mode
// normalizes with batch statistics (biased variance) and folds them into
// `stats` with the given momentum (unbiased variance, as is conventional);
// inference mode uses `stats` unchanged.
Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  BatchNormStats& stats, bool training, double eps = 1e-5,
                  double momentum = 0.1);

}  // namespace transg::numerics::ops
