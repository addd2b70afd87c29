#pragma once

#include <string>
#include <vector>

#include "transg/numerics/adam.hpp"
#include "transg/numerics/ops.hpp"
#include "transg/numerics/rng.hpp"
#include "transg/numerics/tensor.hpp"

namespace transg::numerics {

// Weight matrix [out, in] drawn from uniform(-1/sqrt(in), 1/sqrt(in)).
Tensor init_weight(std::size_t out, std::size_t in, SeededRng& rng);

struct Linear {
  Tensor weight;  // [out, in]
  Tensor bias;    // [out], may be undefined

  static Linear create(std::size_t in, std::size_t out, bool with_bias, SeededRng& rng);
  Tensor operator()(const Tensor& x) const { return ops::linear(x, weight, bias); }
  std::size_t in_features() const { return weight.dim(1); }
  std::size_t out_features() const { return weight.dim(0); }
  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

// in -> hidden -> out with a ReLU between the two affine maps.
struct Mlp {
  Linear hidden;
  Linear output;

  static Mlp create(std::size_t in, std::size_t hidden, std::size_t out, SeededRng& rng);
  Tensor operator()(const Tensor& x) const { return output(ops::relu(hidden(x))); }
  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

struct BatchNorm {
  Tensor gamma;
  Tensor beta;
  ops::BatchNormStats stats;
  double eps = 1e-5;
  double momentum = 0.1;

  static BatchNorm create(std::size_t channels);
  Tensor operator()(const Tensor& x, bool training) {
    return ops::batch_norm(x, gamma, beta, stats, training, eps, momentum);
  }
  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

}  // namespace transg::numerics
