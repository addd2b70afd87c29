#pragma once

#include <string>
#include <vector>

#include "transg/numerics/tensor.hpp"

namespace transg::numerics {

struct AdamOptions {
  double lr = 3.5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Bias-corrected Adam over a fixed, ordered parameter list.
class Adam {
 public:
  Adam(std::vector<NamedTensor> params, AdamOptions options = {});

  // One update from the accumulated grads. Grads are left in place; call
  // zero_grad() before the next accumulation.
  void step();
  void zero_grad();

  long steps() const { return t_; }
  const AdamOptions& options() const { return options_; }
  const std::vector<NamedTensor>& params() const { return params_; }

  // Moment buffers, parallel to params().
  std::vector<std::vector<double>>& first_moments() { return m_; }
  std::vector<std::vector<double>>& second_moments() { return v_; }
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }
  void set_steps(long t) { t_ = t; }

 private:
  std::vector<NamedTensor> params_;
  AdamOptions options_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  long t_ = 0;
};

}  // namespace transg::numerics
