#include "transg/numerics/layers.hpp"

#include <cmath>

namespace transg::numerics {

Tensor init_weight(std::size_t out, std::size_t in, SeededRng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::vector<double> w(out * in);
  for (double& x : w) x = rng.uniform(-bound, bound);
  return Tensor::from({out, in}, std::move(w), true);
}

Linear Linear::create(std::size_t in, std::size_t out, bool with_bias, SeededRng& rng) {
  Linear l;
  l.weight = init_weight(out, in, rng);
  if (with_bias) l.bias = Tensor::zeros({out}, true);
  return l;
}

void Linear::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  out.push_back({prefix + ".weight", weight});
  if (bias.defined()) out.push_back({prefix + ".bias", bias});
}

Mlp Mlp::create(std::size_t in, std::size_t hidden, std::size_t out, SeededRng& rng) {
  Mlp m;
  m.hidden = Linear::create(in, hidden, true, rng);
  m.output = Linear::create(hidden, out, true, rng);
  return m;
}

void Mlp::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  hidden.collect(prefix + ".hidden", out);
  output.collect(prefix + ".output", out);
}

BatchNorm BatchNorm::create(std::size_t channels) {
  BatchNorm bn;
  bn.gamma = Tensor::full({channels}, 1.0, true);
  bn.beta = Tensor::zeros({channels}, true);
  bn.stats.running_mean.assign(channels, 0.0);
  bn.stats.running_var.assign(channels, 1.0);
  return bn;
}

void BatchNorm::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  out.push_back({prefix + ".gamma", gamma});
  out.push_back({prefix + ".beta", beta});
}

}  // namespace transg::numerics
