#include <benchmark/benchmark.h>

#include "transg/numerics/ops.hpp"
#include "transg/numerics/rng.hpp"
#include "transg/numerics/sym_eig.hpp"

namespace {

using transg::numerics::SeededRng;
using transg::numerics::Tensor;
namespace ops = transg::numerics::ops;

Tensor random(transg::numerics::Shape shape, SeededRng& rng, bool grad = false) {
  std::vector<double> v(transg::numerics::shape_numel(shape));
  for (double& x : v) x = rng.normal();
  return Tensor::from(std::move(shape), std::move(v), grad);
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SeededRng rng(1);
  const Tensor a = random({n, n}, rng), b = random({n, n}, rng);
  transg::numerics::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(ops::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * int64_t(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(16)->Arg(64)->Arg(256);

// Token-wise projection as used by attention: [B*f*J, d] x [d, d]^T.
void BM_LinearForwardBackward(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  SeededRng rng(2);
  const Tensor x = random({rows, 64}, rng, true);
  const Tensor w = random({64, 64}, rng, true);
  for (auto _ : state) {
    ops::sum(ops::linear(x, w)).backward();
  }
  state.SetItemsProcessed(state.iterations() * int64_t(rows));
}
BENCHMARK(BM_LinearForwardBackward)->Arg(240)->Arg(4800);

void BM_SoftmaxAttention(benchmark::State& state) {
  SeededRng rng(3);
  const Tensor q = random({240 * 8, 20, 8}, rng), k = random({240 * 8, 20, 8}, rng);
  transg::numerics::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(ops::softmax_last(ops::bmm(q, k, true)));
}
BENCHMARK(BM_SoftmaxAttention);

void BM_SymEig(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SeededRng rng(4);
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) m[i * n + j] = m[j * n + i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(transg::numerics::sym_eig(m, n));
}
BENCHMARK(BM_SymEig)->Arg(20)->Arg(25);

}  // namespace
