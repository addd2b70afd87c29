#include <benchmark/benchmark.h>

#include "transg/synth.hpp"
#include "transg/trainer.hpp"

namespace {

using namespace transg;

skeledata::Dataset& desk_data() {
  static skeledata::Dataset ds = [] {
    numerics::SeededRng rng(1);
    return skeledata::generate_synthetic_dataset(10, {20, 5, 5}, 6,
                                                 skeledata::builtin_topology("kinect20"), rng);
  }();
  return ds;
}

trainer::TrainConfig desk_config() {
  trainer::TrainConfig c;
  c.model.d = 64;
  c.model.heads = 8;
  c.model.head_dim = 8;
  c.eval_every = 0;
  return c;
}

// One optimizer step of the full objective on a 40-sequence batch.
void BM_TrainStep(benchmark::State& state) {
  auto cfg = desk_config();
  cfg.mode = static_cast<trainer::TrainMode>(state.range(0));
  trainer::Trainer t(cfg, desk_data());
  for (auto _ : state) benchmark::DoNotOptimize(t.step());
  state.SetLabel(trainer::mode_name(cfg.mode));
}
BENCHMARK(BM_TrainStep)
    ->Arg(static_cast<int>(trainer::TrainMode::sgt_gpc))
    ->Arg(static_cast<int>(trainer::TrainMode::sgt_gpc_stpr))
    ->Unit(benchmark::kMillisecond);

void BM_EmbedGallery(benchmark::State& state) {
  trainer::Trainer t(desk_config(), desk_data());
  for (auto _ : state)
    benchmark::DoNotOptimize(evalrank::embed_split(t.state(), t.graph(), desk_data().gallery));
  state.SetItemsProcessed(state.iterations() * int64_t(desk_data().gallery.size()));
}
BENCHMARK(BM_EmbedGallery)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
