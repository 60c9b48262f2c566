#include <benchmark/benchmark.h>

#include <random>

#include "stol/datagen.hpp"
#include "stol/inference.hpp"
#include "stol/qp.hpp"
#include "stol/trainer.hpp"

using namespace stol;

namespace {

Vector random_weights(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector w(n);
  for (double& v : w) v = u(rng);
  return w;
}

Sequence random_input(std::size_t T, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Sequence x(T, Vector(d));
  for (auto& row : x)
    for (double& v : row) v = n(rng);
  return x;
}

void BM_Decode(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  const auto K = static_cast<std::size_t>(state.range(1));
  const ChainFeatureMap map(8, K);
  const Vector w = random_weights(map.dim(), 1);
  const Sequence x = random_input(T, 8, 2);
  for (auto _ : state) benchmark::DoNotOptimize(decode(w, map, x));
}
BENCHMARK(BM_Decode)->ArgsProduct({{16, 128, 1024}, {3, 10}});

void BM_LossAugmentedDecode(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  const ChainFeatureMap map(8, 5);
  const Vector w = random_weights(map.dim(), 3);
  const Sequence x = random_input(T, 8, 4);
  const Labels y(T, 1);
  for (auto _ : state) benchmark::DoNotOptimize(loss_augmented_decode(w, map, x, y));
}
BENCHMARK(BM_LossAugmentedDecode)->Arg(16)->Arg(128)->Arg(1024);

void BM_SolveDual(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  // Gram matrix of random vectors plus a positive offset vector.
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back(random_weights(20, 10 + i));
  Matrix H(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) H(i, j) = dot(rows[i], rows[j]);
  Vector b = random_weights(n, 5);
  for (double& v : b) v = 1.0 + v;
  for (auto _ : state) benchmark::DoNotOptimize(solve_dual(H, b, 100.0));
}
BENCHMARK(BM_SolveDual)->Arg(8)->Arg(32)->Arg(128);

void BM_Adapt(benchmark::State& state) {
  const DomainParams src = DomainParams::defaults();
  const DomainParams tgt = shift(src, kDefaultShiftDegrees, kDefaultShiftTranslation);
  const SourceResult source = train_source(generate(src, 200, 1), TrainConfig{});
  const MaskedDataset target = mask_labels(
      generate(tgt, 240, 2, DomainTag::target), static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(adapt(source.model, target.data, TrainConfig{}));
}
BENCHMARK(BM_Adapt)->Arg(10)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
