#include <benchmark/benchmark.h>

#include <random>

#include "nafree/pingpong.hpp"

using namespace nafree;

namespace {

Laurent random_element(std::mt19937_64& rng, std::uint32_t q, std::int64_t lo, std::int64_t hi) {
  Laurent x(q);
  for (std::int64_t e = lo; e <= hi; ++e) x += Laurent::monomial(q, static_cast<std::int64_t>(rng() % q), e);
  return x;
}

Matrix random_sl3(std::mt19937_64& rng, std::uint32_t q, int steps) {
  Matrix m = Matrix::identity(q, 3);
  for (int s = 0; s < steps; ++s) {
    const std::size_t i = rng() % 3, j = (i + 1 + rng() % 2) % 3;
    m = mat_mul(m, Matrix::elementary(3, i, j, random_element(rng, q, -2, 0)));
  }
  return m;
}

}  // namespace

static void BM_LaurentMul(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = state.range(0);
  const Laurent x = random_element(rng, 2, -n / 2, n / 2), y = random_element(rng, 2, -n / 2, n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(x * y);
}
BENCHMARK(BM_LaurentMul)->Arg(8)->Arg(32)->Arg(128);

static void BM_LaurentInv(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Laurent x = Laurent::one(3) + random_element(rng, 3, 1, 16);
  for (auto _ : state) benchmark::DoNotOptimize(inv(x, state.range(0)));
}
BENCHMARK(BM_LaurentInv)->Arg(16)->Arg(64);

static void BM_Cartan(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const Matrix a = random_sl3(rng, 2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cartan_projection(a));
}
BENCHMARK(BM_Cartan)->Arg(4)->Arg(12);

static void BM_EigenFlags(benchmark::State& state) {
  const DiagPair pair = make_generators(2, 1, 1);
  const Matrix h = find_regular(Strategy::Synthetic, 0, pair);
  for (auto _ : state) benchmark::DoNotOptimize(eigen_flags(h));
}
BENCHMARK(BM_EigenFlags)->Unit(benchmark::kMicrosecond);

static void BM_BallChecks(benchmark::State& state) {
  const DiagPair pair = make_generators(2, 1, 1);
  const Matrix h = find_regular(Strategy::Synthetic, 0, pair);
  const Constants k = qi_constants(pair, h, 1);
  PingPongOptions opts;
  opts.threads = 1;
  const std::int64_t level = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(verify_pingpong(pair, h, level, 2, k, opts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ball_count(2, level)));
}
BENCHMARK(BM_BallChecks)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
