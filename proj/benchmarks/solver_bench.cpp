#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "landuse/learn.hpp"

using namespace landuse;

namespace {

struct Data {
  learn::SparseMatrix x;
  std::vector<std::string> labels;
};

// Sparse non-negative activations with a class-specific block of dims.
Data make_data(std::size_t n, std::uint32_t dim, std::size_t classes, double density) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Data d{learn::SparseMatrix(dim), {}};
  std::vector<float> row(dim);
  const std::size_t block = dim / (classes * 4);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;
    for (auto& v : row) v = u(rng) < density ? u(rng) : 0.0f;
    for (std::size_t k = c * block; k < (c + 1) * block; ++k) row[k] = std::min(1.0f, row[k] + 0.5f * u(rng));
    d.x.add_row(row);
    d.labels.push_back("c" + std::to_string(c));
  }
  return d;
}

void BM_TrainBinary(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = make_data(n, 1024, 2, 0.25);
  std::vector<std::int8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = d.labels[i] == "c0" ? 1 : -1;
  const learn::BinaryProblem p{&d.x, y, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(learn::train_binary(p));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_TrainBinary)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_TrainOvr(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto threads = static_cast<unsigned>(state.range(1));
  const auto d = make_data(n, 4096, 8, 0.25);
  learn::OvrOptions opt;
  opt.threads = threads;
  for (auto _ : state)
    benchmark::DoNotOptimize(learn::train_ovr(d.x, d.labels, features::Scaler::identity(4096), opt));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_TrainOvr)->Args({2000, 1})->Args({2000, 4})->Unit(benchmark::kMillisecond);

void BM_PredictScaled(benchmark::State& state) {
  const auto d = make_data(2000, 4096, 8, 0.25);
  const auto m = learn::train_ovr(d.x, d.labels, features::Scaler::identity(4096), {});
  std::size_t r = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(learn::predict_scaled(m, d.x, r));
    r = (r + 1) % d.x.rows();
  }
}
BENCHMARK(BM_PredictScaled);

}  // namespace
