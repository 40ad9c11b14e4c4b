// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "tge/kernels.hpp"
#include "tge/models.hpp"
#include "tge/synth.hpp"

using namespace tge;

namespace {

CsrMatrix random_csr(std::size_t n, std::size_t per_row) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint32_t> col(0, std::uint32_t(n - 1));
  std::vector<Triplet> t;
  t.reserve(n * per_row);
  for (std::uint32_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < per_row; ++k) t.push_back({r, col(rng), 1.0});
  return csr_from_triplets(n, n, std::move(t));
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

template <auto Spmv>
void BM_spmv(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_csr(n, 16);
  const auto x = ones(n);
  std::vector<double> y(n);
  for (auto _ : state) {
    Spmv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * a.nnz()));
}

template <auto Project>
void BM_project_out(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t k = 64;
  std::vector<double> basis(n * k, 1.0 / static_cast<double>(n));
  auto y = ones(n);
  for (auto _ : state) {
    Project(basis, k, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <auto Eval>
void BM_logistic_eval(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  Matrix f(rows, 256);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (auto& v : f.data) v = g(rng);
  std::vector<std::uint8_t> labels(rows);
  for (std::size_t i = 0; i < rows; ++i) labels[i] = i % 2;
  const std::vector<double> w(256, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(Eval(f, labels, w, 0.0, 1.0));
}

GraphTimeSeries bench_series() {
  SyntheticConfig cfg;
  cfg.num_nodes = 400;
  cfg.volumes = std::vector<std::size_t>(8, 1000);
  return partition_tau(generate_synthetic(cfg), cfg.period_length);
}

template <auto Build>
void BM_build_wtrg(benchmark::State& state) {
  const auto series = bench_series();
  for (auto _ : state) benchmark::DoNotOptimize(Build(series, GraphModel::kWtrg, WtrgOptions{}));
}

}  // namespace

BENCHMARK(BM_spmv<serial::spmv>)->Name("spmv/serial")->Arg(1 << 14)->Arg(1 << 17);
BENCHMARK(BM_spmv<parallel::spmv>)->Name("spmv/parallel")->Arg(1 << 14)->Arg(1 << 17);
BENCHMARK(BM_project_out<serial::project_out>)->Name("project_out/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_project_out<parallel::project_out>)->Name("project_out/parallel")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_logistic_eval<serial::logistic_eval>)->Name("logistic_eval/serial")->Arg(1024)->Arg(16384);
BENCHMARK(BM_logistic_eval<parallel::logistic_eval>)->Name("logistic_eval/parallel")->Arg(1024)->Arg(16384);
BENCHMARK(BM_build_wtrg<serial::build_per_snapshot>)->Name("build_wtrg/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build_wtrg<parallel::build_per_snapshot>)->Name("build_wtrg/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
