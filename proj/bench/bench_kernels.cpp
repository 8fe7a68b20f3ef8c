#include "scgl/kernels.hpp"
#include "scgl/kron_operator.hpp"
#include "scgl/datagen.hpp"
#include "scgl/rng.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

#include <map>

using namespace scgl;

namespace {

struct Inputs {
  EdgeIndexMap map;
  Eigen::VectorXd w;
  Eigen::MatrixXd lap;
  Eigen::MatrixXd dense;
  NodeBases bases;

  Inputs(Index v, Index n) : map(v) {
    Rng rng(7);
    w = Eigen::VectorXd::Zero(map.size());
    for (Index k = 0; k < w.size(); ++k)
      if (rng.uniform() < 0.2) w(k) = rng.uniform(0.2, 3.0);
    lap = combinatorial_laplacian(w, v);
    dense.resize(v * n, v * n);
    for (Index c = 0; c < dense.cols(); ++c)
      for (Index r = 0; r < dense.rows(); ++r) dense(r, c) = rng.normal();
    dense = 0.5 * (dense + dense.transpose());
    std::vector<Eigen::MatrixXd> blocks;
    for (Index i = 0; i < v; ++i) blocks.push_back(random_rotation(n, rng));
    bases = NodeBases(std::move(blocks));
  }
};

const Inputs& inputs(Index v, Index n) {
  static std::map<std::pair<Index, Index>, Inputs> cache;
  auto it = cache.find({v, n});
  if (it == cache.end()) it = cache.emplace(std::pair{v, n}, Inputs(v, n)).first;
  return it->second;
}

void set_counters(benchmark::State& state, Index v, Index n) {
  state.counters["v"] = static_cast<double>(v);
  state.counters["n"] = static_cast<double>(n);
  state.counters["threads"] = omp_get_max_threads();
}

template <bool Parallel>
void BM_KronLaplacian(benchmark::State& state) {
  const Index v = state.range(0), n = state.range(1);
  const auto& in = inputs(v, n);
  for (auto _ : state) {
    auto m = Parallel ? kernels::parallel::kron_laplacian(in.w, in.map, n) : kernels::serial::kron_laplacian(in.w, in.map, n);
    benchmark::DoNotOptimize(m.data());
  }
  set_counters(state, v, n);
}

template <bool Parallel>
void BM_KronAdjoint(benchmark::State& state) {
  const Index v = state.range(0), n = state.range(1);
  const auto& in = inputs(v, n);
  for (auto _ : state) {
    auto y = Parallel ? kernels::parallel::kron_adjoint(in.dense, in.map, n) : kernels::serial::kron_adjoint(in.dense, in.map, n);
    benchmark::DoNotOptimize(y.data());
  }
  set_counters(state, v, n);
}

template <bool Parallel>
void BM_ConjugateInner(benchmark::State& state) {
  const Index v = state.range(0), n = state.range(1);
  const auto& in = inputs(v, n);
  for (auto _ : state) {
    auto m = Parallel ? kernels::parallel::conjugate_inner(in.bases, in.dense) : kernels::serial::conjugate_inner(in.bases, in.dense);
    benchmark::DoNotOptimize(m.data());
  }
  set_counters(state, v, n);
}

template <bool Parallel>
void BM_CoupledGradient(benchmark::State& state) {
  const Index v = state.range(0), n = state.range(1);
  const auto& in = inputs(v, n);
  for (auto _ : state) {
    auto g = Parallel ? kernels::parallel::coupled_gradient(in.lap, in.bases, in.dense)
                      : kernels::serial::coupled_gradient(in.lap, in.bases, in.dense);
    benchmark::DoNotOptimize(g.data());
  }
  set_counters(state, v, n);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (Index v : {32, 64, 128, 256}) b->Args({v, 2});
  b->Args({64, 3});
}

}  // namespace

BENCHMARK(BM_KronLaplacian<false>)->Apply(sizes)->Name("kron_laplacian/serial");
BENCHMARK(BM_KronLaplacian<true>)->Apply(sizes)->Name("kron_laplacian/parallel");
BENCHMARK(BM_KronAdjoint<false>)->Apply(sizes)->Name("kron_adjoint/serial");
BENCHMARK(BM_KronAdjoint<true>)->Apply(sizes)->Name("kron_adjoint/parallel");
BENCHMARK(BM_ConjugateInner<false>)->Apply(sizes)->Name("conjugate_inner/serial");
BENCHMARK(BM_ConjugateInner<true>)->Apply(sizes)->Name("conjugate_inner/parallel");
BENCHMARK(BM_CoupledGradient<false>)->Apply(sizes)->Name("coupled_gradient/serial");
BENCHMARK(BM_CoupledGradient<true>)->Apply(sizes)->Name("coupled_gradient/parallel");

BENCHMARK_MAIN();
