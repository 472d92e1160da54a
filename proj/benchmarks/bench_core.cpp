#include <benchmark/benchmark.h>

#include "crowdsense/crowdsense.hpp"

using namespace crowdsense;

namespace {

Matrix gaussian_matrix(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed, "bench");
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.normal();
  return m;
}

Dataset scenario(std::size_t n, double missing) {
  ScenarioSpec spec;
  spec.rows = spec.cols = n;
  spec.rank = std::max<std::size_t>(1, n / 20);
  spec.missing_frac = missing;
  spec.seed = 5;
  return generate_traffic(spec);
}

void BM_Svd(benchmark::State& state) {
  const Matrix m = gaussian_matrix(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(svd(m));
}
BENCHMARK(BM_Svd)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Svt(benchmark::State& state) {
  const Matrix m = gaussian_matrix(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(svt(m, 1.0));
}
BENCHMARK(BM_Svt)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Rpca(benchmark::State& state) {
  const Dataset ds = scenario(static_cast<std::size_t>(state.range(0)), 0.0);
  RecoveryProblem p;
  p.y = ds.observed;
  int iterations = 0;
  for (auto _ : state) {
    const auto r = rpca(p);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.x.data());
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_Rpca)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_MaskedRpca(benchmark::State& state) {
  const Dataset ds = scenario(static_cast<std::size_t>(state.range(0)), 0.2);
  RecoveryProblem p;
  p.y = ds.observed;
  p.mask = ds.mask;
  for (auto _ : state) benchmark::DoNotOptimize(masked_rpca(p).x.data());
}
BENCHMARK(BM_MaskedRpca)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_AdmmDecentralized(benchmark::State& state) {
  const auto agents = static_cast<std::size_t>(state.range(0));
  Rng rng(9, "bench-admm");
  std::vector<LocalObjective> objs;
  for (std::size_t i = 0; i < agents; ++i) {
    Vector a(4);
    for (int k = 0; k < 4; ++k) a[k] = rng.normal();
    objs.push_back(quadratic_objective(a));
  }
  const Topology topo = Topology::ring(agents);
  ConsensusConfig cfg;
  cfg.max_rounds = 200;
  cfg.tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(admm_decentralized(objs, topo, 4, cfg).rounds);
}
BENCHMARK(BM_AdmmDecentralized)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GaussianGram(benchmark::State& state) {
  const auto [pts, labels] = make_circle_annulus(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(gram(KernelSpec::gaussian(1.0), pts));
}
BENCHMARK(BM_GaussianGram)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
