#include "exactdpp/lowrank.hpp"
#include "exactdpp/sampler.hpp"
#include "exactdpp/state.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace exactdpp;

namespace {

DppState filled_state(int n, int dim, double lengthscale) {
  DppState s(KernelSpec::isotropic(KernelFamily::SquareExponential, dim, lengthscale));
  UniformStream stream(1);
  draw_more(s, stream, n);
  return s;
}

void BM_Push(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const DppState base = filled_state(n, 2, 0.01);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u;
  for (auto _ : st) {
    st.PauseTiming();
    DppState s = base;
    const Eigen::Vector2d x(u(rng), u(rng));
    st.ResumeTiming();
    s.push(x);
    benchmark::DoNotOptimize(s.size());
  }
  st.SetComplexityN(n);
}
BENCHMARK(BM_Push)->Arg(50)->Arg(100)->Arg(200)->Arg(400)->Complexity(benchmark::oNSquared);

void BM_BuildCdf(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const DppState s = filled_state(n, 2, 0.01);
  const Eigen::VectorXd prefix = Eigen::VectorXd::Constant(2, 0.4);
  for (auto _ : st) benchmark::DoNotOptimize(build_cdf(s, prefix, 0).total_mass());
  st.SetComplexityN(n);
}
BENCHMARK(BM_BuildCdf)->Arg(50)->Arg(100)->Arg(200)->Complexity(benchmark::oNSquared);

void BM_InvertCdf(benchmark::State& st) {
  const DppState s = filled_state(static_cast<int>(st.range(0)), 1, 0.005);
  const ConditionalCdf cdf = build_cdf(s, Eigen::VectorXd(0), 0);
  double u = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(invert_cdf(cdf, u * cdf.total_mass()));
    u = u < 0.9 ? u + 0.1 : 0.1;
  }
}
BENCHMARK(BM_InvertCdf)->Arg(50)->Arg(100);

void BM_Draw(benchmark::State& st) {
  const auto spec = KernelSpec::isotropic(KernelFamily::SquareExponential, static_cast<int>(st.range(1)),
                                              st.range(1) == 1 ? 0.005 : 0.05);
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(draw(spec, static_cast<int>(st.range(0)), seed++).points.data());
}
BENCHMARK(BM_Draw)->Args({50, 1})->Args({100, 2})->Unit(benchmark::kMillisecond);

void BM_ApproxDraw(benchmark::State& st) {
  const auto spec = KernelSpec::isotropic(KernelFamily::SquareExponential, 1, 0.0075);
  const FeatureBasis basis = st.range(1) ? spectral_basis(spec, static_cast<int>(st.range(0)))
                                         : nystrom_basis(spec, static_cast<int>(st.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(approx_draw(basis, 100, seed++).points.data());
}
BENCHMARK(BM_ApproxDraw)->Args({15, 0})->Args({15, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
