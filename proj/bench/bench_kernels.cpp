#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "hartree/bubble.hpp"
#include "hartree/montecarlo.hpp"
#include "hartree/nondegeneracy.hpp"
#include "hartree/quadrature.hpp"

using namespace hartree;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::serial : Exec::parallel; }

// Double-convolution energy of a unit bubble pair, the inner loop of the Pohozaev and energy kernels.
void BM_ConvolutionMC(benchmark::State& st) {
  int N = 5;
  SystemParams p(N, 1.0);
  Bubble b = Bubble::unit(p);
  double mu = p.mu(), ts = p.two_star();
  ConvolutionSampler sampler(N, mu, {Vec(N, 0.0)}, {1.0}, 0.5);
  for (auto _ : st) {
    auto acc = mc_accumulate(
        static_cast<std::size_t>(st.range(1)),
        [&](std::size_t i) {
          CounterRng rng(7, i);
          double x[kMaxDim], y[kMaxDim];
          double px = sampler.sample_bubble(rng, x);
          double qy = sampler.sample(x, 1.0, rng, y);
          double d2 = 0.0;
          for (int k = 0; k < N; ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
          return std::pow(b.value(x), ts) * std::pow(b.value(y), ts) * std::pow(d2, -0.5 * mu) / (px * qy);
        },
        exec_of(st));
    benchmark::DoNotOptimize(acc.mean);
  }
  st.SetItemsProcessed(st.iterations() * st.range(1));
}
BENCHMARK(BM_ConvolutionMC)->ArgsProduct({{0, 1}, {1 << 16}})->Unit(benchmark::kMillisecond);

// Plain Monte Carlo over a ball.
void BM_BallIntegral(benchmark::State& st) {
  int N = 6;
  SystemParams p(N, 2.0);
  Bubble b = Bubble::unit(p);
  MonteCarloSpec spec{static_cast<std::size_t>(st.range(1)), 3, 0};
  Domain d = Domain::ball(Vec(N, 0.0), 2.0);
  for (auto _ : st) {
    auto r = monte_carlo_integral([&](const double* x) { return b.neg_laplacian(x) * b.value(x); }, d, spec,
                                  exec_of(st));
    benchmark::DoNotOptimize(r.estimate);
  }
  st.SetItemsProcessed(st.iterations() * st.range(1));
}
BENCHMARK(BM_BallIntegral)->ArgsProduct({{0, 1}, {1 << 18}})->Unit(benchmark::kMillisecond);

// Radial convolution sweep over a log grid, one quadrature per radius.
void BM_RadialSweep(benchmark::State& st) {
  int N = 6;
  double mu = 4.0;
  auto f = [&](double s) { return std::pow(1.0 + s * s, -(2.0 * N - mu) / 2.0); };
  std::vector<double> r(32);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 1e-2 * std::pow(1e4, i / 31.0);
  std::vector<double> out(r.size());
  bool parallel = st.range(0) == 1;
  for (auto _ : st) {
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
      for (long long i = 0; i < static_cast<long long>(r.size()); ++i) out[i] = radial_convolution(mu, f, r[i], N);
    } else {
      for (std::size_t i = 0; i < r.size(); ++i) out[i] = radial_convolution(mu, f, r[i], N);
    }
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_RadialSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_NondegeneracyReport(benchmark::State& st) {
  SystemParams p(8, 1.5);
  for (auto _ : st) benchmark::DoNotOptimize(nondegeneracy_report(p, static_cast<int>(st.range(0))).verdict);
}
BENCHMARK(BM_NondegeneracyReport)->Arg(50)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
