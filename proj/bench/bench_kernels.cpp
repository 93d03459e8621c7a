// Serial reference against the OpenMP kernels: psd_sweep and path simulation.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "subcurv/catalog.hpp"
#include "subcurv/curvature.hpp"
#include "subcurv/sim.hpp"

using namespace subcurv;

namespace {

void psd(benchmark::State& state, const char* id, bool parallel) {
  const auto e = get(id);
  const auto prep = PreparedSpec::build(e.spec);
  const auto points = sweep_points(prep, e.grid);
  const auto rs = sweep_r_values(e.spec.k, e.grid);
  SweepOptions so;
  so.parallel = parallel;
  for (auto _ : state) benchmark::DoNotOptimize(psd_sweep(prep, e.spec.k, points, rs, so).global_min);
  state.counters["cells"] = benchmark::Counter(double(points.size() * rs.size()) * state.iterations(),
                                               benchmark::Counter::kIsRate);
}

void paths(benchmark::State& state, const char* id, bool parallel) {
  const auto e = get(id);
  SdeModel m(e.spec.op);
  MCConfig cfg;
  cfg.paths = static_cast<std::size_t>(state.range(0));
  cfg.steps = 256;
  cfg.parallel = parallel;
  for (auto _ : state) benchmark::DoNotOptimize(m.simulate(e.starts, 1.0, cfg).front().data.data());
  state.counters["path_steps"] =
      benchmark::Counter(double(cfg.paths * cfg.steps * e.starts.size()) * state.iterations(), benchmark::Counter::kIsRate);
}

}  // namespace

BENCHMARK_CAPTURE(psd, exampleC_serial, "exampleC", false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(psd, exampleC_omp, "exampleC", true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(psd, kolmogorov_serial, "kolmogorov", false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(psd, kolmogorov_omp, "kolmogorov", true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(paths, exampleC_serial, "exampleC", false)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(paths, exampleC_omp, "exampleC", true)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(paths, kolmogorov_serial, "kolmogorov", false)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(paths, kolmogorov_omp, "kolmogorov", true)->Arg(20000)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
