// Serial vs parallel oracle, integrated vs decomposed CP insertion, and the
// delay profile against plain re-timing.

#include <benchmark/benchmark.h>

#include <random>

#include "mopvrp/alns.hpp"
#include "mopvrp/delay_profile.hpp"
#include "mopvrp/instances.hpp"
#include "mopvrp/oracle.hpp"
#include "mopvrp/search.hpp"
#include "reference.hpp"

namespace {

using namespace mopvrp;

Instance oracle_instance(int n) {
  std::mt19937_64 rng(11);
  return ref::random_instance(rng, {n, 2, 2, 10.0});
}

void BM_OracleMop(benchmark::State& state) {
  const Instance inst = oracle_instance(static_cast<int>(state.range(0)));
  const auto exec = state.range(1) ? Execution::Parallel : Execution::Serial;
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_mop(inst, exec).objective);
}
BENCHMARK(BM_OracleMop)->ArgsProduct({{6, 7, 8}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_OracleCp(benchmark::State& state) {
  const Instance inst = oracle_instance(static_cast<int>(state.range(0)));
  const auto exec = state.range(1) ? Execution::Parallel : Execution::Serial;
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_cp(inst, {exec, true}).objective);
}
BENCHMARK(BM_OracleCp)->ArgsProduct({{5, 6, 7}, {0, 1}})->Unit(benchmark::kMillisecond);

// A 50-customer CP solution with one customer taken out.
struct CpFixture {
  Instance inst;
  CpSolution partial;
  int customer = 0;

  CpFixture() {
    const Instance base = parse_solomon(ref::synth_solomon(50, 21, "B"));
    inst = derive_benchmark(base, 3.0, 2, Variant::Cp);
    AlnsConfig config = AlnsConfig::defaults(Variant::Cp);
    config.n_max = 200;
    partial = run_cp(inst, config).best;
    customer = 17;
    remove_customer(partial, customer);
  }
};

void BM_CpIntegrated(benchmark::State& state) {
  static const CpFixture f;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cp_integrated_insertion(f.inst, f.partial, f.customer));
  }
}
BENCHMARK(BM_CpIntegrated)->Unit(benchmark::kMicrosecond);

void BM_CpDecomposed(benchmark::State& state) {
  static const CpFixture f;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cp_decomposed_insertion(f.inst, f.partial, f.customer));
  }
}
BENCHMARK(BM_CpDecomposed)->Unit(benchmark::kMicrosecond);

struct RouteFixture {
  Instance inst;
  Route route;

  RouteFixture() {
    std::mt19937_64 rng(31);
    inst = ref::random_instance(rng, {12, 1, 1, 0.0});
    inst.max_duration = 1e6;
    for (int c = 1; c <= 12; ++c) route.push_back(c);
  }
};

void BM_ProfileQuery(benchmark::State& state) {
  static const RouteFixture f;
  const DelayProfile p = DelayProfile::build(f.inst, f.route);
  double psi = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.value_at(psi));
    psi = psi > 200.0 ? 0.0 : psi + 0.7;
  }
}
BENCHMARK(BM_ProfileQuery);

void BM_RouteRetiming(benchmark::State& state) {
  static const RouteFixture f;
  double psi = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ref::route_delay_at(f.inst, f.route, psi));
    psi = psi > 200.0 ? 0.0 : psi + 0.7;
  }
}
BENCHMARK(BM_RouteRetiming);

}  // namespace

BENCHMARK_MAIN();
