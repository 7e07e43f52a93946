#include <benchmark/benchmark.h>

#include <random>

#include "polyhom/hom.hpp"
#include "polyhom/poly.hpp"
#include "polyhom/reduction.hpp"
#include "polyhom/structure.hpp"
#include "pp_fixtures.hpp"
#include "test_util.hpp"

namespace {

using namespace polyhom;

void bm_find_hom_cycle(benchmark::State& state) {
  const Structure c = *builtin_structure("Cn:" + std::to_string(state.range(0)));
  const Structure k3 = *builtin_structure("K3");
  for (auto _ : state) benchmark::DoNotOptimize(find_hom(c, k3).status);
}
BENCHMARK(bm_find_hom_cycle)->Arg(5)->Arg(9)->Arg(15);

void bm_enumerate_triangle(benchmark::State& state) {
  const Structure k3 = *builtin_structure("K3");
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_homs(k3, k3).size());
}
BENCHMARK(bm_enumerate_triangle);

void bm_power(benchmark::State& state) {
  const Structure k3 = *builtin_structure("K3");
  for (auto _ : state)
    benchmark::DoNotOptimize(power(k3, static_cast<int>(state.range(0))).size());
}
BENCHMARK(bm_power)->Arg(2)->Arg(3);

void bm_gamma_compile(benchmark::State& state) {
  std::mt19937_64 rng(1234);
  const PPPower pp = fixtures::pp_mixed_k3();
  const Structure x =
      testutil::random_instance(rng, pp.target_signature, 6, 30);
  for (auto _ : state) benchmark::DoNotOptimize(gamma(x, pp).compiled.size());
}
BENCHMARK(bm_gamma_compile);

void bm_cyclic_orbits(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(cyclic_orbits(3, static_cast<int>(state.range(0))).orbit_count());
}
BENCHMARK(bm_cyclic_orbits)->Arg(3)->Arg(5);

void bm_decide_star_k2(benchmark::State& state) {
  const Structure k2 = *builtin_structure("K2");
  for (auto _ : state) benchmark::DoNotOptimize(decide_star(k2).status);
}
BENCHMARK(bm_decide_star_k2);

}  // namespace

BENCHMARK_MAIN();
