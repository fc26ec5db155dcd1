#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "swarmhydro/config.hpp"
#include "swarmhydro/hydro.hpp"
#include "swarmhydro/particle.hpp"
#include "swarmhydro/presets.hpp"

using namespace swarmhydro;

namespace {

ExperimentConfig hydro_config(std::size_t n) {
  ExperimentConfig c = preset("fig-3.3-c0.5");
  c.grid.n = n;
  return c;
}

void BM_HydroRhs(benchmark::State& st) {
  const ExperimentConfig c = hydro_config(static_cast<std::size_t>(st.range(0)));
  const HydroModel model = make_hydro_model(c);
  const Grid grid = build_grid(c.grid.n, c.grid.xl, c.grid.xr);
  const LagrangianState s = make_state(grid, init_profiles(make_profile(c), grid));
  for (auto _ : st) benchmark::DoNotOptimize(hydro_rhs(s, model));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_HydroRhs)->RangeMultiplier(2)->Range(100, 800)->Complexity();

void BM_DetaDx(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::vector<double> eta(n);
  const double dx = 1.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) eta[i] = std::sin(static_cast<double>(i) * dx) + static_cast<double>(i) * dx;
  for (auto _ : st) benchmark::DoNotOptimize(deta_dx(eta, dx));
}
BENCHMARK(BM_DetaDx)->Range(256, 16384);

void BM_ParticleRhs(benchmark::State& st) {
  ExperimentConfig c = preset("fig-2.1-beta0.8");
  c.particles.n = static_cast<std::size_t>(st.range(0));
  const ParticleModel model = make_particle_model(c);
  const ParticleState s = make_particle_ic(c);
  for (auto _ : st) benchmark::DoNotOptimize(particle_rhs(s, model));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_ParticleRhs)->RangeMultiplier(2)->Range(25, 400)->Complexity(benchmark::oNSquared);

}  // namespace

BENCHMARK_MAIN();
