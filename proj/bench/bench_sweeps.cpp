// Parallel batch kernels against their serial references.

#include <benchmark/benchmark.h>

#include <cmath>

#include "qmep/constants.hpp"
#include "qmep/sweep.hpp"

using namespace qmep;
using namespace qmep::constants;

namespace {

DispersionModel silicon() { return DispersionModel::kane(0.32 * m_e, 0.5 / eV, 300.0); }

std::vector<Multipliers> grid(int count) {
  std::vector<Multipliers> ms;
  for (int i = 0; i < count; ++i) ms.push_back(Multipliers{-10.0 + 20.0 * i / count, 0.5 + 0.1 * (i % 10), {}});
  return ms;
}

std::vector<MomentVector> targets(int count) {
  std::vector<MomentVector> ts;
  const auto model = silicon();
  for (const auto& m : grid(count)) ts.push_back(constraints_forward(model, m));
  return ts;
}

// Silicon optical phonon with the deformation potential of the presets.
std::vector<PhononChannel> channels() {
  return {PhononChannel::silicon_optical(1.0, 11e10 * eV, 2330.0, 0.063 * eV, 300.0),
          PhononChannel::silicon_elastic(4.2e-27, 300.0)};
}

MultiplierField1D wave(int n) {
  MultiplierField1D f;
  f.boundary = Boundary::Periodic;
  const double L = 1e-7;
  for (int i = 0; i < n; ++i) {
    const double x = L * i / n;
    f.x.push_back(x);
    f.eta0.push_back(-1.0 + 0.5 * std::sin(2.0 * pi * x / L));
    f.eta1.push_back(1.0 + 0.2 * std::cos(2.0 * pi * x / L));
    f.eta2.push_back(Vec{});
  }
  return f;
}

void invert_parallel(benchmark::State& state) {
  const auto model = silicon();
  const auto ts = targets(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::invert_batch(model, ts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void invert_serial(benchmark::State& state) {
  const auto model = silicon();
  const auto ts = targets(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::invert_batch(model, ts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void production_parallel(benchmark::State& state) {
  const auto model = silicon();
  const auto ms = grid(static_cast<int>(state.range(0)));
  const auto chs = channels();
  for (auto _ : state) benchmark::DoNotOptimize(parallel::production_batch(model, ms, chs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void production_serial(benchmark::State& state) {
  const auto model = silicon();
  const auto ms = grid(static_cast<int>(state.range(0)));
  const auto chs = channels();
  for (auto _ : state) benchmark::DoNotOptimize(serial::production_batch(model, ms, chs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void psi_parallel(benchmark::State& state) {
  const auto model = silicon();
  const auto f = wave(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::psi_moments_field(model, f));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void psi_serial(benchmark::State& state) {
  const auto model = silicon();
  const auto f = wave(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::psi_moments_field(model, f));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(invert_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(invert_parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(production_serial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(production_parallel)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(psi_serial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(psi_parallel)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
