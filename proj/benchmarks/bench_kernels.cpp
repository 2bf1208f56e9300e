#include <random>

#include <benchmark/benchmark.h>

#include "elastoq/circuit_builder.hpp"
#include "elastoq/classical_reference.hpp"
#include "elastoq/simulator.hpp"

using namespace elastoq;

namespace {

const MaterialParams kRock(1.0, 0.646, 0.255);

CVector random_state(Index dim) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  CVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
  return v.normalized();
}

void BM_BlockFastStep(benchmark::State& state) {
  const HamiltonianModel model(LatticeShape(static_cast<int>(state.range(0)), 1.0), kRock);
  const Scheme scheme = state.range(1) == 1 ? Scheme::u1 : Scheme::u2;
  CVector psi = random_state(model.dimension());
  for (auto _ : state) {
    apply_block_fast_in_place(model, scheme, 0.1, psi);
    benchmark::DoNotOptimize(psi.data());
  }
  state.SetItemsProcessed(state.iterations() * model.dimension());
}
BENCHMARK(BM_BlockFastStep)->ArgsProduct({{2, 3, 4}, {1, 2}})->Unit(benchmark::kMillisecond);

void BM_GateSimulationStep(benchmark::State& state) {
  const HamiltonianModel model(LatticeShape(static_cast<int>(state.range(0)), 1.0), kRock);
  const GateProgram prog = build_U1(model, 0.1);
  CVector psi = random_state(model.dimension());
  for (auto _ : state) {
    simulate_in_place(prog, psi);
    benchmark::DoNotOptimize(psi.data());
  }
  state.counters["gates"] = static_cast<double>(prog.gates.size());
}
BENCHMARK(BM_GateSimulationStep)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_ApplyH(benchmark::State& state) {
  const HamiltonianModel model(LatticeShape(static_cast<int>(state.range(0)), 1.0), kRock);
  const CVector psi = random_state(model.dimension());
  for (auto _ : state) benchmark::DoNotOptimize(apply_H(model, psi));
}
BENCHMARK(BM_ApplyH)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_LeapfrogStep(benchmark::State& state) {
  const ElasticCoupling op(
      HamiltonianModel(LatticeShape(static_cast<int>(state.range(0)), 1.0), kRock));
  PhysicalState s{random_state(op.q_size()), random_state(op.r_size())};
  for (auto _ : state) {
    s = leapfrog_step(op, s, 0.1);
    benchmark::DoNotOptimize(s.q.data());
  }
}
BENCHMARK(BM_LeapfrogStep)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
