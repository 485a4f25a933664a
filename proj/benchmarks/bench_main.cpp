#include "qjump/markov.hpp"
#include "qjump/trajectory.hpp"
#include "qjump/transitions.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace qjump;

HamiltonianOperator random_hamiltonian(Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  }
  return HamiltonianOperator(0.5 * (a + a.adjoint().eval()));
}

HamiltonianOperator demo3_hamiltonian() {
  Matrix h(3, 3);
  h << 0.0, 1.0, 0.05, 1.0, 0.0, 0.05, 0.05, 0.05, 5.0;
  return HamiltonianOperator(h);
}

void BM_PropagatorBuild(benchmark::State& state) {
  const Index d = state.range(0);
  const HamiltonianOperator h = random_hamiltonian(d, 7);
  h.eigensystem();  // setup cost out of the loop
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagator(h, t).matrix());
    t += 0.1;
  }
}
BENCHMARK(BM_PropagatorBuild)->Arg(4)->Arg(16)->Arg(64);

void BM_FindTransitionTime(benchmark::State& state) {
  const HamiltonianOperator h = demo3_hamiltonian();
  const MixtureBasis basis = MixtureBasis::standard(3);
  const StateVector psi0 = StateVector::basis_state(3, 0);
  const EnergySectors sectors = classify_energy_sectors(basis, h, psi0, 1e-9);
  FinderConfig config;
  config.t_hi = 3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_transition_time(psi0, h, basis, sectors, config));
  }
}
BENCHMARK(BM_FindTransitionTime);

void BM_ChainStep(benchmark::State& state) {
  const Index d = state.range(0);
  const HamiltonianOperator h = random_hamiltonian(d, 11);
  const TransitionMatrix kernel =
      transition_matrix(h, MixtureBasis::standard(d), 0.7);
  const PopulationVector p = PopulationVector::indicator(d, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(step_populations(kernel, p));
  }
}
BENCHMARK(BM_ChainStep)->Arg(4)->Arg(16)->Arg(64);

void BM_EnsembleFixedSchedule(benchmark::State& state) {
  Matrix h2(2, 2);
  h2 << 0.0, 1.0, 1.0, 0.0;
  const HamiltonianOperator h(h2);
  const MixtureBasis basis = MixtureBasis::standard(2);
  const StateVector psi0 = StateVector::basis_state(2, 1);
  const Schedule schedule = FixedSpacing{2.701769682087222};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ensemble_populations(psi0, h, basis, schedule, 10, 1000, 42, 1));
  }
}
BENCHMARK(BM_EnsembleFixedSchedule);

void BM_PauliIntegrate(benchmark::State& state) {
  const HamiltonianOperator h = random_hamiltonian(4, 13);
  const TransitionMatrix kernel =
      transition_matrix(h, MixtureBasis::standard(4), 0.05);
  const RateMatrix rates = rate_matrix(kernel);
  const PopulationVector p0 = PopulationVector::indicator(4, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pauli_integrate(rates, p0, 10.0, 0.01));
  }
}
BENCHMARK(BM_PauliIntegrate);

}  // namespace

BENCHMARK_MAIN();
