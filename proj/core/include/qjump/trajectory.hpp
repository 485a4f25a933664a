// trajectory.hpp — Monte Carlo realization of the ensemble. Each trajectory
// is a single system that at every stochastic transition jumps to exactly one
// basis state, sampled by the Born rule conditioned on the current realized
// state. Seeding is per-trajectory, so ensembles are reproducible bit-exactly
// regardless of execution order or thread count.

#pragma once

#include "qjump/hilbert.hpp"
#include "qjump/markov.hpp"
#include "qjump/transitions.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace qjump {

// --------------------------- Schedules --------------------------------------

// Transition times t_k = k·dt.
struct FixedSpacing {
  double dt = 1.0;
};

// Per-step timing from the energy-conservation finder, conditioned on the
// realized state.
struct FinderSchedule {
  FinderConfig finder;
  double energy_tol = 1e-9;
};

using Schedule = std::variant<FixedSpacing, FinderSchedule>;

// --------------------------- Trajectories -----------------------------------

struct Jump {
  double time = 0.0;
  Index state = 0;
};

struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<Jump> jumps;     // strictly increasing times
  Index final_index = -1;      // realized state after the last jump
  bool truncated = false;      // finder ran dry before k_max
};

// Runs one trajectory of k_max jumps. The first jump is conditioned on ψ(0)
// itself (which need not be a basis state); subsequent jumps are conditioned
// on the realized basis state. Identical (seed, inputs) give identical
// trajectories, bit-exact.
Trajectory sample_trajectory(const StateVector& psi0, const HamiltonianOperator& h,
                             const MixtureBasis& basis, const Schedule& schedule,
                             int k_max, std::uint64_t seed);

// --------------------------- Ensembles --------------------------------------

struct EnsembleEstimate {
  int n_trajectories = 0;
  std::vector<double> times;   // t_k, k = 0..k_max
  RealMatrix populations;      // (k_max+1) × d empirical frequencies
  RealMatrix standard_errors;  // sqrt(p̂(1−p̂)/N)
  std::string generator = "mt19937_64";  // recorded for reproducibility

  // Row 0 is the Born population of ψ(0) in the basis (no jump has happened
  // yet); rows k ≥ 1 are empirical jump frequencies. A trajectory that
  // truncates keeps contributing its last realized state; one that truncates
  // before its first jump contributes nothing to later rows.
};

// Runs trajectories with seeds base_seed .. base_seed+n−1. Frequencies are
// accumulated as integer counts, so serial and parallel runs agree
// bit-exactly for fixed (base_seed, n).
EnsembleEstimate ensemble_populations(const StateVector& psi0,
                                      const HamiltonianOperator& h,
                                      const MixtureBasis& basis,
                                      const Schedule& schedule, int k_max, int n,
                                      std::uint64_t base_seed, int n_threads = 1);

}  // namespace qjump
