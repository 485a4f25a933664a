// transitions.hpp — Stochastic transitions: Born probabilities, collapse of
// pure states and mixtures, energy-sector classification, the transition-time
// finder, and full closed-system sequence runs.
//
// A stochastic transition replaces the current state by a classical mixture
// over one orthonormal basis, with Born-rule weights. Its timing is fixed by
// energy conservation: a transition can only happen at times where the
// amplitude onto every energy-violating basis state vanishes. Transitions
// whose final mixture is a single state are excluded (they are ordinary
// unitary evolution, not collapses).

#pragma once

#include "qjump/hilbert.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace qjump {

// --------------------------- Energy sectors ---------------------------------

// Partition of the basis indices by whether the diagonal energy ⟨γ_n|H|γ_n⟩
// matches the initial energy E₀ = ⟨ψ(0)|H|ψ(0)⟩. Only conserving states may
// ever carry population across a transition.
struct EnergySectors {
  double reference_energy = 0.0;
  std::vector<Index> conserving;
  std::vector<Index> violating;
  // Absolute threshold actually applied (input tolerance scaled by the
  // spectral range of H).
  double energy_tol = 0.0;

  bool no_conserving_states() const { return conserving.empty(); }
};

// energy_tol is relative to max(1, spectral range of H).
EnergySectors classify_energy_sectors(const MixtureBasis& basis,
                                      const HamiltonianOperator& h,
                                      const StateVector& psi0,
                                      double energy_tol = 1e-9);

// --------------------------- Collapse ---------------------------------------

// p_n = |⟨γ_n|ψ⟩|²; sums to 1 to round-off.
RealVector born_probabilities(const StateVector& psi, const MixtureBasis& basis);

// W₊ = Σ_n |γ_n⟩ p_n ⟨γ_n| with Born populations of ψ.
DensityMatrix collapse_pure(const StateVector& psi, const MixtureBasis& basis);

// Reads the diagonal of W in the basis and rebuilds the diagonal mixture.
// Idempotent: collapsing a mixture already diagonal in the basis is a no-op.
DensityMatrix collapse_mixture(const DensityMatrix& w, const MixtureBasis& basis);

// Diagonal populations ⟨γ_n|W|γ_n⟩ without rebuilding the matrix.
RealVector mixture_populations(const DensityMatrix& w, const MixtureBasis& basis);

// True iff exactly one Born population exceeds pop_tol and that population
// exceeds 1 − pop_tol: the "transition" would land on a single state.
bool is_pure_transition(const StateVector& psi, const MixtureBasis& basis,
                        double pop_tol = 1e-9);

// max-norm of the commutator [W_a, W_b] below tol.
bool commuting_check(const DensityMatrix& w_a, const DensityMatrix& w_b,
                     double tol = 1e-10);

// --------------------------- Timing finder ----------------------------------

struct FinderConfig {
  double t_lo = 0.0;
  double t_hi = 10.0;
  int grid_points = 2000;    // ≥ 100
  double amp_tol = 1e-8;     // accept when every violating amplitude < amp_tol
  double pop_tol = 1e-9;     // population threshold for sources / pure check
  // Grid minima above this fraction of the grid maximum are not refined.
  double coarse_fraction = 1e-3;
  int refine_iterations = 120;  // golden-section steps per candidate
};

enum class TimingStatus {
  found,    // earliest admissible zero in the window
  none,     // objective has no admissible zero in the window
  vacuous,  // condition holds identically: no violating amplitude exists
};

struct TimingResult {
  TimingStatus status = TimingStatus::none;
  double time = 0.0;  // meaningful only when status == found

  bool found() const { return status == TimingStatus::found; }
};

// Smallest t in (t_lo, t_hi] at which |⟨γ_n|U(t)|source⟩| < amp_tol for every
// violating-sector state γ_n and every populated source. Times within one
// grid step of t_lo are excluded (the t = 0 solution is prohibited), and
// candidates whose resulting mixture is a single state are skipped. When the
// violating sector is empty, or the violating amplitudes vanish identically
// over the whole window, the result is `vacuous` and no time is chosen.
TimingResult find_transition_time(const StateVector& psi,
                                  const HamiltonianOperator& h,
                                  const MixtureBasis& basis,
                                  const EnergySectors& sectors,
                                  const FinderConfig& cfg);

// Mixture source: the condition is enforced simultaneously for every basis
// state whose population in W exceeds pop_tol.
TimingResult find_transition_time(const DensityMatrix& w,
                                  const HamiltonianOperator& h,
                                  const MixtureBasis& basis,
                                  const EnergySectors& sectors,
                                  const FinderConfig& cfg);

// Thrown when a sequence needs a transition time but the condition is
// identically satisfied, so no time is defined.
class TimingUndefinedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --------------------------- Sequence runs ----------------------------------

struct TransitionRecord {
  int index = 0;           // k ≥ 1
  double time = 0.0;       // t_k
  RealVector populations;  // p_n^k, diagonal of post_density in the basis
  DensityMatrix pre_density;
  DensityMatrix post_density;
};

enum class SequenceStatus {
  completed,               // k_max transitions recorded
  no_further_transitions,  // finder ran dry before k_max
};

struct SequenceResult {
  std::vector<TransitionRecord> records;
  SequenceStatus status = SequenceStatus::completed;
  bool commuting = false;         // all adjacent post-densities commute
  bool equal_spacing = false;     // successive gaps match within timing tol
  std::optional<double> spacing;  // Δt₀ when commuting (mean gap)
};

struct SequenceConfig {
  FinderConfig finder;
  double energy_tol = 1e-9;      // sector classification, relative
  double commutator_tol = 1e-10;
  double timing_tol_rel = 1e-6;  // equal-spacing tolerance, relative to Δt₀
};

// Alternates unitary evolution with collapses: find t_k from the current
// source, evolve, collapse in the basis, record. Stops early when the finder
// finds no admissible time; throws TimingUndefinedError on a vacuous step.
SequenceResult run_sequence(const StateVector& psi0, const HamiltonianOperator& h,
                            const MixtureBasis& basis, int k_max,
                            const SequenceConfig& cfg);

}  // namespace qjump
