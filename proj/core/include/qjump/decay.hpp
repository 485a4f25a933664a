// decay.hpp — Open-system exponential decay through the absorption-term
// truncation: survival recurrence, lifetime constant, exponential-law
// comparison.

#pragma once

#include "qjump/hilbert.hpp"
#include "qjump/markov.hpp"

#include <vector>

namespace qjump {

// Decay of the excited state |γ_i⟩ sampled at the transition spacing Δt₀.
// `truncated` selects the open-system reading (population that leaks out
// never feeds back); with it off, the survival series follows the full
// closed-system chain, recurrences to the excited state included.
struct DecayModel {
  Index initial_index = 0;
  double survival_amplitude_sq = 1.0;  // |⟨γ_i|U(Δt₀)|γ_i⟩|²
  double lifetime = 0.0;               // τ; +inf when stable
  double spacing = 0.0;                // Δt₀
  bool stable = false;                 // no leakage at all
  bool truncated = true;
  TransitionMatrix chain;  // full one-step kernel, for closed-system runs

  double dt_over_tau() const;
};

// Computes the survival amplitude and τ = Δt₀ / Σ_{m≠i} |⟨γ_m|U(Δt₀)|γ_i⟩|²,
// and validates the completeness identity
// |⟨γ_i|U|γ_i⟩|² = 1 − Σ_{m≠i} |⟨γ_m|U|γ_i⟩|² to round-off.
DecayModel build_decay_model(const HamiltonianOperator& h, const MixtureBasis& basis,
                             Index initial_index, double dt0);

// Survival probabilities p_i(t_k), k = 0..k_max, starting from p_i = 1.
// Truncated: geometric, (survival_amplitude_sq)^k. Closed: component i of
// the chain iterate.
std::vector<double> survival_recurrence(const DecayModel& model, int k_max);

struct DeviationReport {
  double max_rel_deviation = 0.0;
  double dt_over_tau = 0.0;
  bool within_validity = false;  // Δt₀/τ below the small-spacing regime bound
};

// Max over k ≤ k_max of |p_i(t_k) − e^{−t_k/τ}| / e^{−t_k/τ} for the
// truncated recurrence. Requires Δt₀/τ < 1.
DeviationReport exponential_compare(const DecayModel& model, int k_max);

}  // namespace qjump
