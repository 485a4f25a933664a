// markov.hpp — The closed-system Markov chain over populations: one-step
// transition matrix, rates, stationary analysis, detailed balance, and the
// Pauli rate-equation integrator.

#pragma once

#include "qjump/hilbert.hpp"
#include "qjump/transitions.hpp"

#include <vector>

namespace qjump {

// --------------------------- Types ------------------------------------------

// T(n, m) = |⟨γ_n|U(Δt₀)|γ_m⟩|². Doubly stochastic by unitarity: every row
// and every column sums to 1.
struct TransitionMatrix {
  RealMatrix entries;
  double spacing = 0.0;  // Δt₀

  Index dim() const { return entries.rows(); }
};

// w(m, n) = T(m, n)/Δt₀ (units 1/time).
struct RateMatrix {
  RealMatrix entries;
  double spacing = 0.0;

  Index dim() const { return entries.rows(); }
};

// Non-negative, sums to 1.
class PopulationVector {
 public:
  explicit PopulationVector(RealVector probabilities);

  static PopulationVector uniform(Index dim);
  static PopulationVector indicator(Index dim, Index state);

  const RealVector& probabilities() const { return probabilities_; }
  Index dim() const { return probabilities_.size(); }

 private:
  RealVector probabilities_;
};

// --------------------------- Operations -------------------------------------

// Δt₀ = 0 is allowed and yields the identity kernel.
TransitionMatrix transition_matrix(const HamiltonianOperator& h,
                                   const MixtureBasis& basis, double dt0);

RateMatrix rate_matrix(const TransitionMatrix& t);

// p′ = T p.
PopulationVector step_populations(const TransitionMatrix& t,
                                  const PopulationVector& p);

// Per-state net probability flow Σ_{m≠n} [w_nm p_m − w_mn p_n], identical to
// (T p − p)/Δt₀; entries sum to zero.
RealVector net_balance(const TransitionMatrix& t, const PopulationVector& p);

struct StationaryResult {
  PopulationVector distribution;
  double residual = 0.0;  // ‖T p − p‖∞ at the returned iterate
  int iterations = 0;
  bool converged = false;
};

// Power iteration on the lazy chain p ← (T p + p)/2, which suppresses
// period-2 cycles and targets the Cesàro limit for non-ergodic kernels.
// Returns the best iterate with diagnostics; never throws on slow mixing.
StationaryResult stationary_distribution(const TransitionMatrix& t, double tolerance,
                                         int max_iterations);
StationaryResult stationary_distribution(const TransitionMatrix& t,
                                         const PopulationVector& start,
                                         double tolerance, int max_iterations);

// |w_mn p_n − w_nm p_m| < tol for every pair inside the same conserving
// energy sector; cross-sector pairs are not constrained.
bool detailed_balance_check(const RateMatrix& w, const PopulationVector& p,
                            const EnergySectors& sectors, double tolerance);

struct PauliSeries {
  std::vector<double> times;
  std::vector<RealVector> populations;  // one vector per time
};

// Integrates dp_n/dt = Σ_{m≠n} [w_nm p_m − w_mn p_n] with classical fixed-step
// RK4. Rejects dt · (max outflow rate) > 0.5 as unstable.
PauliSeries pauli_integrate(const RateMatrix& w, const PopulationVector& p0,
                            double t_end, double dt);

}  // namespace qjump
