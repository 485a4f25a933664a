// rabi.hpp — Closed two-level system with periodic stochastic transitions:
// piecewise Rabi evolution, regime classification, damping fixed point.
//
// Between transitions the ground(+photon) population follows
//   p₁(t) = p₁(t_k) cos²Ω(t−t_k) + [1 − p₁(t_k)] sin²Ω(t−t_k),
// and each transition at t_k = kΔt₀ keeps the populations (the mixture is
// diagonal in the two-state basis). The post-transition values obey the
// affine map p′ − ½ = cos(2ΩΔt₀)(p − ½), so |cos 2ΩΔt₀| is the per-transition
// contraction of the envelope.

#pragma once

#include <cstdint>
#include <vector>

namespace qjump {

struct RabiConfig {
  double omega = 1.0;      // Ω > 0 (twice the Rabi frequency)
  double spacing = 1.0;    // Δt₀ > 0 between transitions
  double initial_p1 = 0.0; // p₁(0); 0 = excited start
  double ratio = 0.0;      // ΩΔt₀/(2π), cached at construction

  RabiConfig(double omega, double spacing, double initial_p1 = 0.0);

  // Fixes Δt₀ from the dimensionless ratio ΩΔt₀/(2π).
  static RabiConfig from_ratio(double omega, double ratio, double initial_p1 = 0.0);
};

enum class RabiRegime : std::uint8_t {
  undamped,              // ratio = n/2: no transitions at all
  period_two,            // contraction −1: p′ = 1 − p
  immediate_stationary,  // contraction 0: p′ = ½ after one transition
  damped,                // 0 < |contraction| < 1
};

struct RegimeInfo {
  RabiRegime regime = RabiRegime::damped;
  double contraction = 0.0;  // cos(2ΩΔt₀)
  double ratio_tol = 0.0;    // half-integer detection tolerance used
};

// Half-integer ratios cannot be detected exactly in floating point; ratios
// within ratio_tol of n/2 classify as undamped.
RegimeInfo classify_regime(const RabiConfig& cfg, double ratio_tol = 1e-9);

// The unique fixed point ½ of the post-transition map. Throws
// std::domain_error for the undamped regime, where the map is the identity
// and every value is fixed. Note this fixes only the post-transition values:
// between transitions p₁ still oscillates.
double fixed_point(const RabiConfig& cfg);

struct RabiSeries {
  std::vector<double> times;
  std::vector<double> p1;
  std::vector<int> segment_index;
  std::vector<bool> is_transition_sample;
  std::vector<double> transition_times;    // t_k = kΔt₀
  std::vector<double> post_transition_p1;  // p₁(t_k)
};

// Samples p₁(t) over [0, t_end]. In the undamped regime no transitions are
// inserted and the single segment runs the whole window.
RabiSeries rabi_series(const RabiConfig& cfg, double t_end, int samples_per_segment);

}  // namespace qjump
