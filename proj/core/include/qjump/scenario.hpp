// scenario.hpp — Scenario files: a line-oriented key/value format describing
// one simulation run, plus the built-in presets.
//
// Grammar (one statement per line):
//   # comment                     '#' starts a comment, anywhere on a line
//   key = value                   top-level statement
//   [hamiltonian] / [basis]       matrix sections; inside them only
//   row = e1 e2 ... ed            one matrix row (basis rows are the basis
//                                 vectors |γ_n⟩, stored as columns)
//   Matrix entries are either a bare real (e.g. -1.5e-3) or a complex pair
//   (re,im) with no interior spaces.
//
// Top-level keys: name, mode (sequence|markov|decay|rabi|mc), dimension,
// initial_state (basis index) or initial_amplitudes (entry list), and the
// mode parameters listed with each params struct below. Unknown keys are
// rejected with their line number. Hermiticity of [hamiltonian] and
// orthonormality of [basis] are validated at parse time.

#pragma once

#include "qjump/hilbert.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qjump {

class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { sequence, markov, decay, rabi, mc };

std::string to_string(Mode mode);

// keys: k_max, window_lo, window_hi, grid_points, amp_tol, energy_tol,
// pop_tol, timing_tol_rel
struct SequenceParams {
  int k_max = 5;
  double window_lo = 0.0;
  double window_hi = 10.0;
  int grid_points = 2000;
  double amp_tol = 1e-8;
  double energy_tol = 1e-9;
  double pop_tol = 1e-9;
  double timing_tol_rel = 1e-6;
  bool operator==(const SequenceParams&) const = default;
};

// keys: dt0, steps, ode_dt, stat_tol, stat_max_iters, energy_tol, balance_tol
struct MarkovParams {
  double dt0 = 1.0;
  int steps = 100;
  double ode_dt = 0.0;  // 0 → dt0/20
  double stat_tol = 1e-12;
  int stat_max_iters = 200000;
  double energy_tol = 1e-9;
  double balance_tol = 1e-9;
  bool operator==(const MarkovParams&) const = default;
};

// keys: dt0, k_max, truncated
struct DecayParams {
  double dt0 = 0.1;
  int k_max = 100;
  bool truncated = true;
  bool operator==(const DecayParams&) const = default;
};

// keys: omega, ratio, initial_p1, t_end, samples_per_segment
struct RabiParams {
  double omega = 1.0;
  double ratio = 0.25;
  double initial_p1 = 0.0;
  double t_end = 30.0;
  int samples_per_segment = 60;
  bool operator==(const RabiParams&) const = default;
};

// keys: schedule (fixed|finder), dt0, k_max, n_trajectories, base_seed,
// window_lo, window_hi, grid_points, amp_tol, pop_tol, energy_tol
struct McParams {
  enum class ScheduleKind { fixed, finder };
  ScheduleKind schedule = ScheduleKind::fixed;
  double dt0 = 1.0;
  int k_max = 10;
  int n_trajectories = 1000;
  std::uint64_t base_seed = 1;
  double window_lo = 0.0;
  double window_hi = 10.0;
  int grid_points = 2000;
  double amp_tol = 1e-8;
  double pop_tol = 1e-9;
  double energy_tol = 1e-9;
  bool operator==(const McParams&) const = default;
};

struct Scenario {
  std::string name;
  Mode mode = Mode::sequence;
  Index dimension = 0;  // rabi defaults to 2
  std::optional<Matrix> hamiltonian;
  std::optional<Matrix> basis;  // columns are basis vectors
  std::optional<Index> initial_state;
  std::optional<Vector> initial_amplitudes;
  SequenceParams sequence;
  MarkovParams markov;
  DecayParams decay;
  RabiParams rabi;
  McParams mc;
};

bool operator==(const Scenario& a, const Scenario& b);

// Parse errors carry "source:line: message".
Scenario parse_scenario_text(const std::string& text, const std::string& source);
Scenario parse_scenario(const std::filesystem::path& path);

// Canonical text form; parse(emit(s)) == s.
std::string emit_scenario(const Scenario& scenario);

// --------------------------- Presets ----------------------------------------

std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
Scenario preset_scenario(const std::string& name);

// Resolves an argument as a preset name first, then as a file path.
Scenario load_scenario(const std::string& preset_or_path);

}  // namespace qjump
