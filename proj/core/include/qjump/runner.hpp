// runner.hpp — Executes one Scenario: dispatches to the computational
// modules, writes the per-mode CSV series, a summary, and optionally a
// standalone SVG chart. Outputs are byte-deterministic for fixed inputs.
//
// CSV schemas (fixed column order, doubles at 17 significant digits):
//   sequence → transitions.csv: k,t_k,energy_pre,energy_post,p_0..p_{d-1}
//   markov   → chain.csv: k,t,p_0..p_{d-1}; pauli.csv: t,p_0..p_{d-1}
//   decay    → decay.csv: k,t_k,p_survival,p_exponential,rel_deviation
//   rabi     → rabi.csv: t,p1,segment_index,is_transition_sample
//   mc       → ensemble.csv: k,t_k,state_index,p_hat,stderr,p_exact

#pragma once

#include "qjump/csv.hpp"
#include "qjump/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qjump {

inline constexpr const char* kVersion = "0.1.0";

// Thrown after partial outputs have been written when an iterative solve
// fails to reach its tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::filesystem::path out_dir;
  bool plot = false;
  std::optional<std::uint64_t> seed;  // overrides mc base_seed
  std::optional<int> k_max;           // overrides k_max / steps
  int threads = 1;
};

struct RunReport {
  std::string scenario_name;
  std::string mode;
  // Ordered key/value summary; every number is recomputable from the CSVs.
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<std::filesystem::path> files;
  std::string version = kVersion;

  std::string summary_text() const;
  // First value for a key, if present.
  std::optional<std::string> value(const std::string& key) const;
};

RunReport run(const Scenario& scenario, const RunOptions& options);

}  // namespace qjump
