// qjump — scenario-driven simulator for piecewise-unitary quantum dynamics
// with stochastic transitions.
//
// Exit codes: 0 success, 2 scenario/parse error, 3 transition timing
// undefined (the energy condition holds identically), 4 numerical
// non-convergence (partial outputs retained), 1 anything else.

#include "qjump/runner.hpp"
#include "qjump/scenario.hpp"
#include "qjump/transitions.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

int command_run(const std::string& what, const std::string& out_dir, bool plot,
                const std::optional<std::uint64_t>& seed,
                const std::optional<int>& k_max, int threads) {
  const qjump::Scenario scenario = qjump::load_scenario(what);
  qjump::RunOptions options;
  options.out_dir = out_dir.empty() ? ("qjump-out/" + scenario.name) : out_dir;
  options.plot = plot;
  options.seed = seed;
  options.k_max = k_max;
  options.threads = threads;

  const qjump::RunReport report = qjump::run(scenario, options);
  std::cout << report.summary_text();
  std::cout << "files:";
  for (const auto& file : report.files) std::cout << " " << file.string();
  std::cout << "\n";
  return 0;
}

int command_compare(const std::string& candidate, const std::string& golden,
                    double abs_tol, double rel_tol) {
  const qjump::csv::CompareResult result = qjump::csv::compare_directories(
      candidate, golden, qjump::csv::ToleranceProfile{abs_tol, rel_tol});
  if (result.pass) {
    std::cout << "PASS " << result.message << "\n";
    return 0;
  }
  std::cout << "FAIL " << result.message << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for unitary evolution interrupted by stochastic "
               "transitions: density-matrix sequences, Markov-chain and rate-"
               "equation views, exponential decay, suppressed Rabi "
               "oscillations, and Monte Carlo trajectories."};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string out_dir;
  bool plot = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> k_max;
  int threads = 1;
  auto* run_command =
      app.add_subcommand("run", "Run a preset or scenario file");
  run_command->add_option("scenario", scenario_arg, "Preset name or file path")
      ->required();
  run_command->add_option("--out", out_dir, "Output directory");
  run_command->add_flag("--plot", plot, "Also emit a standalone SVG chart");
  run_command->add_option("--seed", seed, "Override the Monte Carlo base seed");
  run_command->add_option("--k-max", k_max, "Override k_max / step count");
  run_command->add_option("--threads", threads,
                          "Monte Carlo worker threads (result is identical)");

  std::string compare_candidate;
  std::string compare_golden;
  double abs_tol = 1e-12;
  double rel_tol = 1e-9;
  auto* compare_command = app.add_subcommand(
      "compare", "Numerically compare a run directory against a golden one");
  compare_command->add_option("dir", compare_candidate, "Candidate directory")
      ->required();
  compare_command->add_option("golden", compare_golden, "Golden directory")
      ->required();
  compare_command->add_option("--abs-tol", abs_tol, "Absolute tolerance");
  compare_command->add_option("--rel-tol", rel_tol, "Relative tolerance");

  auto* list_command = app.add_subcommand("list-presets", "List built-in presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_command->parsed()) {
      return command_run(scenario_arg, out_dir, plot, seed, k_max, threads);
    }
    if (compare_command->parsed()) {
      return command_compare(compare_candidate, compare_golden, abs_tol, rel_tol);
    }
    if (list_command->parsed()) {
      for (const auto& name : qjump::preset_names()) std::cout << name << "\n";
      return 0;
    }
  } catch (const qjump::ScenarioParseError& error) {
    std::cerr << "scenario error: " << error.what() << "\n";
    return 2;
  } catch (const qjump::TimingUndefinedError& error) {
    std::cerr << "timing undefined: " << error.what() << "\n"
              << "The energy-conservation condition is satisfied identically "
                 "for this system, so no transition time can be singled out.\n";
    return 3;
  } catch (const qjump::NonConvergenceError& error) {
    std::cerr << "non-convergence: " << error.what() << "\n";
    return 4;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
