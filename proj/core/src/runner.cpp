#include "qjump/runner.hpp"

#include "qjump/decay.hpp"
#include "qjump/markov.hpp"
#include "qjump/rabi.hpp"
#include "qjump/trajectory.hpp"
#include "qjump/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qjump {

namespace {

namespace fs = std::filesystem;

std::string fmt(double value) { return csv::format_double(value); }
std::string fmt(long long value) { return csv::format_int(value); }

// --------------------------- SVG chart --------------------------------------

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained line chart; no external renderer involved.
void write_svg(const fs::path& path, const std::string& title,
               const std::vector<SvgSeries>& series) {
  constexpr double width = 860.0;
  constexpr double height = 520.0;
  constexpr double margin = 60.0;

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        x_min = x_max = s.x[i];
        y_min = y_max = s.y[i];
        first = false;
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;

  auto px = [&](double x) {
    return margin + (x - x_min) / (x_max - x_min) * (width - 2.0 * margin);
  };
  auto py = [&](double y) {
    return height - margin - (y - y_min) / (y_max - y_min) * (height - 2.0 * margin);
  };
  auto coord = [](double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", v);
    return std::string(buffer);
  };
  auto tick = [](double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.4g", v);
    return std::string(buffer);
  };

  static const char* colors[] = {"#205ea6", "#c0392b", "#1e8449", "#8e44ad",
                                 "#b7950b", "#148f9c", "#a04000", "#5d6d7e"};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  // axes
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 4.0;
    const double fy = y_min + (y_max - y_min) * i / 4.0;
    out << "<text x=\"" << coord(px(fx)) << "\" y=\"" << height - margin + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick(fx) << "</text>\n";
    out << "<text x=\"" << margin - 8 << "\" y=\"" << coord(py(fy) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick(fy) << "</text>\n";
  }
  int color = 0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\""
        << colors[color % (sizeof(colors) / sizeof(colors[0]))]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i > 0) out << " ";
      out << coord(px(s.x[i])) << "," << coord(py(s.y[i]));
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - margin - 4 << "\" y=\""
        << margin + 16.0 * (color + 1) << "\" text-anchor=\"end\" "
        << "font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << colors[color % (sizeof(colors) / sizeof(colors[0]))] << "\">" << s.label
        << "</text>\n";
    ++color;
  }
  out << "</svg>\n";

  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << out.str();
}

// --------------------------- shared helpers ---------------------------------

StateVector initial_state_vector(const Scenario& scenario) {
  if (scenario.initial_amplitudes) {
    return StateVector(*scenario.initial_amplitudes);
  }
  return StateVector::basis_state(scenario.dimension, *scenario.initial_state);
}

MixtureBasis scenario_basis(const Scenario& scenario) {
  if (scenario.basis) return MixtureBasis(*scenario.basis);
  return MixtureBasis::standard(scenario.dimension);
}

struct Outputs {
  RunReport report;
  fs::path dir;
  std::vector<SvgSeries> plot_series;
  std::string plot_title;

  void add(const std::string& key, const std::string& value) {
    report.summary.emplace_back(key, value);
  }
  void csv_file(const std::string& name, const csv::Table& table) {
    const fs::path path = dir / name;
    csv::write(path, table);
    report.files.push_back(path);
  }
};

// --------------------------- mode: sequence ---------------------------------

void run_sequence_mode(const Scenario& scenario, const RunOptions& options,
                       Outputs& out) {
  const HamiltonianOperator h(*scenario.hamiltonian);
  const MixtureBasis basis = scenario_basis(scenario);
  const StateVector psi0 = initial_state_vector(scenario);

  SequenceConfig config;
  config.finder.t_lo = scenario.sequence.window_lo;
  config.finder.t_hi = scenario.sequence.window_hi;
  config.finder.grid_points = scenario.sequence.grid_points;
  config.finder.amp_tol = scenario.sequence.amp_tol;
  config.finder.pop_tol = scenario.sequence.pop_tol;
  config.energy_tol = scenario.sequence.energy_tol;
  config.timing_tol_rel = scenario.sequence.timing_tol_rel;
  const int k_max = options.k_max.value_or(scenario.sequence.k_max);

  const SequenceResult result = run_sequence(psi0, h, basis, k_max, config);
  const EnergySectors sectors =
      classify_energy_sectors(basis, h, psi0, scenario.sequence.energy_tol);

  csv::Table table;
  table.header = {"k", "t_k", "energy_pre", "energy_post"};
  for (Index n = 0; n < scenario.dimension; ++n) {
    table.header.push_back("p_" + std::to_string(n));
  }
  double max_energy_jump = 0.0;
  double max_violating_population = 0.0;
  for (const TransitionRecord& record : result.records) {
    const double pre = energy_expectation(record.pre_density, h);
    const double post = energy_expectation(record.post_density, h);
    max_energy_jump = std::max(max_energy_jump, std::abs(post - pre));
    for (const Index n : sectors.violating) {
      max_violating_population =
          std::max(max_violating_population, record.populations(n));
    }
    std::vector<std::string> row = {fmt(static_cast<long long>(record.index)),
                                    fmt(record.time), fmt(pre), fmt(post)};
    for (Index n = 0; n < record.populations.size(); ++n) {
      row.push_back(fmt(record.populations(n)));
    }
    table.rows.push_back(std::move(row));
  }
  out.csv_file("transitions.csv", table);

  out.add("transitions", fmt(static_cast<long long>(result.records.size())));
  out.add("status", result.status == SequenceStatus::completed
                        ? "completed"
                        : "no further transitions");
  out.add("commuting", result.commuting ? "1" : "0");
  out.add("equal_spacing", result.equal_spacing ? "1" : "0");
  if (result.spacing) out.add("spacing", fmt(*result.spacing));
  out.add("max_energy_jump", fmt(max_energy_jump));
  out.add("max_violating_population", fmt(max_violating_population));

  if (options.plot && !result.records.empty()) {
    out.plot_title = scenario.name + ": populations after each transition";
    for (Index n = 0; n < scenario.dimension; ++n) {
      SvgSeries series;
      series.label = "p_" + std::to_string(n);
      for (const TransitionRecord& record : result.records) {
        series.x.push_back(record.time);
        series.y.push_back(record.populations(n));
      }
      out.plot_series.push_back(std::move(series));
    }
  }
}

// --------------------------- mode: markov -----------------------------------

void run_markov_mode(const Scenario& scenario, const RunOptions& options,
                     Outputs& out) {
  const HamiltonianOperator h(*scenario.hamiltonian);
  const MixtureBasis basis = scenario_basis(scenario);
  const StateVector psi0 = initial_state_vector(scenario);
  const MarkovParams& params = scenario.markov;
  const int steps = options.k_max.value_or(params.steps);

  const TransitionMatrix kernel = transition_matrix(h, basis, params.dt0);
  PopulationVector p = PopulationVector(born_probabilities(psi0, basis));

  csv::Table chain;
  chain.header = {"k", "t"};
  for (Index n = 0; n < scenario.dimension; ++n) {
    chain.header.push_back("p_" + std::to_string(n));
  }
  std::vector<RealVector> chain_values;
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) p = step_populations(kernel, p);
    chain_values.push_back(p.probabilities());
    std::vector<std::string> row = {fmt(static_cast<long long>(k)),
                                    fmt(k * params.dt0)};
    for (Index n = 0; n < scenario.dimension; ++n) {
      row.push_back(fmt(p.probabilities()(n)));
    }
    chain.rows.push_back(std::move(row));
  }
  out.csv_file("chain.csv", chain);

  const RateMatrix rates = rate_matrix(kernel);
  const double ode_dt = params.ode_dt > 0.0 ? params.ode_dt : params.dt0 / 20.0;
  const PauliSeries ode = pauli_integrate(
      rates, PopulationVector(born_probabilities(psi0, basis)),
      steps * params.dt0, ode_dt);

  csv::Table pauli;
  pauli.header = {"t"};
  for (Index n = 0; n < scenario.dimension; ++n) {
    pauli.header.push_back("p_" + std::to_string(n));
  }
  for (std::size_t i = 0; i < ode.times.size(); ++i) {
    std::vector<std::string> row = {fmt(ode.times[i])};
    for (Index n = 0; n < scenario.dimension; ++n) {
      row.push_back(fmt(ode.populations[i](n)));
    }
    pauli.rows.push_back(std::move(row));
  }
  out.csv_file("pauli.csv", pauli);

  // Chain vs ODE agreement at the chain sample times.
  double max_rel_dev = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double t_k = k * params.dt0;
    std::size_t nearest = 0;
    double best = std::abs(ode.times[0] - t_k);
    for (std::size_t i = 1; i < ode.times.size(); ++i) {
      const double distance = std::abs(ode.times[i] - t_k);
      if (distance < best) {
        best = distance;
        nearest = i;
      }
    }
    for (Index n = 0; n < scenario.dimension; ++n) {
      const double reference = ode.populations[nearest](n);
      if (reference > 1e-9) {
        max_rel_dev = std::max(
            max_rel_dev,
            std::abs(chain_values[static_cast<std::size_t>(k)](n) - reference) /
                reference);
      }
    }
  }

  const StationaryResult stationary =
      stationary_distribution(kernel, params.stat_tol, params.stat_max_iters);
  const EnergySectors sectors =
      classify_energy_sectors(basis, h, psi0, params.energy_tol);
  const bool balanced = detailed_balance_check(rates, stationary.distribution,
                                               sectors, params.balance_tol);

  out.add("steps", fmt(static_cast<long long>(steps)));
  out.add("stationary_residual", fmt(stationary.residual));
  out.add("stationary_iterations",
          fmt(static_cast<long long>(stationary.iterations)));
  out.add("stationary_converged", stationary.converged ? "1" : "0");
  out.add("detailed_balance", balanced ? "1" : "0");
  out.add("chain_vs_ode_max_rel_dev", fmt(max_rel_dev));

  if (options.plot) {
    out.plot_title = scenario.name + ": chain populations";
    for (Index n = 0; n < scenario.dimension; ++n) {
      SvgSeries series;
      series.label = "p_" + std::to_string(n);
      for (int k = 0; k <= steps; ++k) {
        series.x.push_back(k * params.dt0);
        series.y.push_back(chain_values[static_cast<std::size_t>(k)](n));
      }
      out.plot_series.push_back(std::move(series));
    }
  }

  if (!stationary.converged) {
    throw NonConvergenceError(
        "markov: stationary iteration did not reach tolerance (residual " +
        fmt(stationary.residual) + "); partial outputs retained");
  }
}

// --------------------------- mode: decay ------------------------------------

void run_decay_mode(const Scenario& scenario, const RunOptions& options,
                    Outputs& out) {
  const HamiltonianOperator h(*scenario.hamiltonian);
  const MixtureBasis basis = scenario_basis(scenario);
  const DecayParams& params = scenario.decay;
  const int k_max = options.k_max.value_or(params.k_max);

  DecayModel model =
      build_decay_model(h, basis, *scenario.initial_state, params.dt0);
  model.truncated = params.truncated;
  const std::vector<double> survival = survival_recurrence(model, k_max);

  csv::Table table;
  table.header = {"k", "t_k", "p_survival", "p_exponential", "rel_deviation"};
  for (int k = 0; k <= k_max; ++k) {
    const double t_k = k * params.dt0;
    const double reference =
        model.stable ? 1.0 : std::exp(-t_k / model.lifetime);
    const double deviation =
        std::abs(survival[static_cast<std::size_t>(k)] - reference) / reference;
    table.rows.push_back({fmt(static_cast<long long>(k)), fmt(t_k),
                          fmt(survival[static_cast<std::size_t>(k)]),
                          fmt(reference), fmt(deviation)});
  }
  out.csv_file("decay.csv", table);

  out.add("survival_amplitude_sq", fmt(model.survival_amplitude_sq));
  out.add("stable", model.stable ? "1" : "0");
  out.add("truncated", model.truncated ? "1" : "0");
  if (!model.stable) {
    const DeviationReport report = exponential_compare(model, k_max);
    out.add("tau", fmt(model.lifetime));
    out.add("dt_over_tau", fmt(report.dt_over_tau));
    out.add("max_rel_deviation", fmt(report.max_rel_deviation));
    out.add("within_validity", report.within_validity ? "1" : "0");
  }

  if (options.plot) {
    out.plot_title = scenario.name + ": survival probability";
    SvgSeries recurrence{"recurrence", {}, {}};
    SvgSeries exponential{"exp(-t/tau)", {}, {}};
    for (int k = 0; k <= k_max; ++k) {
      const double t_k = k * params.dt0;
      recurrence.x.push_back(t_k);
      recurrence.y.push_back(survival[static_cast<std::size_t>(k)]);
      exponential.x.push_back(t_k);
      exponential.y.push_back(model.stable ? 1.0 : std::exp(-t_k / model.lifetime));
    }
    out.plot_series.push_back(std::move(recurrence));
    out.plot_series.push_back(std::move(exponential));
  }
}

// --------------------------- mode: rabi -------------------------------------

void run_rabi_mode(const Scenario& scenario, const RunOptions& options,
                   Outputs& out) {
  const RabiParams& params = scenario.rabi;
  const RabiConfig config =
      RabiConfig::from_ratio(params.omega, params.ratio, params.initial_p1);
  const RabiSeries series =
      rabi_series(config, params.t_end, params.samples_per_segment);
  const RegimeInfo regime = classify_regime(config);

  csv::Table table;
  table.header = {"t", "p1", "segment_index", "is_transition_sample"};
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    table.rows.push_back(
        {fmt(series.times[i]), fmt(series.p1[i]),
         fmt(static_cast<long long>(series.segment_index[i])),
         series.is_transition_sample[i] ? "1" : "0"});
  }
  out.csv_file("rabi.csv", table);

  const char* regime_name = "damped";
  switch (regime.regime) {
    case RabiRegime::undamped: regime_name = "undamped"; break;
    case RabiRegime::period_two: regime_name = "period_two"; break;
    case RabiRegime::immediate_stationary:
      regime_name = "immediate_stationary";
      break;
    case RabiRegime::damped: regime_name = "damped"; break;
  }
  out.add("regime", regime_name);
  out.add("ratio", fmt(config.ratio));
  out.add("spacing", fmt(config.spacing));
  out.add("contraction", fmt(regime.contraction));
  out.add("transitions", fmt(static_cast<long long>(series.transition_times.size())));
  double tail_deviation = 0.0;
  for (std::size_t k = 1; k < series.post_transition_p1.size(); ++k) {
    tail_deviation =
        std::max(tail_deviation, std::abs(series.post_transition_p1[k] - 0.5));
  }
  out.add("tail_deviation_from_half", fmt(tail_deviation));

  if (options.plot) {
    out.plot_title = scenario.name + ": p1(t)";
    SvgSeries curve{"p1", series.times, series.p1};
    out.plot_series.push_back(std::move(curve));
    SvgSeries envelope{"post-transition", series.transition_times,
                       series.post_transition_p1};
    if (!envelope.x.empty()) out.plot_series.push_back(std::move(envelope));
  }
}

// --------------------------- mode: mc ---------------------------------------

void run_mc_mode(const Scenario& scenario, const RunOptions& options,
                 Outputs& out) {
  const HamiltonianOperator h(*scenario.hamiltonian);
  const MixtureBasis basis = scenario_basis(scenario);
  const StateVector psi0 = initial_state_vector(scenario);
  const McParams& params = scenario.mc;
  const int k_max = options.k_max.value_or(params.k_max);
  const std::uint64_t base_seed = options.seed.value_or(params.base_seed);

  Schedule schedule;
  if (params.schedule == McParams::ScheduleKind::fixed) {
    schedule = FixedSpacing{params.dt0};
  } else {
    FinderSchedule finder;
    finder.finder.t_lo = params.window_lo;
    finder.finder.t_hi = params.window_hi;
    finder.finder.grid_points = params.grid_points;
    finder.finder.amp_tol = params.amp_tol;
    finder.finder.pop_tol = params.pop_tol;
    finder.energy_tol = params.energy_tol;
    schedule = finder;
  }

  const EnsembleEstimate estimate =
      ensemble_populations(psi0, h, basis, schedule, k_max,
                           params.n_trajectories, base_seed, options.threads);

  // Exact chain oracle is available for fixed spacing.
  std::vector<RealVector> exact;
  if (params.schedule == McParams::ScheduleKind::fixed) {
    const TransitionMatrix kernel = transition_matrix(h, basis, params.dt0);
    PopulationVector p = PopulationVector(born_probabilities(psi0, basis));
    exact.push_back(p.probabilities());
    for (int k = 1; k <= k_max; ++k) {
      p = step_populations(kernel, p);
      exact.push_back(p.probabilities());
    }
  }

  csv::Table table;
  table.header = {"k", "t_k", "state_index", "p_hat", "stderr", "p_exact"};
  double max_abs_error = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    for (Index s = 0; s < scenario.dimension; ++s) {
      std::vector<std::string> row = {
          fmt(static_cast<long long>(k)),
          fmt(estimate.times[static_cast<std::size_t>(k)]),
          fmt(static_cast<long long>(s)), fmt(estimate.populations(k, s)),
          fmt(estimate.standard_errors(k, s))};
      if (!exact.empty()) {
        const double reference = exact[static_cast<std::size_t>(k)](s);
        row.push_back(fmt(reference));
        max_abs_error = std::max(
            max_abs_error, std::abs(estimate.populations(k, s) - reference));
      } else {
        row.push_back("nan");
      }
      table.rows.push_back(std::move(row));
    }
  }
  out.csv_file("ensemble.csv", table);

  out.add("n_trajectories", fmt(static_cast<long long>(params.n_trajectories)));
  out.add("base_seed", std::to_string(base_seed));
  out.add("generator", estimate.generator);
  out.add("k_max", fmt(static_cast<long long>(k_max)));
  if (!exact.empty()) out.add("max_abs_error", fmt(max_abs_error));

  if (options.plot) {
    out.plot_title = scenario.name + ": ensemble populations";
    for (Index s = 0; s < scenario.dimension; ++s) {
      SvgSeries series;
      series.label = "p_hat_" + std::to_string(s);
      for (int k = 0; k <= k_max; ++k) {
        series.x.push_back(estimate.times[static_cast<std::size_t>(k)]);
        series.y.push_back(estimate.populations(k, s));
      }
      out.plot_series.push_back(std::move(series));
    }
  }
}

}  // namespace

// --------------------------- report -----------------------------------------

std::string RunReport::summary_text() const {
  std::ostringstream out;
  out << "scenario = " << scenario_name << "\n";
  out << "mode = " << mode << "\n";
  out << "version = " << version << "\n";
  for (const auto& [key, value] : summary) out << key << " = " << value << "\n";
  return out.str();
}

std::optional<std::string> RunReport::value(const std::string& key) const {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  return std::nullopt;
}

RunReport run(const Scenario& scenario, const RunOptions& options) {
  Outputs out;
  out.report.scenario_name = scenario.name;
  out.report.mode = to_string(scenario.mode);
  out.dir = options.out_dir;
  std::filesystem::create_directories(out.dir);

  // The run directory is self-contained: the canonical scenario plus the
  // CSVs are enough to recompute every summary number.
  const fs::path scenario_path = out.dir / "scenario.scn";
  std::ofstream scenario_file(scenario_path, std::ios::binary);
  scenario_file << emit_scenario(scenario);
  out.report.files.push_back(scenario_path);

  auto finalize = [&] {
    if (options.plot && !out.plot_series.empty()) {
      const fs::path path = out.dir / "plot.svg";
      write_svg(path, out.plot_title, out.plot_series);
      out.report.files.push_back(path);
    }
    const fs::path summary_path = out.dir / "summary.txt";
    std::ofstream summary(summary_path, std::ios::binary);
    summary << out.report.summary_text();
    out.report.files.push_back(summary_path);
  };

  try {
    switch (scenario.mode) {
      case Mode::sequence: run_sequence_mode(scenario, options, out); break;
      case Mode::markov: run_markov_mode(scenario, options, out); break;
      case Mode::decay: run_decay_mode(scenario, options, out); break;
      case Mode::rabi: run_rabi_mode(scenario, options, out); break;
      case Mode::mc: run_mc_mode(scenario, options, out); break;
    }
  } catch (...) {
    // Keep whatever was produced, plus the summary collected so far.
    finalize();
    throw;
  }
  finalize();
  return out.report;
}

}  // namespace qjump
