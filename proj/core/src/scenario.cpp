#include "qjump/scenario.hpp"

#include "qjump/csv.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace qjump {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::sequence: return "sequence";
    case Mode::markov: return "markov";
    case Mode::decay: return "decay";
    case Mode::rabi: return "rabi";
    case Mode::mc: return "mc";
  }
  return "unknown";
}

namespace {

bool equal_matrices(const std::optional<Matrix>& a, const std::optional<Matrix>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  if (a->rows() != b->rows() || a->cols() != b->cols()) return false;
  return (a->array() == b->array()).all();
}

bool equal_vectors(const std::optional<Vector>& a, const std::optional<Vector>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  if (a->size() != b->size()) return false;
  return (a->array() == b->array()).all();
}

}  // namespace

bool operator==(const Scenario& a, const Scenario& b) {
  return a.name == b.name && a.mode == b.mode && a.dimension == b.dimension &&
         equal_matrices(a.hamiltonian, b.hamiltonian) &&
         equal_matrices(a.basis, b.basis) && a.initial_state == b.initial_state &&
         equal_vectors(a.initial_amplitudes, b.initial_amplitudes) &&
         a.sequence == b.sequence && a.markov == b.markov && a.decay == b.decay &&
         a.rabi == b.rabi && a.mc == b.mc;
}

// --------------------------- Parser ------------------------------------------

namespace {

struct Cursor {
  std::string source;
  int line = 0;

  [[noreturn]] void fail(const std::string& message) const {
    throw ScenarioParseError(source + ":" + std::to_string(line) + ": " + message);
  }
};

std::string strip(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t");
  return text.substr(begin, end - begin + 1);
}

double parse_double(const std::string& token, const Cursor& at) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (token.empty() || end != begin + token.size()) {
    at.fail("malformed number '" + token + "'");
  }
  return value;
}

long long parse_integer(const std::string& token, const Cursor& at) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const long long value = std::strtoll(begin, &end, 10);
  if (token.empty() || end != begin + token.size()) {
    at.fail("malformed integer '" + token + "'");
  }
  return value;
}

bool parse_bool(const std::string& token, const Cursor& at) {
  if (token == "true") return true;
  if (token == "false") return false;
  at.fail("expected true/false, got '" + token + "'");
}

// Entry forms: bare real `x`, or complex pair `(re,im)` with no spaces.
Complex parse_entry(const std::string& token, const Cursor& at) {
  if (!token.empty() && token.front() == '(') {
    if (token.back() != ')') at.fail("unterminated complex entry '" + token + "'");
    const auto comma = token.find(',');
    if (comma == std::string::npos) {
      at.fail("complex entry needs (re,im): '" + token + "'");
    }
    const double re = parse_double(token.substr(1, comma - 1), at);
    const double im = parse_double(token.substr(comma + 1, token.size() - comma - 2), at);
    return Complex(re, im);
  }
  return Complex(parse_double(token, at), 0.0);
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream stream(text);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

Mode parse_mode(const std::string& token, const Cursor& at) {
  if (token == "sequence") return Mode::sequence;
  if (token == "markov") return Mode::markov;
  if (token == "decay") return Mode::decay;
  if (token == "rabi") return Mode::rabi;
  if (token == "mc") return Mode::mc;
  at.fail("unknown mode '" + token + "'");
}

struct RawMatrix {
  std::vector<std::vector<Complex>> rows;
  std::vector<int> row_lines;
};

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& source) {
  Scenario scenario;
  Cursor at{source, 0};

  bool saw_any_statement = false;
  bool saw_mode = false;
  std::string section;  // "", "hamiltonian", "basis"
  RawMatrix hamiltonian_rows;
  RawMatrix basis_rows;
  std::map<std::string, int> seen;  // key → line, duplicate detection

  std::istringstream stream(text);
  std::string raw_line;
  while (std::getline(stream, raw_line)) {
    ++at.line;
    const auto comment = raw_line.find('#');
    if (comment != std::string::npos) raw_line.erase(comment);
    const std::string line = strip(raw_line);
    if (line.empty()) continue;
    saw_any_statement = true;

    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = line.substr(1, line.size() - 2);
      if (section != "hamiltonian" && section != "basis") {
        at.fail("unknown section [" + section + "]");
      }
      continue;
    }

    const auto equals = line.find('=');
    if (equals == std::string::npos) at.fail("expected 'key = value'");
    const std::string key = strip(line.substr(0, equals));
    const std::string value = strip(line.substr(equals + 1));
    if (key.empty()) at.fail("empty key");
    if (value.empty()) at.fail("empty value for key '" + key + "'");

    if (key == "row") {
      if (section.empty()) at.fail("'row' outside a matrix section");
      RawMatrix& target = section == "hamiltonian" ? hamiltonian_rows : basis_rows;
      std::vector<Complex> entries;
      for (const std::string& token : split_tokens(value)) {
        entries.push_back(parse_entry(token, at));
      }
      target.rows.push_back(std::move(entries));
      target.row_lines.push_back(at.line);
      continue;
    }
    section.clear();  // a non-row key ends the matrix section

    if (const auto [it, inserted] = seen.emplace(key, at.line); !inserted) {
      at.fail("duplicate key '" + key + "' (first on line " +
              std::to_string(it->second) + ")");
    }

    if (key == "name") {
      scenario.name = value;
    } else if (key == "mode") {
      scenario.mode = parse_mode(value, at);
      saw_mode = true;
    } else if (key == "dimension") {
      scenario.dimension = static_cast<Index>(parse_integer(value, at));
    } else if (key == "initial_state") {
      scenario.initial_state = static_cast<Index>(parse_integer(value, at));
    } else if (key == "initial_amplitudes") {
      const auto tokens = split_tokens(value);
      Vector amplitudes(static_cast<Index>(tokens.size()));
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        amplitudes(static_cast<Index>(i)) = parse_entry(tokens[i], at);
      }
      scenario.initial_amplitudes = std::move(amplitudes);
    }
    // sequence
    else if (key == "k_max") {
      const int k = static_cast<int>(parse_integer(value, at));
      scenario.sequence.k_max = k;
      scenario.decay.k_max = k;
      scenario.mc.k_max = k;
    } else if (key == "window_lo") {
      scenario.sequence.window_lo = scenario.mc.window_lo = parse_double(value, at);
    } else if (key == "window_hi") {
      scenario.sequence.window_hi = scenario.mc.window_hi = parse_double(value, at);
    } else if (key == "grid_points") {
      const int g = static_cast<int>(parse_integer(value, at));
      scenario.sequence.grid_points = scenario.mc.grid_points = g;
    } else if (key == "amp_tol") {
      scenario.sequence.amp_tol = scenario.mc.amp_tol = parse_double(value, at);
    } else if (key == "energy_tol") {
      const double tol = parse_double(value, at);
      scenario.sequence.energy_tol = scenario.markov.energy_tol =
          scenario.mc.energy_tol = tol;
    } else if (key == "pop_tol") {
      scenario.sequence.pop_tol = scenario.mc.pop_tol = parse_double(value, at);
    } else if (key == "timing_tol_rel") {
      scenario.sequence.timing_tol_rel = parse_double(value, at);
    }
    // markov / decay shared spacing
    else if (key == "dt0") {
      const double dt0 = parse_double(value, at);
      scenario.markov.dt0 = scenario.decay.dt0 = scenario.mc.dt0 = dt0;
    } else if (key == "steps") {
      scenario.markov.steps = static_cast<int>(parse_integer(value, at));
    } else if (key == "ode_dt") {
      scenario.markov.ode_dt = parse_double(value, at);
    } else if (key == "stat_tol") {
      scenario.markov.stat_tol = parse_double(value, at);
    } else if (key == "stat_max_iters") {
      scenario.markov.stat_max_iters = static_cast<int>(parse_integer(value, at));
    } else if (key == "balance_tol") {
      scenario.markov.balance_tol = parse_double(value, at);
    } else if (key == "truncated") {
      scenario.decay.truncated = parse_bool(value, at);
    }
    // rabi
    else if (key == "omega") {
      scenario.rabi.omega = parse_double(value, at);
    } else if (key == "ratio") {
      scenario.rabi.ratio = parse_double(value, at);
    } else if (key == "initial_p1") {
      scenario.rabi.initial_p1 = parse_double(value, at);
    } else if (key == "t_end") {
      scenario.rabi.t_end = parse_double(value, at);
    } else if (key == "samples_per_segment") {
      scenario.rabi.samples_per_segment = static_cast<int>(parse_integer(value, at));
    }
    // mc
    else if (key == "schedule") {
      if (value == "fixed") {
        scenario.mc.schedule = McParams::ScheduleKind::fixed;
      } else if (value == "finder") {
        scenario.mc.schedule = McParams::ScheduleKind::finder;
      } else {
        at.fail("schedule must be fixed or finder, got '" + value + "'");
      }
    } else if (key == "n_trajectories") {
      scenario.mc.n_trajectories = static_cast<int>(parse_integer(value, at));
    } else if (key == "base_seed") {
      scenario.mc.base_seed = static_cast<std::uint64_t>(parse_integer(value, at));
    } else {
      at.fail("unknown key '" + key + "'");
    }
  }

  at.line = 0;
  if (!saw_any_statement) at.fail("empty scenario");
  if (scenario.name.empty()) at.fail("missing required key 'name'");
  if (!saw_mode) at.fail("missing required key 'mode'");

  // ---- assemble and validate matrices --------------------------------------
  if (scenario.mode == Mode::rabi) {
    if (scenario.dimension == 0) scenario.dimension = 2;
    if (scenario.dimension != 2) at.fail("rabi mode is two-level");
    if (!hamiltonian_rows.rows.empty()) {
      at.fail("rabi mode takes omega/ratio, not a [hamiltonian] section");
    }
  } else {
    if (scenario.dimension <= 0) at.fail("missing required key 'dimension'");
    if (hamiltonian_rows.rows.empty()) at.fail("missing [hamiltonian] section");
  }

  auto assemble = [&](const RawMatrix& raw, const char* what) {
    const Index d = scenario.dimension;
    if (static_cast<Index>(raw.rows.size()) != d) {
      at.fail(std::string(what) + " needs " + std::to_string(d) + " rows, got " +
              std::to_string(raw.rows.size()));
    }
    Matrix m(d, d);
    for (Index r = 0; r < d; ++r) {
      const auto& row = raw.rows[static_cast<std::size_t>(r)];
      if (static_cast<Index>(row.size()) != d) {
        Cursor row_at{at.source, raw.row_lines[static_cast<std::size_t>(r)]};
        row_at.fail(std::string(what) + " row needs " + std::to_string(d) +
                    " entries, got " + std::to_string(row.size()));
      }
      for (Index c = 0; c < d; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
    return m;
  };

  if (!hamiltonian_rows.rows.empty()) {
    Matrix h = assemble(hamiltonian_rows, "[hamiltonian]");
    for (Index r = 0; r < h.rows(); ++r) {
      for (Index c = 0; c < h.cols(); ++c) {
        if (std::abs(h(r, c) - std::conj(h(c, r))) > tol::kHermiticity) {
          Cursor entry_at{at.source,
                          hamiltonian_rows.row_lines[static_cast<std::size_t>(r)]};
          entry_at.fail("[hamiltonian] is not Hermitian at entry (" +
                        std::to_string(r) + "," + std::to_string(c) + ")");
        }
      }
    }
    scenario.hamiltonian = std::move(h);
  }
  if (!basis_rows.rows.empty()) {
    // Rows in the file are the basis vectors; store them as columns.
    Matrix b = assemble(basis_rows, "[basis]").transpose();
    try {
      const MixtureBasis probe(b);
      static_cast<void>(probe);
    } catch (const std::invalid_argument& error) {
      at.fail(std::string("[basis] rejected: ") + error.what());
    }
    scenario.basis = std::move(b);
  }

  // ---- initial state --------------------------------------------------------
  if (scenario.initial_state && scenario.initial_amplitudes) {
    at.fail("give either initial_state or initial_amplitudes, not both");
  }
  if (scenario.mode != Mode::rabi) {
    if (!scenario.initial_state && !scenario.initial_amplitudes) {
      at.fail("missing initial_state (or initial_amplitudes)");
    }
    if (scenario.initial_state &&
        (*scenario.initial_state < 0 || *scenario.initial_state >= scenario.dimension)) {
      at.fail("initial_state out of range");
    }
    if (scenario.initial_amplitudes &&
        scenario.initial_amplitudes->size() != scenario.dimension) {
      at.fail("initial_amplitudes needs exactly 'dimension' entries");
    }
  }
  return scenario;
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScenarioParseError(path.string() + ": cannot open file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path.filename().string());
}

// --------------------------- Emitter ----------------------------------------

namespace {

std::string entry_text(const Complex& value) {
  return "(" + csv::format_double(value.real()) + "," +
         csv::format_double(value.imag()) + ")";
}

void emit_matrix(std::ostringstream& out, const char* section, const Matrix& m,
                 bool rows_are_vectors) {
  out << "[" << section << "]\n";
  const Matrix view = rows_are_vectors ? Matrix(m.transpose()) : m;
  for (Index r = 0; r < view.rows(); ++r) {
    out << "row =";
    for (Index c = 0; c < view.cols(); ++c) out << " " << entry_text(view(r, c));
    out << "\n";
  }
}

}  // namespace

std::string emit_scenario(const Scenario& s) {
  std::ostringstream out;
  const auto d = [&](double v) { return csv::format_double(v); };
  out << "name = " << s.name << "\n";
  out << "mode = " << to_string(s.mode) << "\n";
  if (s.mode != Mode::rabi) out << "dimension = " << s.dimension << "\n";
  if (s.hamiltonian) emit_matrix(out, "hamiltonian", *s.hamiltonian, false);
  if (s.basis) emit_matrix(out, "basis", *s.basis, true);
  if (s.initial_state) out << "initial_state = " << *s.initial_state << "\n";
  if (s.initial_amplitudes) {
    out << "initial_amplitudes =";
    for (Index i = 0; i < s.initial_amplitudes->size(); ++i) {
      out << " " << entry_text((*s.initial_amplitudes)(i));
    }
    out << "\n";
  }
  switch (s.mode) {
    case Mode::sequence:
      out << "k_max = " << s.sequence.k_max << "\n";
      out << "window_lo = " << d(s.sequence.window_lo) << "\n";
      out << "window_hi = " << d(s.sequence.window_hi) << "\n";
      out << "grid_points = " << s.sequence.grid_points << "\n";
      out << "amp_tol = " << d(s.sequence.amp_tol) << "\n";
      out << "energy_tol = " << d(s.sequence.energy_tol) << "\n";
      out << "pop_tol = " << d(s.sequence.pop_tol) << "\n";
      out << "timing_tol_rel = " << d(s.sequence.timing_tol_rel) << "\n";
      break;
    case Mode::markov:
      out << "dt0 = " << d(s.markov.dt0) << "\n";
      out << "steps = " << s.markov.steps << "\n";
      out << "ode_dt = " << d(s.markov.ode_dt) << "\n";
      out << "stat_tol = " << d(s.markov.stat_tol) << "\n";
      out << "stat_max_iters = " << s.markov.stat_max_iters << "\n";
      out << "energy_tol = " << d(s.markov.energy_tol) << "\n";
      out << "balance_tol = " << d(s.markov.balance_tol) << "\n";
      break;
    case Mode::decay:
      out << "dt0 = " << d(s.decay.dt0) << "\n";
      out << "k_max = " << s.decay.k_max << "\n";
      out << "truncated = " << (s.decay.truncated ? "true" : "false") << "\n";
      break;
    case Mode::rabi:
      out << "omega = " << d(s.rabi.omega) << "\n";
      out << "ratio = " << d(s.rabi.ratio) << "\n";
      out << "initial_p1 = " << d(s.rabi.initial_p1) << "\n";
      out << "t_end = " << d(s.rabi.t_end) << "\n";
      out << "samples_per_segment = " << s.rabi.samples_per_segment << "\n";
      break;
    case Mode::mc:
      out << "schedule = "
          << (s.mc.schedule == McParams::ScheduleKind::fixed ? "fixed" : "finder")
          << "\n";
      out << "dt0 = " << d(s.mc.dt0) << "\n";
      out << "k_max = " << s.mc.k_max << "\n";
      out << "n_trajectories = " << s.mc.n_trajectories << "\n";
      out << "base_seed = " << s.mc.base_seed << "\n";
      out << "window_lo = " << d(s.mc.window_lo) << "\n";
      out << "window_hi = " << d(s.mc.window_hi) << "\n";
      out << "grid_points = " << s.mc.grid_points << "\n";
      out << "amp_tol = " << d(s.mc.amp_tol) << "\n";
      out << "pop_tol = " << d(s.mc.pop_tol) << "\n";
      out << "energy_tol = " << d(s.mc.energy_tol) << "\n";
      break;
  }
  return out.str();
}

// --------------------------- Presets ----------------------------------------

namespace {

const std::map<std::string, const char*>& preset_table() {
  static const std::map<std::string, const char*> presets = {
      {"fig2a",
       "name = fig2a\n"
       "mode = rabi\n"
       "omega = 1\n"
       "ratio = 0.43\n"
       "initial_p1 = 0\n"
       "t_end = 30\n"
       "samples_per_segment = 60\n"},
      {"fig2b",
       "name = fig2b\n"
       "mode = rabi\n"
       "omega = 1\n"
       "ratio = 0.38\n"
       "initial_p1 = 0\n"
       "t_end = 30\n"
       "samples_per_segment = 60\n"},
      {"undamped",
       "name = undamped\n"
       "mode = rabi\n"
       "omega = 1\n"
       "ratio = 0.5\n"
       "initial_p1 = 0\n"
       "t_end = 62.83185307179586\n"  // 20π/Ω
       "samples_per_segment = 64\n"},
      {"quarter",
       // Post-transition map alternates p ↔ 1−p: period-two envelope.
       "name = quarter\n"
       "mode = rabi\n"
       "omega = 1\n"
       "ratio = 0.25\n"
       "initial_p1 = 0\n"
       "t_end = 30\n"
       "samples_per_segment = 60\n"},
      {"eighth",
       // Contraction 0: stationary at 1/2 right after the first transition.
       "name = eighth\n"
       "mode = rabi\n"
       "omega = 1\n"
       "ratio = 0.125\n"
       "initial_p1 = 0\n"
       "t_end = 30\n"
       "samples_per_segment = 60\n"},
      {"demo3",
       // Degenerate doublet coupled at 1, third level detuned by 5 with weak
       // coupling 0.05: transitions fire when the leak amplitude vanishes.
       "name = demo3\n"
       "mode = sequence\n"
       "dimension = 3\n"
       "[hamiltonian]\n"
       "row = 0 1 0.05\n"
       "row = 1 0 0.05\n"
       "row = 0.05 0.05 5\n"
       "initial_state = 0\n"
       "k_max = 5\n"
       "window_lo = 0\n"
       "window_hi = 3\n"
       "grid_points = 2000\n"
       "amp_tol = 1e-8\n"
       "energy_tol = 1e-9\n"
       "pop_tol = 1e-9\n"
       "timing_tol_rel = 1e-6\n"},
      {"decay-small-dt",
       // Coupling chosen so Δt₀/τ = sin²(gΔt₀) = 0.01 exactly at Δt₀ = 0.1.
       "name = decay-small-dt\n"
       "mode = decay\n"
       "dimension = 2\n"
       "[hamiltonian]\n"
       "row = 0 1.0016742116155979\n"
       "row = 1.0016742116155979 0\n"
       "initial_state = 0\n"
       "dt0 = 0.1\n"
       "k_max = 500\n"
       "truncated = true\n"},
      {"markov-random-d4",
       "name = markov-random-d4\n"
       "mode = markov\n"
       "dimension = 4\n"
       "[hamiltonian]\n"
       "row = 0 0.3 0.2 0.1\n"
       "row = 0.3 0 0.25 0.15\n"
       "row = 0.2 0.25 0 0.35\n"
       "row = 0.1 0.15 0.35 0\n"
       "initial_state = 0\n"
       "dt0 = 0.4\n"
       "steps = 200\n"
       "ode_dt = 0.02\n"
       "stat_tol = 1e-12\n"
       "stat_max_iters = 200000\n"
       "energy_tol = 1e-9\n"
       "balance_tol = 1e-9\n"},
      {"mc-2level",
       // The fig2a kernel: Δt₀ = 0.43·2π at Ω = 1, excited start.
       "name = mc-2level\n"
       "mode = mc\n"
       "dimension = 2\n"
       "[hamiltonian]\n"
       "row = 0 1\n"
       "row = 1 0\n"
       "initial_state = 1\n"
       "schedule = fixed\n"
       "dt0 = 2.701769682087222\n"
       "k_max = 10\n"
       "n_trajectories = 10000\n"
       "base_seed = 12345\n"},
  };
  return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : preset_table()) names.push_back(name);
  return names;
}

bool is_preset(const std::string& name) {
  return preset_table().count(name) > 0;
}

Scenario preset_scenario(const std::string& name) {
  const auto it = preset_table().find(name);
  if (it == preset_table().end()) {
    throw ScenarioParseError("unknown preset '" + name + "'");
  }
  return parse_scenario_text(it->second, "preset:" + name);
}

Scenario load_scenario(const std::string& preset_or_path) {
  if (is_preset(preset_or_path)) return preset_scenario(preset_or_path);
  if (!std::filesystem::exists(preset_or_path)) {
    throw ScenarioParseError("'" + preset_or_path +
                             "' is neither a preset nor an existing file");
  }
  return parse_scenario(preset_or_path);
}

}  // namespace qjump
