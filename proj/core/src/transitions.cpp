#include "qjump/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace qjump {

// --------------------------- Energy sectors ---------------------------------

EnergySectors classify_energy_sectors(const MixtureBasis& basis,
                                      const HamiltonianOperator& h,
                                      const StateVector& psi0,
                                      double energy_tol) {
  if (basis.dim() != h.dim() || psi0.dim() != h.dim()) {
    throw std::invalid_argument("classify_energy_sectors: dimension mismatch");
  }
  if (energy_tol <= 0.0) {
    throw std::invalid_argument("classify_energy_sectors: energy_tol must be positive");
  }
  EnergySectors sectors;
  sectors.reference_energy = energy_expectation(psi0, h);
  sectors.energy_tol = energy_tol * std::max(1.0, h.spectral_range());

  const Matrix hb = basis.vectors().adjoint() * h.matrix() * basis.vectors();
  for (Index n = 0; n < basis.dim(); ++n) {
    const double diag_energy = hb(n, n).real();
    if (std::abs(diag_energy - sectors.reference_energy) <= sectors.energy_tol) {
      sectors.conserving.push_back(n);
    } else {
      sectors.violating.push_back(n);
    }
  }
  return sectors;
}

// --------------------------- Collapse ---------------------------------------

RealVector born_probabilities(const StateVector& psi, const MixtureBasis& basis) {
  if (psi.dim() != basis.dim()) {
    throw std::invalid_argument("born_probabilities: dimension mismatch");
  }
  const Vector overlaps = basis.vectors().adjoint() * psi.amplitudes();
  return overlaps.cwiseAbs2();
}

DensityMatrix collapse_pure(const StateVector& psi, const MixtureBasis& basis) {
  return basis.diagonal_density(born_probabilities(psi, basis));
}

RealVector mixture_populations(const DensityMatrix& w, const MixtureBasis& basis) {
  if (w.dim() != basis.dim()) {
    throw std::invalid_argument("mixture_populations: dimension mismatch");
  }
  if (basis.is_standard()) {
    return w.matrix().diagonal().real();
  }
  RealVector p(basis.dim());
  for (Index n = 0; n < basis.dim(); ++n) {
    p(n) = (basis.vector(n).adjoint() * w.matrix() * basis.vector(n))(0, 0).real();
  }
  return p;
}

DensityMatrix collapse_mixture(const DensityMatrix& w, const MixtureBasis& basis) {
  return basis.diagonal_density(mixture_populations(w, basis));
}

bool is_pure_transition(const StateVector& psi, const MixtureBasis& basis,
                        double pop_tol) {
  const RealVector p = born_probabilities(psi, basis);
  int above = 0;
  double largest = 0.0;
  for (Index n = 0; n < p.size(); ++n) {
    if (p(n) > pop_tol) ++above;
    largest = std::max(largest, p(n));
  }
  return above == 1 && largest > 1.0 - pop_tol;
}

bool commuting_check(const DensityMatrix& w_a, const DensityMatrix& w_b,
                     double tol) {
  if (w_a.dim() != w_b.dim()) {
    throw std::invalid_argument("commuting_check: dimension mismatch");
  }
  const Matrix commutator =
      w_a.matrix() * w_b.matrix() - w_b.matrix() * w_a.matrix();
  return max_abs(commutator) < tol;
}

// --------------------------- Timing finder ----------------------------------

namespace {

// Violating amplitudes as sums over eigenmodes:
//   ⟨γ_n|U(t)|source_s⟩ = Σ_k coeffs(row(n,s), k) · exp(−iλ_k t)
// so each evaluation costs O(rows·d) after an O(d³) setup.
struct AmplitudeTable {
  Matrix coeffs;       // one row per (violating state, source) pair
  RealVector lambdas;  // eigenvalues of H

  double max_sq_amplitude(double t) const {
    double worst = 0.0;
    for (Index r = 0; r < coeffs.rows(); ++r) {
      Complex amp(0.0, 0.0);
      for (Index k = 0; k < lambdas.size(); ++k) {
        amp += coeffs(r, k) * std::exp(Complex(0.0, -lambdas(k) * t));
      }
      worst = std::max(worst, std::norm(amp));
    }
    return worst;
  }
};

// Population of each basis state after evolving the source for time t:
//   pure source ψ:   p_n(t) = |⟨γ_n|U(t)|ψ⟩|²
//   mixture source:  p_n(t) = Σ_m |⟨γ_n|U(t)|γ_m⟩|² p_m
struct PopulationTable {
  Matrix basis_modes;       // A = B† V
  RealVector lambdas;
  Vector pure_coeffs;       // V† ψ (pure source) — empty for mixtures
  RealVector source_pops;   // mixture populations — empty for pure source

  RealVector populations(double t) const {
    const Index d = basis_modes.rows();
    Vector phases(lambdas.size());
    for (Index k = 0; k < lambdas.size(); ++k) {
      phases(k) = std::exp(Complex(0.0, -lambdas(k) * t));
    }
    if (pure_coeffs.size() > 0) {
      const Vector amps = basis_modes * phases.cwiseProduct(pure_coeffs).eval();
      return amps.cwiseAbs2();
    }
    RealVector p = RealVector::Zero(d);
    const Matrix evolved = basis_modes * phases.asDiagonal() * basis_modes.adjoint();
    for (Index n = 0; n < d; ++n) {
      for (Index m = 0; m < d; ++m) {
        if (source_pops(m) > 0.0) {
          p(n) += std::norm(evolved(n, m)) * source_pops(m);
        }
      }
    }
    return p;
  }
};

bool resulting_mixture_is_singleton(const PopulationTable& pops, double t,
                                    double pop_tol) {
  const RealVector p = pops.populations(t);
  int above = 0;
  double largest = 0.0;
  for (Index n = 0; n < p.size(); ++n) {
    if (p(n) > pop_tol) ++above;
    largest = std::max(largest, p(n));
  }
  return above == 1 && largest > 1.0 - pop_tol;
}

// Golden-section minimization on [a, b]; the objective is non-negative with
// touching minima, so sign-change bracketing does not apply.
double golden_section_min(const AmplitudeTable& table, double a, double b,
                          int iterations) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = table.max_sq_amplitude(x1);
  double f2 = table.max_sq_amplitude(x2);
  for (int i = 0; i < iterations && (b - a) > 1e-15 * std::max(1.0, std::abs(b));
       ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = table.max_sq_amplitude(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = table.max_sq_amplitude(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

struct FinderProblem {
  AmplitudeTable amplitudes;
  PopulationTable populations;
  bool vacuous = false;
};

FinderProblem build_problem(const HamiltonianOperator& h, const MixtureBasis& basis,
                            const EnergySectors& sectors,
                            const StateVector* pure_source,
                            const DensityMatrix* mixture_source, double pop_tol) {
  FinderProblem problem;
  if (sectors.violating.empty()) {
    problem.vacuous = true;
    return problem;
  }
  const Eigensystem& sys = h.eigensystem();
  const Matrix basis_modes = basis.vectors().adjoint() * sys.eigenvectors;
  const Index d = h.dim();

  problem.populations.basis_modes = basis_modes;
  problem.populations.lambdas = sys.eigenvalues;

  std::vector<Index> sources;
  Vector pure_coeffs;
  if (pure_source != nullptr) {
    pure_coeffs = sys.eigenvectors.adjoint() * pure_source->amplitudes();
    problem.populations.pure_coeffs = pure_coeffs;
  } else {
    const RealVector pops = mixture_populations(*mixture_source, basis);
    problem.populations.source_pops = pops;
    for (Index m = 0; m < d; ++m) {
      if (pops(m) > pop_tol) sources.push_back(m);
    }
  }

  const Index n_sources =
      pure_source != nullptr ? 1 : static_cast<Index>(sources.size());
  problem.amplitudes.lambdas = sys.eigenvalues;
  problem.amplitudes.coeffs.resize(
      static_cast<Index>(sectors.violating.size()) * n_sources, d);

  Index row = 0;
  for (const Index n : sectors.violating) {
    if (pure_source != nullptr) {
      for (Index k = 0; k < d; ++k) {
        problem.amplitudes.coeffs(row, k) = basis_modes(n, k) * pure_coeffs(k);
      }
      ++row;
    } else {
      for (const Index m : sources) {
        for (Index k = 0; k < d; ++k) {
          problem.amplitudes.coeffs(row, k) =
              basis_modes(n, k) * std::conj(basis_modes(m, k));
        }
        ++row;
      }
    }
  }
  return problem;
}

TimingResult find_time(const FinderProblem& problem, const FinderConfig& cfg) {
  if (cfg.grid_points < 100) {
    throw std::invalid_argument("find_transition_time: grid_points must be >= 100");
  }
  if (!(cfg.t_lo >= 0.0) || !(cfg.t_hi > cfg.t_lo)) {
    throw std::invalid_argument("find_transition_time: invalid window");
  }
  if (problem.vacuous) {
    return TimingResult{TimingStatus::vacuous, 0.0};
  }

  const int n = cfg.grid_points;
  const double step = (cfg.t_hi - cfg.t_lo) / n;
  std::vector<double> values(static_cast<std::size_t>(n) + 1);
  double grid_max = 0.0;
  for (int i = 0; i <= n; ++i) {
    values[static_cast<std::size_t>(i)] =
        problem.amplitudes.max_sq_amplitude(cfg.t_lo + i * step);
    grid_max = std::max(grid_max, values[static_cast<std::size_t>(i)]);
  }

  const double accept = cfg.amp_tol * cfg.amp_tol;
  // Condition identically satisfied over the whole window: timing undefined,
  // same as an empty violating sector.
  if (grid_max < accept) {
    return TimingResult{TimingStatus::vacuous, 0.0};
  }

  const double coarse = std::max(accept, cfg.coarse_fraction * grid_max);
  const double exclusion = cfg.t_lo + step;  // the t = 0 solution is prohibited

  for (int i = 1; i < n; ++i) {
    const double f = values[static_cast<std::size_t>(i)];
    if (f > coarse) continue;
    if (f > values[static_cast<std::size_t>(i) - 1] ||
        f > values[static_cast<std::size_t>(i) + 1]) {
      continue;  // not a local minimum
    }
    const double lo = cfg.t_lo + (i - 1) * step;
    const double hi = cfg.t_lo + (i + 1) * step;
    const double t_star = golden_section_min(problem.amplitudes, lo, hi,
                                             cfg.refine_iterations);
    if (problem.amplitudes.max_sq_amplitude(t_star) >= accept) continue;
    if (t_star <= exclusion) continue;
    if (resulting_mixture_is_singleton(problem.populations, t_star, cfg.pop_tol)) {
      continue;  // a transition to a single state is not stochastic
    }
    return TimingResult{TimingStatus::found, t_star};
  }
  return TimingResult{TimingStatus::none, 0.0};
}

}  // namespace

TimingResult find_transition_time(const StateVector& psi, const HamiltonianOperator& h,
                                  const MixtureBasis& basis,
                                  const EnergySectors& sectors,
                                  const FinderConfig& cfg) {
  if (psi.dim() != h.dim() || basis.dim() != h.dim()) {
    throw std::invalid_argument("find_transition_time: dimension mismatch");
  }
  return find_time(build_problem(h, basis, sectors, &psi, nullptr, cfg.pop_tol), cfg);
}

TimingResult find_transition_time(const DensityMatrix& w, const HamiltonianOperator& h,
                                  const MixtureBasis& basis,
                                  const EnergySectors& sectors,
                                  const FinderConfig& cfg) {
  if (w.dim() != h.dim() || basis.dim() != h.dim()) {
    throw std::invalid_argument("find_transition_time: dimension mismatch");
  }
  return find_time(build_problem(h, basis, sectors, nullptr, &w, cfg.pop_tol), cfg);
}

// --------------------------- Sequence runs ----------------------------------

SequenceResult run_sequence(const StateVector& psi0, const HamiltonianOperator& h,
                            const MixtureBasis& basis, int k_max,
                            const SequenceConfig& cfg) {
  if (k_max < 1) {
    throw std::invalid_argument("run_sequence: k_max must be >= 1");
  }
  const EnergySectors sectors =
      classify_energy_sectors(basis, h, psi0, cfg.energy_tol);

  SequenceResult result;
  double now = 0.0;
  std::optional<DensityMatrix> current;  // W₊ after the last transition

  for (int k = 1; k <= k_max; ++k) {
    const TimingResult timing =
        current ? find_transition_time(*current, h, basis, sectors, cfg.finder)
                : find_transition_time(psi0, h, basis, sectors, cfg.finder);
    if (timing.status == TimingStatus::vacuous) {
      throw TimingUndefinedError(
          "run_sequence: the energy condition is satisfied identically; "
          "transition timing is undefined");
    }
    if (timing.status == TimingStatus::none) {
      result.status = SequenceStatus::no_further_transitions;
      break;
    }

    const Propagator u = propagator(h, timing.time);
    DensityMatrix pre = current ? evolve_density(u, *current)
                                : DensityMatrix::pure(evolve_state(u, psi0));
    RealVector populations = mixture_populations(pre, basis);
    DensityMatrix post = basis.diagonal_density(populations);

    now += timing.time;
    result.records.push_back(TransitionRecord{
        k, now, std::move(populations), std::move(pre), post});
    current = std::move(post);
  }

  // Checked, not assumed: adjacent post-transition densities must commute
  // for the equal-spacing law to apply.
  result.commuting = true;
  for (std::size_t i = 0; i + 1 < result.records.size(); ++i) {
    if (!commuting_check(result.records[i].post_density,
                         result.records[i + 1].post_density,
                         cfg.commutator_tol)) {
      result.commuting = false;
      break;
    }
  }

  if (result.commuting && !result.records.empty()) {
    // Gaps start from t₀ = 0, so they sum to the last transition time.
    const double mean_gap = result.records.back().time /
                            static_cast<double>(result.records.size());
    result.spacing = mean_gap;
    result.equal_spacing = true;
    double previous = 0.0;
    for (const TransitionRecord& record : result.records) {
      if (std::abs(record.time - previous - mean_gap) >
          cfg.timing_tol_rel * mean_gap) {
        result.equal_spacing = false;
        break;
      }
      previous = record.time;
    }
  }
  return result;
}

}  // namespace qjump
