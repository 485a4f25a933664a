#include "qjump/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace qjump {

namespace {

// Uniform double in [0, 1) from the top 53 bits; avoids distribution objects
// so the stream is identical on every standard-conforming platform.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Index sample_index(const RealVector& probabilities, std::mt19937_64& rng) {
  const double total = probabilities.sum();
  const double u = uniform01(rng) * total;
  double cumulative = 0.0;
  Index last_positive = -1;
  for (Index n = 0; n < probabilities.size(); ++n) {
    if (probabilities(n) <= 0.0) continue;
    cumulative += probabilities(n);
    last_positive = n;
    if (u < cumulative) return n;
  }
  if (last_positive < 0) {
    throw std::runtime_error("sample_index: no positive probability");
  }
  return last_positive;  // round-off fell past the last bin
}

struct StepOutcome {
  bool found = false;
  bool vacuous = false;  // timing undefined from this source
  double dt = 0.0;
  RealVector probabilities;
};

// One step of the jump chain from the current source: the spacing resolved by
// the schedule, then the conditional Born probabilities at that spacing. The
// outcome from each basis state is the same for every trajectory and step, so
// everything is precomputed here; stepping is then read-only and thread-safe.
class StepModel {
 public:
  StepModel(const HamiltonianOperator& h, const MixtureBasis& basis,
            const Schedule& schedule, const StateVector& psi0) {
    const Index d = h.dim();
    by_index_.resize(static_cast<std::size_t>(d));
    if (const auto* fixed = std::get_if<FixedSpacing>(&schedule)) {
      if (!(fixed->dt > 0.0)) {
        throw std::invalid_argument("sample_trajectory: spacing must be positive");
      }
      const TransitionMatrix kernel = transition_matrix(h, basis, fixed->dt);
      from_initial_ = StepOutcome{
          true, false, fixed->dt,
          born_probabilities(evolve_state(propagator(h, fixed->dt), psi0), basis)};
      for (Index m = 0; m < d; ++m) {
        by_index_[static_cast<std::size_t>(m)] =
            StepOutcome{true, false, fixed->dt, kernel.entries.col(m)};
      }
      return;
    }
    const auto& schedule_cfg = std::get<FinderSchedule>(schedule);
    const EnergySectors sectors =
        classify_energy_sectors(basis, h, psi0, schedule_cfg.energy_tol);
    from_initial_ = resolve(psi0, h, basis, sectors, schedule_cfg.finder);
    for (Index m = 0; m < d; ++m) {
      by_index_[static_cast<std::size_t>(m)] = resolve(
          StateVector(basis.vector(m)), h, basis, sectors, schedule_cfg.finder);
    }
  }

  const StepOutcome& from_initial() const { return from_initial_; }
  const StepOutcome& from_index(Index m) const {
    return by_index_[static_cast<std::size_t>(m)];
  }

 private:
  static StepOutcome resolve(const StateVector& source, const HamiltonianOperator& h,
                             const MixtureBasis& basis, const EnergySectors& sectors,
                             const FinderConfig& finder) {
    const TimingResult timing =
        find_transition_time(source, h, basis, sectors, finder);
    StepOutcome outcome;
    if (timing.status == TimingStatus::vacuous) {
      // surfaces as an error only if a trajectory actually reaches this state
      outcome.vacuous = true;
      return outcome;
    }
    if (!timing.found()) return outcome;
    outcome.found = true;
    outcome.dt = timing.time;
    outcome.probabilities =
        born_probabilities(evolve_state(propagator(h, timing.time), source), basis);
    return outcome;
  }

  StepOutcome from_initial_;
  std::vector<StepOutcome> by_index_;
};

Trajectory run_one(const StepModel& model, int k_max, std::uint64_t seed) {
  Trajectory trajectory;
  trajectory.seed = seed;
  std::mt19937_64 rng(seed);

  double now = 0.0;
  Index current = -1;  // −1: still in ψ(0)
  for (int k = 1; k <= k_max; ++k) {
    const StepOutcome& outcome =
        current < 0 ? model.from_initial() : model.from_index(current);
    if (outcome.vacuous) {
      throw TimingUndefinedError(
          "sample_trajectory: transition timing is undefined for this system");
    }
    if (!outcome.found) {
      trajectory.truncated = true;
      break;
    }
    now += outcome.dt;
    current = sample_index(outcome.probabilities, rng);
    trajectory.jumps.push_back(Jump{now, current});
  }
  trajectory.final_index = current;
  return trajectory;
}

}  // namespace

Trajectory sample_trajectory(const StateVector& psi0, const HamiltonianOperator& h,
                             const MixtureBasis& basis, const Schedule& schedule,
                             int k_max, std::uint64_t seed) {
  if (k_max < 1) {
    throw std::invalid_argument("sample_trajectory: k_max must be >= 1");
  }
  if (psi0.dim() != h.dim() || basis.dim() != h.dim()) {
    throw std::invalid_argument("sample_trajectory: dimension mismatch");
  }
  const StepModel model(h, basis, schedule, psi0);
  return run_one(model, k_max, seed);
}

EnsembleEstimate ensemble_populations(const StateVector& psi0,
                                      const HamiltonianOperator& h,
                                      const MixtureBasis& basis,
                                      const Schedule& schedule, int k_max, int n,
                                      std::uint64_t base_seed, int n_threads) {
  if (n < 1) {
    throw std::invalid_argument("ensemble_populations: need at least one trajectory");
  }
  if (k_max < 1) {
    throw std::invalid_argument("ensemble_populations: k_max must be >= 1");
  }
  if (psi0.dim() != h.dim() || basis.dim() != h.dim()) {
    throw std::invalid_argument("ensemble_populations: dimension mismatch");
  }
  n_threads = std::clamp(n_threads, 1, 256);

  const StepModel model(h, basis, schedule, psi0);
  const Index d = h.dim();
  const int rows = k_max + 1;

  // Integer jump counts per (k, state). Summing counts is exact, so the
  // merge order across threads cannot change the result.
  using Counts = std::vector<std::int64_t>;
  auto count_range = [&](int first, int last, Counts& counts,
                         std::vector<double>& times_accumulator) {
    for (int i = first; i < last; ++i) {
      const Trajectory trajectory =
          run_one(model, k_max, base_seed + static_cast<std::uint64_t>(i));
      Index held = -1;
      for (int k = 1; k <= k_max; ++k) {
        const std::size_t jump = static_cast<std::size_t>(k) - 1;
        if (jump < trajectory.jumps.size()) {
          held = trajectory.jumps[jump].state;
          if (i == 0) times_accumulator[static_cast<std::size_t>(k)] =
              trajectory.jumps[jump].time;
        }
        // After truncation the last realized state persists.
        if (held >= 0) {
          ++counts[static_cast<std::size_t>(k) * static_cast<std::size_t>(d) +
                   static_cast<std::size_t>(held)];
        }
      }
    }
  };

  std::vector<Counts> partials(
      static_cast<std::size_t>(n_threads),
      Counts(static_cast<std::size_t>(rows) * static_cast<std::size_t>(d), 0));
  std::vector<double> times(static_cast<std::size_t>(rows), 0.0);

  if (n_threads == 1) {
    count_range(0, n, partials[0], times);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
    const int chunk = (n + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
      const int first = w * chunk;
      const int last = std::min(n, first + chunk);
      if (first >= last) break;
      workers.emplace_back([&, w, first, last] {
        try {
          // Thread 0 owns the shared time axis (same for every trajectory in
          // the fixed-spacing case; representative otherwise).
          std::vector<double> scratch(static_cast<std::size_t>(rows), 0.0);
          count_range(first, last, partials[static_cast<std::size_t>(w)],
                      first == 0 ? times : scratch);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
    for (const std::exception_ptr& error : errors) {
      if (error) std::rethrow_exception(error);
    }
    for (std::size_t w = 1; w < partials.size(); ++w) {
      for (std::size_t i = 0; i < partials[0].size(); ++i) {
        partials[0][i] += partials[w][i];
      }
    }
  }

  // Fixed schedules have an exact shared time axis; finder schedules use the
  // first trajectory's jump times as the representative axis.
  if (const auto* fixed = std::get_if<FixedSpacing>(&schedule)) {
    for (int k = 0; k < rows; ++k) {
      times[static_cast<std::size_t>(k)] = static_cast<double>(k) * fixed->dt;
    }
  }

  EnsembleEstimate estimate;
  estimate.n_trajectories = n;
  estimate.populations = RealMatrix::Zero(rows, d);
  estimate.standard_errors = RealMatrix::Zero(rows, d);
  estimate.times = std::move(times);

  estimate.populations.row(0) = born_probabilities(psi0, basis).transpose();
  for (int k = 1; k < rows; ++k) {
    for (Index s = 0; s < d; ++s) {
      estimate.populations(k, s) =
          static_cast<double>(partials[0][static_cast<std::size_t>(k) *
                                              static_cast<std::size_t>(d) +
                                          static_cast<std::size_t>(s)]) /
          static_cast<double>(n);
    }
  }
  for (int k = 0; k < rows; ++k) {
    for (Index s = 0; s < d; ++s) {
      const double p = estimate.populations(k, s);
      estimate.standard_errors(k, s) =
          std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
    }
  }
  return estimate;
}

}  // namespace qjump
