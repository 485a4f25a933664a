#include "qjump/decay.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qjump {

namespace {
// Spacings above this fraction of τ are outside the small-spacing regime in
// which the geometric series tracks the exponential law.
constexpr double kValidityBound = 0.1;
}  // namespace

double DecayModel::dt_over_tau() const {
  return stable ? 0.0 : spacing / lifetime;
}

DecayModel build_decay_model(const HamiltonianOperator& h, const MixtureBasis& basis,
                             Index initial_index, double dt0) {
  if (basis.dim() != h.dim()) {
    throw std::invalid_argument("build_decay_model: dimension mismatch");
  }
  if (initial_index < 0 || initial_index >= h.dim()) {
    throw std::invalid_argument("build_decay_model: initial index out of range");
  }
  if (dt0 <= 0.0) {
    throw std::invalid_argument("build_decay_model: spacing must be positive");
  }

  DecayModel model;
  model.initial_index = initial_index;
  model.spacing = dt0;
  model.chain = transition_matrix(h, basis, dt0);

  const RealVector column = model.chain.entries.col(initial_index);
  double leakage = 0.0;
  for (Index m = 0; m < column.size(); ++m) {
    if (m != initial_index) leakage += column(m);
  }
  model.survival_amplitude_sq = column(initial_index);

  // Completeness: the survival entry and the leakage must partition unity.
  if (std::abs(model.survival_amplitude_sq - (1.0 - leakage)) > 1e-10) {
    throw std::runtime_error("build_decay_model: completeness identity violated");
  }

  if (leakage == 0.0) {
    model.stable = true;
    model.lifetime = std::numeric_limits<double>::infinity();
  } else {
    model.lifetime = dt0 / leakage;
  }
  return model;
}

std::vector<double> survival_recurrence(const DecayModel& model, int k_max) {
  if (k_max < 0) {
    throw std::invalid_argument("survival_recurrence: k_max must be >= 0");
  }
  std::vector<double> series;
  series.reserve(static_cast<std::size_t>(k_max) + 1);
  if (model.truncated) {
    double p = 1.0;
    series.push_back(p);
    for (int k = 1; k <= k_max; ++k) {
      p *= model.survival_amplitude_sq;
      series.push_back(p);
    }
  } else {
    PopulationVector p =
        PopulationVector::indicator(model.chain.dim(), model.initial_index);
    series.push_back(p.probabilities()(model.initial_index));
    for (int k = 1; k <= k_max; ++k) {
      p = step_populations(model.chain, p);
      series.push_back(p.probabilities()(model.initial_index));
    }
  }
  return series;
}

DeviationReport exponential_compare(const DecayModel& model, int k_max) {
  if (k_max < 1) {
    throw std::invalid_argument("exponential_compare: k_max must be >= 1");
  }
  const double ratio = model.dt_over_tau();
  if (!(ratio < 1.0)) {
    throw std::invalid_argument("exponential_compare: requires dt0/tau < 1");
  }

  DeviationReport report;
  report.dt_over_tau = ratio;
  report.within_validity = ratio < kValidityBound;
  if (model.stable) {
    return report;  // constant series matches e^0 exactly
  }
  double p = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    p *= model.survival_amplitude_sq;
    const double reference = std::exp(-static_cast<double>(k) * ratio);
    report.max_rel_deviation =
        std::max(report.max_rel_deviation, std::abs(p - reference) / reference);
  }
  return report;
}

}  // namespace qjump
