#include "qjump/markov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qjump {

// --------------------------- PopulationVector -------------------------------

PopulationVector::PopulationVector(RealVector probabilities)
    : probabilities_(std::move(probabilities)) {
  if (probabilities_.size() == 0) {
    throw std::invalid_argument("PopulationVector: empty vector");
  }
  double sum = 0.0;
  for (Index n = 0; n < probabilities_.size(); ++n) {
    if (probabilities_(n) < -1e-12) {
      throw std::invalid_argument("PopulationVector: negative probability");
    }
    sum += probabilities_(n);
  }
  if (std::abs(sum - 1.0) > tol::kTrace) {
    throw std::invalid_argument("PopulationVector: probabilities do not sum to 1");
  }
}

PopulationVector PopulationVector::uniform(Index dim) {
  if (dim <= 0) throw std::invalid_argument("PopulationVector: dim must be positive");
  return PopulationVector(RealVector::Constant(dim, 1.0 / static_cast<double>(dim)));
}

PopulationVector PopulationVector::indicator(Index dim, Index state) {
  if (state < 0 || state >= dim) {
    throw std::invalid_argument("PopulationVector: state index out of range");
  }
  RealVector p = RealVector::Zero(dim);
  p(state) = 1.0;
  return PopulationVector(std::move(p));
}

// --------------------------- Kernels -----------------------------------------

TransitionMatrix transition_matrix(const HamiltonianOperator& h,
                                   const MixtureBasis& basis, double dt0) {
  if (basis.dim() != h.dim()) {
    throw std::invalid_argument("transition_matrix: dimension mismatch");
  }
  if (dt0 < 0.0 || !std::isfinite(dt0)) {
    throw std::invalid_argument("transition_matrix: spacing must be finite and >= 0");
  }
  if (dt0 == 0.0) {
    return TransitionMatrix{RealMatrix::Identity(h.dim(), h.dim()), 0.0};
  }
  const Matrix u_basis =
      basis.vectors().adjoint() * propagator(h, dt0).matrix() * basis.vectors();
  return TransitionMatrix{u_basis.cwiseAbs2(), dt0};
}

RateMatrix rate_matrix(const TransitionMatrix& t) {
  if (t.spacing <= 0.0) {
    throw std::invalid_argument("rate_matrix: spacing must be positive");
  }
  return RateMatrix{t.entries / t.spacing, t.spacing};
}

PopulationVector step_populations(const TransitionMatrix& t,
                                  const PopulationVector& p) {
  if (t.dim() != p.dim()) {
    throw std::invalid_argument("step_populations: dimension mismatch");
  }
  RealVector next = t.entries * p.probabilities();
  next = next.cwiseMax(0.0);  // clamp round-off residue
  next /= next.sum();         // keep long chains normalized
  return PopulationVector(std::move(next));
}

RealVector net_balance(const TransitionMatrix& t, const PopulationVector& p) {
  if (t.dim() != p.dim()) {
    throw std::invalid_argument("net_balance: dimension mismatch");
  }
  if (t.spacing <= 0.0) {
    throw std::invalid_argument("net_balance: spacing must be positive");
  }
  const RealMatrix w = t.entries / t.spacing;
  const RealVector& prob = p.probabilities();
  RealVector flow = RealVector::Zero(t.dim());
  for (Index n = 0; n < t.dim(); ++n) {
    for (Index m = 0; m < t.dim(); ++m) {
      if (m == n) continue;
      flow(n) += w(n, m) * prob(m) - w(m, n) * prob(n);
    }
  }
  return flow;
}

// --------------------------- Stationary analysis ----------------------------

StationaryResult stationary_distribution(const TransitionMatrix& t, double tolerance,
                                         int max_iterations) {
  return stationary_distribution(t, PopulationVector::uniform(t.dim()), tolerance,
                                 max_iterations);
}

StationaryResult stationary_distribution(const TransitionMatrix& t,
                                         const PopulationVector& start,
                                         double tolerance, int max_iterations) {
  if (t.dim() != start.dim()) {
    throw std::invalid_argument("stationary_distribution: dimension mismatch");
  }
  if (tolerance <= 0.0 || max_iterations < 1) {
    throw std::invalid_argument("stationary_distribution: bad tolerance or iteration cap");
  }
  RealVector p = start.probabilities();
  double residual = (t.entries * p - p).cwiseAbs().maxCoeff();
  int iterations = 0;
  while (residual >= tolerance && iterations < max_iterations) {
    p = 0.5 * (t.entries * p + p);
    p = p.cwiseMax(0.0);
    p /= p.sum();
    residual = (t.entries * p - p).cwiseAbs().maxCoeff();
    ++iterations;
  }
  return StationaryResult{PopulationVector(std::move(p)), residual, iterations,
                          residual < tolerance};
}

bool detailed_balance_check(const RateMatrix& w, const PopulationVector& p,
                            const EnergySectors& sectors, double tolerance) {
  if (w.dim() != p.dim()) {
    throw std::invalid_argument("detailed_balance_check: dimension mismatch");
  }
  const RealVector& prob = p.probabilities();
  for (std::size_t a = 0; a < sectors.conserving.size(); ++a) {
    for (std::size_t b = a + 1; b < sectors.conserving.size(); ++b) {
      const Index n = sectors.conserving[a];
      const Index m = sectors.conserving[b];
      if (std::abs(w.entries(m, n) * prob(n) - w.entries(n, m) * prob(m)) >=
          tolerance) {
        return false;
      }
    }
  }
  return true;
}

// --------------------------- Pauli rate equations ---------------------------

namespace {

RealVector pauli_rhs(const RateMatrix& w, const RealVector& p) {
  const Index d = w.dim();
  RealVector dp = RealVector::Zero(d);
  for (Index n = 0; n < d; ++n) {
    for (Index m = 0; m < d; ++m) {
      if (m == n) continue;
      dp(n) += w.entries(n, m) * p(m) - w.entries(m, n) * p(n);
    }
  }
  return dp;
}

}  // namespace

PauliSeries pauli_integrate(const RateMatrix& w, const PopulationVector& p0,
                            double t_end, double dt) {
  if (w.dim() != p0.dim()) {
    throw std::invalid_argument("pauli_integrate: dimension mismatch");
  }
  if (dt <= 0.0 || t_end < 0.0) {
    throw std::invalid_argument("pauli_integrate: dt must be positive and t_end >= 0");
  }
  double max_outflow = 0.0;
  for (Index n = 0; n < w.dim(); ++n) {
    double outflow = 0.0;
    for (Index m = 0; m < w.dim(); ++m) {
      if (m != n) outflow += w.entries(m, n);
    }
    max_outflow = std::max(max_outflow, outflow);
  }
  if (dt * max_outflow > 0.5) {
    throw std::invalid_argument(
        "pauli_integrate: dt * max outflow rate > 0.5 is unstable");
  }

  const int steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
  PauliSeries series;
  series.times.reserve(static_cast<std::size_t>(steps) + 1);
  series.populations.reserve(static_cast<std::size_t>(steps) + 1);

  RealVector p = p0.probabilities();
  series.times.push_back(0.0);
  series.populations.push_back(p);
  for (int i = 1; i <= steps; ++i) {
    const double h = std::min(dt, t_end - (i - 1) * dt);
    const RealVector k1 = pauli_rhs(w, p);
    const RealVector k2 = pauli_rhs(w, p + 0.5 * h * k1);
    const RealVector k3 = pauli_rhs(w, p + 0.5 * h * k2);
    const RealVector k4 = pauli_rhs(w, p + h * k3);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double sum = p.sum();
    if (std::abs(sum - 1.0) > 1e-8) {
      throw std::runtime_error("pauli_integrate: normalization drifted beyond 1e-8");
    }
    series.times.push_back(std::min(i * dt, t_end));
    series.populations.push_back(p);
  }
  return series;
}

}  // namespace qjump
