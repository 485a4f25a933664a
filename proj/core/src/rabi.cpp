#include "qjump/rabi.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qjump {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

RabiConfig::RabiConfig(double omega_in, double spacing_in, double initial_p1_in)
    : omega(omega_in), spacing(spacing_in), initial_p1(initial_p1_in) {
  if (!(omega > 0.0) || !(spacing > 0.0)) {
    throw std::invalid_argument("RabiConfig: omega and spacing must be positive");
  }
  if (initial_p1 < 0.0 || initial_p1 > 1.0) {
    throw std::invalid_argument("RabiConfig: initial_p1 must lie in [0, 1]");
  }
  ratio = omega * spacing / kTwoPi;
}

RabiConfig RabiConfig::from_ratio(double omega, double ratio, double initial_p1) {
  if (!(ratio > 0.0)) {
    throw std::invalid_argument("RabiConfig: ratio must be positive");
  }
  return RabiConfig(omega, kTwoPi * ratio / omega, initial_p1);
}

RegimeInfo classify_regime(const RabiConfig& cfg, double ratio_tol) {
  RegimeInfo info;
  info.ratio_tol = ratio_tol;
  const double theta = cfg.omega * cfg.spacing;
  info.contraction = std::cos(2.0 * theta);

  const double half_units = 2.0 * cfg.ratio;  // integer ⇔ ratio = n/2
  if (std::abs(half_units - std::round(half_units)) < 2.0 * ratio_tol) {
    info.regime = RabiRegime::undamped;
    info.contraction = 1.0;
  } else if (std::abs(info.contraction + 1.0) < 1e-12) {
    info.regime = RabiRegime::period_two;
  } else if (std::abs(info.contraction) < 1e-12) {
    info.regime = RabiRegime::immediate_stationary;
  } else {
    info.regime = RabiRegime::damped;
  }
  return info;
}

double fixed_point(const RabiConfig& cfg) {
  if (classify_regime(cfg).regime == RabiRegime::undamped) {
    throw std::domain_error("fixed_point: undamped regime has no unique fixed point");
  }
  return 0.5;
}

RabiSeries rabi_series(const RabiConfig& cfg, double t_end, int samples_per_segment) {
  if (!(t_end > 0.0)) {
    throw std::invalid_argument("rabi_series: t_end must be positive");
  }
  if (samples_per_segment < 2) {
    throw std::invalid_argument("rabi_series: samples_per_segment must be >= 2");
  }

  const bool undamped = classify_regime(cfg).regime == RabiRegime::undamped;
  RabiSeries series;

  auto evaluate = [&](double p_start, double dt) {
    const double c = std::cos(cfg.omega * dt);
    const double s = std::sin(cfg.omega * dt);
    return p_start * c * c + (1.0 - p_start) * s * s;
  };

  if (undamped) {
    const int samples = samples_per_segment *
                        std::max(1, static_cast<int>(std::ceil(t_end / cfg.spacing)));
    for (int j = 0; j <= samples; ++j) {
      const double t = t_end * static_cast<double>(j) / samples;
      series.times.push_back(t);
      series.p1.push_back(evaluate(cfg.initial_p1, t));
      series.segment_index.push_back(0);
      series.is_transition_sample.push_back(false);
    }
    return series;
  }

  double p_segment = cfg.initial_p1;
  for (int segment = 0;; ++segment) {
    const double t_start = static_cast<double>(segment) * cfg.spacing;
    if (t_start >= t_end) break;
    if (segment > 0) {
      // Populations are preserved across the transition: the left limit at
      // t_k is the start value of segment k.
      p_segment = evaluate(p_segment, cfg.spacing);
      series.transition_times.push_back(t_start);
      series.post_transition_p1.push_back(p_segment);
    }
    const double t_stop = std::min(t_start + cfg.spacing, t_end);
    for (int j = 0; j < samples_per_segment; ++j) {
      const double t = t_start + (t_stop - t_start) * static_cast<double>(j) /
                                     samples_per_segment;
      series.times.push_back(t);
      series.p1.push_back(evaluate(p_segment, t - t_start));
      series.segment_index.push_back(segment);
      series.is_transition_sample.push_back(segment > 0 && j == 0);
    }
    if (t_stop >= t_end) {
      series.times.push_back(t_end);
      series.p1.push_back(evaluate(p_segment, t_end - t_start));
      series.segment_index.push_back(segment);
      series.is_transition_sample.push_back(false);
      break;
    }
  }
  return series;
}

}  // namespace qjump
