#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "elyflex/eligibility.hpp"
#include "elyflex/markets.hpp"
#include "elyflex/model.hpp"

namespace elyflex {

// Sign convention: a positive power offset is a load increase. Positive
// reserve (grid support during under-frequency) is a load decrease and
// therefore a negative offset.

/// Frequency deviation at which FCR is fully activated.
inline constexpr double kFullActivationHz = 0.2;

/// Relative delivery tolerance (share of the bid) used by check_compliance.
inline constexpr double kDeliveryTolerance = 0.005;

enum class SignalKind {
  FrequencyDeviation,  // Hz relative to 50 Hz
  SetpointRequest,     // MW offset requested by the TSO
};

/// Uniformly sampled activation signal starting at t = 0.
class ActivationSignal {
 public:
  ActivationSignal(SignalKind kind, double timestep, std::vector<double> values)
      : kind_(kind), timestep_(timestep), values_(std::move(values)) {
    if (!(timestep_ > 0.0) || !std::isfinite(timestep_))
      throw std::invalid_argument("signal timestep must be > 0");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("signal values must be finite");
  }

  /// Step of constant `value` starting at t = 0 over `duration` seconds.
  static ActivationSignal step(SignalKind kind, double value, double duration,
                               double timestep = 1.0) {
    const auto n = static_cast<std::size_t>(std::llround(duration / timestep)) + 1;
    return ActivationSignal(kind, timestep, std::vector<double>(n, value));
  }

  SignalKind kind() const { return kind_; }
  double timestep() const { return timestep_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double time(std::size_t k) const { return static_cast<double>(k) * timestep_; }

 private:
  SignalKind kind_;
  double timestep_;
  std::vector<double> values_;
};

/// Linear droop saturating at +/- kFullActivationHz. Under-frequency yields
/// a negative offset (load shed).
inline double droop_target(double freq_deviation, double bid) {
  if (!(bid >= 0.0)) throw std::invalid_argument("bid must be >= 0");
  return std::clamp(freq_deviation / kFullActivationHz, -1.0, 1.0) * bid;
}

/// Offset range a product direction may request: POS only sheds load, NEG
/// only adds load, SYM does both.
inline std::pair<double, double> offset_range(ReserveDirection d, double bid) {
  switch (d) {
    case ReserveDirection::POS: return {-bid, 0.0};
    case ReserveDirection::NEG: return {0.0, bid};
    case ReserveDirection::SYM: return {-bid, bid};
  }
  return {-bid, bid};
}

/// Requested power offset (MW) for one signal sample.
inline double requested_offset(SignalKind kind, double value, double bid,
                               ReserveDirection direction) {
  const double raw = kind == SignalKind::FrequencyDeviation ? droop_target(value, bid) : value;
  const auto [lo, hi] = offset_range(direction, bid);
  return std::clamp(raw, lo, hi);
}

struct PowerTrajectory {
  double timestep;
  std::vector<double> samples;  // MW, sample k at t = k * timestep
  ElectrolyzerUnit unit;

  double time(std::size_t k) const { return static_cast<double>(k) * timestep; }
  double horizon() const { return samples.empty() ? 0.0 : time(samples.size() - 1); }
};

/// Rate-limited tracking of setpoint + requested offset. The output starts at
/// the setpoint; sample k+1 moves toward the target of sample k by at most
/// ramp * rated_power * timestep, with direction-specific ramp rates, and
/// never leaves the operating band.
inline PowerTrajectory simulate(const ElectrolyzerUnit& unit, double setpoint, double bid,
                                const ActivationSignal& signal,
                                ReserveDirection direction = ReserveDirection::SYM) {
  if (!(bid >= 0.0)) throw std::invalid_argument("bid must be >= 0");
  require_setpoint_in_band(unit, setpoint);
  const auto [lo_off, hi_off] = offset_range(direction, bid);
  if (!detail::leq(unit.min_power(), setpoint + lo_off) ||
      !detail::leq(setpoint + hi_off, unit.max_power())) {
    throw std::out_of_range("reserve band [" + std::to_string(setpoint + lo_off) + ", " +
                            std::to_string(setpoint + hi_off) +
                            "] MW exceeds the operating band");
  }

  PowerTrajectory out{signal.timestep(), {}, unit};
  out.samples.reserve(signal.size());
  if (signal.size() == 0) return out;

  const double up_step = unit.ramp_mw_per_s(RampDirection::Up) * signal.timestep();
  const double down_step = unit.ramp_mw_per_s(RampDirection::Down) * signal.timestep();
  double p = setpoint;
  out.samples.push_back(p);
  for (std::size_t k = 0; k + 1 < signal.size(); ++k) {
    double target = setpoint + requested_offset(signal.kind(), signal.values()[k], bid, direction);
    target = std::clamp(target, unit.min_power(), unit.max_power());
    if (target > p) {
      p = std::min(target, p + up_step);
    } else if (target < p) {
      p = std::max(target, p - down_step);
    }
    out.samples.push_back(p);
  }
  return out;
}

struct ComplianceResult {
  bool compliant;
  std::optional<double> first_violation_time;  // s
  double max_delivery_delay;                   // s
  double delivered_energy;                     // MWh relative to setpoint, signed
  std::size_t activations;                     // full-activation requests evaluated
};

/// Checks that every sustained full-activation request is delivered within
/// the product's availability deadline.
///
/// A request starts when the requested offset reaches +/- bid. Its delay runs
/// until the output is within kDeliveryTolerance * bid of setpoint + offset.
/// A request that ends (or the horizon ends) before delivery counts as a
/// violation only once it has been pending longer than the deadline.
inline ComplianceResult check_compliance(const PowerTrajectory& trajectory,
                                         const ActivationSignal& signal,
                                         const BalancingProduct& product, double setpoint,
                                         double bid) {
  if (trajectory.samples.size() != signal.size() ||
      std::abs(trajectory.timestep - signal.timestep()) > 1e-12 * signal.timestep()) {
    throw std::invalid_argument("trajectory and signal horizons differ (" +
                                std::to_string(trajectory.samples.size()) + " vs " +
                                std::to_string(signal.size()) + " samples)");
  }
  product.validate();

  ComplianceResult res{true, std::nullopt, 0.0, 0.0, 0};
  const auto& out = trajectory.samples;
  const double dt = signal.timestep();
  const std::size_t n = out.size();

  for (std::size_t k = 0; k + 1 < n; ++k) {
    res.delivered_energy += 0.5 * ((out[k] - setpoint) + (out[k + 1] - setpoint)) * dt;
  }
  res.delivered_energy /= 3600.0;

  if (!(bid > 0.0) || n == 0) return res;

  std::vector<double> offset(n);
  for (std::size_t k = 0; k < n; ++k) {
    offset[k] = requested_offset(signal.kind(), signal.values()[k], bid, product.direction);
  }
  const double full = bid * (1.0 - 1e-9);
  const double tol = kDeliveryTolerance * bid;

  auto record_violation = [&](double when) {
    res.compliant = false;
    if (!res.first_violation_time || when < *res.first_violation_time) {
      res.first_violation_time = when;
    }
  };

  std::size_t k = 0;
  while (k < n) {
    if (std::abs(offset[k]) < full) {
      ++k;
      continue;
    }
    const std::size_t onset = k;
    const double level = offset[k];
    const double required = setpoint + level;
    std::size_t end = onset;
    while (end < n && std::abs(offset[end] - level) <= 1e-9 * bid) ++end;

    // The sample at `onset` precedes any response to the request, so search
    // from onset onward and include the first sample after the request ends.
    std::optional<std::size_t> delivered;
    for (std::size_t j = onset; j < std::min(end + 1, n); ++j) {
      if (std::abs(out[j] - required) <= tol) {
        delivered = j;
        break;
      }
    }
    ++res.activations;
    const double t0 = signal.time(onset);
    if (delivered) {
      const double delay = signal.time(*delivered) - t0;
      res.max_delivery_delay = std::max(res.max_delivery_delay, delay);
      if (!detail::leq(delay, product.availability)) record_violation(t0 + product.availability);
    } else {
      const double pending = signal.time(std::min(end, n - 1)) - t0;
      res.max_delivery_delay = std::max(res.max_delivery_delay, pending);
      if (!detail::leq(pending, product.availability)) {
        record_violation(t0 + product.availability);
      }
    }
    k = end;
  }
  return res;
}

/// Hydrogen produced along a trajectory in kg: power / specific energy,
/// integrated with the trapezoidal rule.
inline double hydrogen_output(const PowerTrajectory& trajectory, const EfficiencyCurve& curve) {
  const auto& s = trajectory.samples;
  if (s.size() < 2) return 0.0;
  const double rated = trajectory.unit.rated_power();
  auto rate = [&](double p) {  // kg per second
    const double se = specific_energy_at(curve, p / rated);
    return p * 1000.0 / se / 3600.0;
  };
  double kg = 0.0;
  double prev = rate(s.front());
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double cur = rate(s[k]);
    kg += 0.5 * (prev + cur) * trajectory.timestep;
    prev = cur;
  }
  return kg;
}

}  // namespace elyflex
