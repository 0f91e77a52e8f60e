#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "elyflex/markets.hpp"
#include "elyflex/model.hpp"

namespace elyflex {

namespace detail {

// Relative slack for comparisons against physical limits, so that values
// that are equal in exact arithmetic (95 + 5 == 100) are not rejected by rounding.
inline bool leq(double a, double b) {
  return a <= b + 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool is_multiple(double value, double step) {
  const double k = value / step;
  return std::abs(k - std::round(k)) <= 1e-9 * std::max(1.0, std::abs(k));
}

}  // namespace detail

/// Inputs of the decoupled ramp-gradient relation.
struct GradientInputs {
  double rated_power;         // MW, installed electrolyzer power
  double min_load_fraction;   // lower operating threshold
  double ramp;                // fraction of rated power per second
  double reserve;             // MW, balancing capacity to provide
  double trade_size;          // MW, smallest tradable unit

  void validate() const {
    if (!(rated_power > 0.0)) throw std::invalid_argument("rated_power must be > 0");
    if (!(min_load_fraction >= 0.0 && min_load_fraction < 1.0))
      throw std::invalid_argument("min_load_fraction must lie in [0, 1)");
    if (!(ramp > 0.0)) throw std::invalid_argument("ramp must be > 0");
    if (!(reserve > 0.0)) throw std::invalid_argument("reserve must be > 0");
    if (!(trade_size > 0.0)) throw std::invalid_argument("trade_size must be > 0");
  }
};

/// Power gradient (MW/s) available per traded unit:
///   rated_power * (1 - u) * ramp / (reserve / trade_size)
inline double eq1_gradient(const GradientInputs& in) {
  in.validate();
  return in.rated_power * (1.0 - in.min_load_fraction) * in.ramp /
         (in.reserve / in.trade_size);
}

/// The gradient relation solved for the ramp fraction: the slowest ramp that
/// still reaches `required` MW/s per traded unit.
inline double eq1_min_ramp(double rated_power, double min_load_fraction, double reserve,
                           double trade_size, double required) {
  const double headroom = rated_power * (1.0 - min_load_fraction);
  if (!(headroom > 0.0)) {
    throw std::domain_error("no headroom: rated_power * (1 - u) must be > 0");
  }
  if (!(reserve > 0.0) || !(trade_size > 0.0))
    throw std::invalid_argument("reserve and trade_size must be > 0");
  return required * (reserve / trade_size) / headroom;
}

/// Smallest rated power whose ramp covers `capacity` MW within `availability`
/// seconds. Headroom is not considered here.
inline double min_rated_power(double capacity, double ramp, double availability) {
  if (!(ramp > 0.0) || !(availability > 0.0)) {
    throw std::invalid_argument("ramp and availability must be > 0");
  }
  return capacity / (ramp * availability);
}

/// Seconds to move the unit's load by delta_p MW in the given direction.
inline double time_to_deliver(const ElectrolyzerUnit& unit, double delta_p,
                              RampDirection direction) {
  if (!(delta_p >= 0.0)) throw std::invalid_argument("delta_p must be >= 0");
  if (delta_p == 0.0) return 0.0;
  return delta_p / unit.ramp_mw_per_s(direction);
}

/// Delivery time for a reserve direction. POS reserve is a load decrease,
/// NEG reserve a load increase, SYM must do both and is bound by the slower.
inline double time_to_deliver(const ElectrolyzerUnit& unit, double delta_p,
                              ReserveDirection direction) {
  switch (direction) {
    case ReserveDirection::POS: return time_to_deliver(unit, delta_p, RampDirection::Down);
    case ReserveDirection::NEG: return time_to_deliver(unit, delta_p, RampDirection::Up);
    case ReserveDirection::SYM:
      return std::max(time_to_deliver(unit, delta_p, RampDirection::Up),
                      time_to_deliver(unit, delta_p, RampDirection::Down));
  }
  return 0.0;
}

// Constraint identifiers, in evaluation order.
inline constexpr const char* kMinBid = "min_bid";
inline constexpr const char* kGranularity = "granularity";
inline constexpr const char* kHeadroom = "headroom";
inline constexpr const char* kRampDeadline = "ramp_deadline";
inline constexpr const char* kDuration = "duration";

struct ConstraintCheck {
  std::string name;
  double required_value;
  double actual_value;
  bool pass;
  // Signed slack; negative when violated.
  double margin;
};

struct EligibilityReport {
  BalancingProduct product;
  double bid;
  double setpoint;
  std::vector<ConstraintCheck> constraints;
  bool eligible;
  std::optional<std::string> limiting_constraint;

  const ConstraintCheck& constraint(const std::string& name) const {
    for (const auto& c : constraints)
      if (c.name == name) return c;
    throw std::out_of_range("no constraint named " + name);
  }
};

/// Headroom available for `direction` at `setpoint`: for SYM the smaller of
/// the two distances to the operating limits.
inline double headroom(const ElectrolyzerUnit& unit, double setpoint,
                       ReserveDirection direction) {
  const double down = setpoint - unit.min_power();
  const double up = unit.max_power() - setpoint;
  switch (direction) {
    case ReserveDirection::POS: return down;
    case ReserveDirection::NEG: return up;
    case ReserveDirection::SYM: return std::min(down, up);
  }
  return 0.0;
}

inline void require_setpoint_in_band(const ElectrolyzerUnit& unit, double setpoint) {
  if (!std::isfinite(setpoint) || !detail::leq(unit.min_power(), setpoint) ||
      !detail::leq(setpoint, unit.max_power())) {
    throw std::out_of_range("setpoint " + std::to_string(setpoint) +
                            " MW outside operating band [" + std::to_string(unit.min_power()) +
                            ", " + std::to_string(unit.max_power()) + "] MW");
  }
}

/// Evaluates a capacity bid against minimum size, granularity, headroom,
/// ramp deadline and duration. A setpoint outside the operating band is an
/// input error, not an ineligible bid.
inline EligibilityReport check_eligibility(const ElectrolyzerUnit& unit,
                                           const BalancingProduct& product, double bid,
                                           double setpoint) {
  product.validate();
  if (!(bid > 0.0) || !std::isfinite(bid)) throw std::invalid_argument("bid must be > 0");
  require_setpoint_in_band(unit, setpoint);

  EligibilityReport r{product, bid, setpoint, {}, true, std::nullopt};
  auto add = [&r](std::string name, double required, double actual, bool pass,
                  double margin) {
    r.constraints.push_back({std::move(name), required, actual, pass, margin});
    if (!pass && r.eligible) {
      r.eligible = false;
      r.limiting_constraint = r.constraints.back().name;
    }
  };

  add(kMinBid, product.min_bid, bid, detail::leq(product.min_bid, bid), bid - product.min_bid);

  {
    const double k = bid / product.trade_increment;
    const bool ok = detail::is_multiple(bid, product.trade_increment);
    const double off = ok ? 0.0 : std::abs(k - std::round(k)) * product.trade_increment;
    add(kGranularity, product.trade_increment, bid, ok, ok ? 0.0 : -off);
  }

  const double room = headroom(unit, setpoint, product.direction);
  const bool room_ok = detail::leq(bid, room);
  add(kHeadroom, bid, room, room_ok, room - bid);

  const double t = time_to_deliver(unit, bid, product.direction);
  add(kRampDeadline, product.availability, t, detail::leq(t, product.availability),
      product.availability - t);

  // A load can hold any admissible setpoint indefinitely, so the duration
  // requirement reduces to the headroom one.
  add(kDuration, product.duration, room_ok ? product.duration : 0.0, room_ok,
      room_ok ? 0.0 : -product.duration);

  return r;
}

struct Offer {
  double quantity;  // MW, 0 when nothing is offerable
  double setpoint;  // MW
};

/// Largest multiple of the trade increment that passes check_eligibility.
///
/// Without a setpoint, the unit runs as high as the reserve allows: SYM at
/// rated power minus the bid, POS at rated power, NEG at minimum load.
inline Offer max_offerable(const ElectrolyzerUnit& unit, const BalancingProduct& product,
                           std::optional<double> setpoint = std::nullopt) {
  product.validate();
  if (setpoint) require_setpoint_in_band(unit, *setpoint);

  const double inc = product.trade_increment;
  const double ramp_cap =
      product.availability /
      std::max(time_to_deliver(unit, 1.0, product.direction), 1e-300);
  double room_cap = 0.0;
  if (setpoint) {
    room_cap = headroom(unit, *setpoint, product.direction);
  } else {
    const double band = unit.max_power() - unit.min_power();
    room_cap = product.direction == ReserveDirection::SYM ? band / 2.0 : band;
  }
  const double cap = std::min(ramp_cap, room_cap);
  if (!(cap > 0.0)) return {0.0, setpoint.value_or(unit.max_power())};

  auto default_setpoint = [&](double bid) {
    switch (product.direction) {
      case ReserveDirection::SYM: return unit.max_power() - bid;
      case ReserveDirection::POS: return unit.max_power();
      case ReserveDirection::NEG: return unit.min_power();
    }
    return unit.max_power();
  };

  // One step above the analytic bound, then walk down until the checker agrees.
  for (auto k = static_cast<long long>(std::floor(cap / inc + 1e-9)) + 1; k >= 1; --k) {
    const double bid = static_cast<double>(k) * inc;
    if (!detail::leq(product.min_bid, bid)) break;
    const double sp = setpoint ? *setpoint : default_setpoint(bid);
    if (!detail::leq(unit.min_power(), sp) || !detail::leq(sp, unit.max_power())) continue;
    if (check_eligibility(unit, product, bid, std::clamp(sp, unit.min_power(),
                                                         unit.max_power()))
            .eligible) {
      return {bid, std::clamp(sp, unit.min_power(), unit.max_power())};
    }
  }
  return {0.0, setpoint ? *setpoint : default_setpoint(0.0)};
}

}  // namespace elyflex
