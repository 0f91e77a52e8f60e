#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace elyflex {

enum class Technology { AEL, PEM, SOEC, AEM };

inline std::string_view to_string(Technology t) {
  switch (t) {
    case Technology::AEL: return "AEL";
    case Technology::PEM: return "PEM";
    case Technology::SOEC: return "SOEC";
    case Technology::AEM: return "AEM";
  }
  return "?";
}

inline Technology technology_from_string(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "AEL") return Technology::AEL;
  if (up == "PEM") return Technology::PEM;
  if (up == "SOEC") return Technology::SOEC;
  if (up == "AEM") return Technology::AEM;
  throw std::invalid_argument("unknown technology '" + std::string(s) + "'");
}

/// Direction of a load change. For a consumption asset, positive reserve is a
/// load decrease (RampDirection::Down) and negative reserve a load increase.
enum class RampDirection { Up, Down };

struct EfficiencyBreakpoint {
  double load_fraction;
  double specific_energy;  // kWh per kg H2
};

/// Piecewise-linear specific energy consumption over the load range.
/// Queries outside the breakpoint span are rejected, never extrapolated.
class EfficiencyCurve {
 public:
  explicit EfficiencyCurve(std::vector<EfficiencyBreakpoint> breakpoints)
      : points_(std::move(breakpoints)) {
    if (points_.empty()) {
      throw std::invalid_argument("efficiency curve needs at least one breakpoint");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      if (!(p.specific_energy > 0.0) || !std::isfinite(p.specific_energy)) {
        throw std::invalid_argument("efficiency curve: specific_energy must be > 0");
      }
      if (!std::isfinite(p.load_fraction)) {
        throw std::invalid_argument("efficiency curve: load fraction must be finite");
      }
      if (i > 0 && !(p.load_fraction > points_[i - 1].load_fraction)) {
        throw std::invalid_argument(
            "efficiency curve: load fractions must be strictly increasing");
      }
    }
  }

  const std::vector<EfficiencyBreakpoint>& breakpoints() const { return points_; }
  double min_load() const { return points_.front().load_fraction; }
  double max_load() const { return points_.back().load_fraction; }

  bool contains(double load_fraction, double tol = 1e-9) const {
    return load_fraction >= min_load() - tol && load_fraction <= max_load() + tol;
  }

  friend bool operator==(const EfficiencyCurve& a, const EfficiencyCurve& b) {
    return std::equal(a.points_.begin(), a.points_.end(), b.points_.begin(),
                      b.points_.end(), [](const auto& x, const auto& y) {
                        return x.load_fraction == y.load_fraction &&
                               x.specific_energy == y.specific_energy;
                      });
  }

 private:
  std::vector<EfficiencyBreakpoint> points_;
};

/// Specific energy (kWh/kg) at a load fraction, linearly interpolated.
inline double specific_energy_at(const EfficiencyCurve& curve, double load_fraction) {
  constexpr double tol = 1e-9;
  if (!curve.contains(load_fraction, tol)) {
    throw std::out_of_range("load fraction " + std::to_string(load_fraction) +
                            " outside efficiency curve domain [" +
                            std::to_string(curve.min_load()) + ", " +
                            std::to_string(curve.max_load()) + "]");
  }
  const auto& pts = curve.breakpoints();
  const double x = std::clamp(load_fraction, curve.min_load(), curve.max_load());
  if (pts.size() == 1) return pts.front().specific_energy;
  auto hi = std::lower_bound(pts.begin(), pts.end(), x,
                             [](const EfficiencyBreakpoint& p, double v) {
                               return p.load_fraction < v;
                             });
  if (hi == pts.begin()) return hi->specific_energy;
  if (hi->load_fraction == x) return hi->specific_energy;
  auto lo = std::prev(hi);
  const double t = (x - lo->load_fraction) / (hi->load_fraction - lo->load_fraction);
  return lo->specific_energy + t * (hi->specific_energy - lo->specific_energy);
}

/// A single electrolyzer (or a synthetic aggregate of a fleet).
///
/// Ramp rates are fractions of rated power per second: 0.61 %/s is stored as
/// 0.0061. Operating band is [min_load_fraction * rated_power, rated_power].
class ElectrolyzerUnit {
 public:
  ElectrolyzerUnit(std::string name, Technology technology, double rated_power_mw,
                   double min_load_fraction, double ramp_up,
                   std::optional<double> ramp_down = std::nullopt,
                   std::optional<EfficiencyCurve> efficiency = std::nullopt)
      : name_(std::move(name)),
        technology_(technology),
        rated_power_(rated_power_mw),
        min_load_(min_load_fraction),
        ramp_up_(ramp_up),
        ramp_down_(ramp_down.value_or(ramp_up)),
        efficiency_(std::move(efficiency)) {
    if (!(rated_power_ > 0.0) || !std::isfinite(rated_power_)) {
      throw std::invalid_argument("rated_power must be > 0");
    }
    if (!(min_load_ > 0.0 && min_load_ < 1.0)) {
      throw std::invalid_argument("min_load_fraction must lie in (0, 1), got " +
                                  std::to_string(min_load_));
    }
    if (!(ramp_up_ > 0.0) || !std::isfinite(ramp_up_)) {
      throw std::invalid_argument("ramp_up must be > 0");
    }
    if (!(ramp_down_ > 0.0) || !std::isfinite(ramp_down_)) {
      throw std::invalid_argument("ramp_down must be > 0");
    }
    if (efficiency_) {
      constexpr double tol = 1e-9;
      if (efficiency_->min_load() < min_load_ - tol || efficiency_->max_load() > 1.0 + tol) {
        throw std::invalid_argument(
            "efficiency curve load fractions must lie within [min_load_fraction, 1]");
      }
    }
  }

  const std::string& name() const { return name_; }
  Technology technology() const { return technology_; }
  double rated_power() const { return rated_power_; }
  double min_load_fraction() const { return min_load_; }
  double ramp_up() const { return ramp_up_; }
  double ramp_down() const { return ramp_down_; }
  const std::optional<EfficiencyCurve>& efficiency_curve() const { return efficiency_; }

  double min_power() const { return min_load_ * rated_power_; }
  double max_power() const { return rated_power_; }

  double ramp(RampDirection d) const { return d == RampDirection::Up ? ramp_up_ : ramp_down_; }

  /// Absolute ramp capability in MW/s.
  double ramp_mw_per_s(RampDirection d) const { return ramp(d) * rated_power_; }

  friend bool operator==(const ElectrolyzerUnit&, const ElectrolyzerUnit&) = default;

 private:
  std::string name_;
  Technology technology_;
  double rated_power_;
  double min_load_;
  double ramp_up_;
  double ramp_down_;
  std::optional<EfficiencyCurve> efficiency_;
};

/// Units dispatched together as one pool.
struct Fleet {
  std::vector<ElectrolyzerUnit> units;

  double rated_power() const {
    return std::accumulate(units.begin(), units.end(), 0.0,
                           [](double s, const auto& u) { return s + u.rated_power(); });
  }
  double min_power() const {
    return std::accumulate(units.begin(), units.end(), 0.0,
                           [](double s, const auto& u) { return s + u.min_power(); });
  }
  double ramp_mw_per_s(RampDirection d) const {
    return std::accumulate(units.begin(), units.end(), 0.0, [d](double s, const auto& u) {
      return s + u.ramp_mw_per_s(d);
    });
  }
};

/// Collapses a fleet into one synthetic unit with summed rated power and
/// power-weighted minimum load and ramp fractions. The aggregate carries no
/// efficiency curve; hydrogen output for fleets is computed per unit.
inline ElectrolyzerUnit aggregate(const Fleet& fleet) {
  if (fleet.units.empty()) throw std::invalid_argument("cannot aggregate an empty fleet");
  // Floating-point sums depend on order; sum in a canonical order so that
  // permutations of one fleet aggregate bit-identically.
  std::vector<const ElectrolyzerUnit*> order;
  order.reserve(fleet.units.size());
  for (const auto& u : fleet.units) order.push_back(&u);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return std::make_tuple(a->rated_power(), a->min_load_fraction(), a->ramp_up(), a->ramp_down()) <
           std::make_tuple(b->rated_power(), b->min_load_fraction(), b->ramp_up(), b->ramp_down());
  });
  double p = 0, pmin = 0, up = 0, down = 0;
  for (const auto* u : order) {
    p += u->rated_power();
    pmin += u->min_power();
    up += u->ramp_mw_per_s(RampDirection::Up);
    down += u->ramp_mw_per_s(RampDirection::Down);
  }
  auto tech = fleet.units.front().technology();
  return ElectrolyzerUnit("fleet(" + std::to_string(fleet.units.size()) + ")", tech, p,
                          pmin / p, up / p, down / p);
}

}  // namespace elyflex
