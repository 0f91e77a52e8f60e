#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "elyflex/markets.hpp"

namespace elyflex {

/// FCR capacity revenue for holding `bid` MW through all six blocks.
inline double fcr_day_revenue(double bid, const CapacityPriceTable& prices) {
  if (!(bid >= 0.0)) throw std::invalid_argument("bid must be >= 0");
  return bid * day_capacity_price_sum(prices);
}

/// aFRR capacity revenue with an hourly capacity price (EUR/MW/h).
inline double afrr_day_capacity_revenue(double quantity, double hours, double price) {
  if (!(quantity >= 0.0) || !(hours >= 0.0) || !(price >= 0.0)) {
    throw std::invalid_argument("aFRR revenue inputs must be non-negative");
  }
  return quantity * hours * price;
}

inline double electricity_cost(double setpoint, double hours, double price) {
  if (!(setpoint >= 0.0) || !(hours >= 0.0) || !(price >= 0.0)) {
    throw std::invalid_argument("electricity cost inputs must be non-negative");
  }
  return setpoint * hours * price;
}

/// Share of the electricity bill covered by capacity revenue.
inline double savings_ratio(double fcr_revenue, double afrr_revenue, double cost) {
  if (!(cost > 0.0)) throw std::domain_error("electricity cost must be > 0");
  return (fcr_revenue + afrr_revenue) / cost;
}

struct FleetCoverage {
  double share;  // required / fleet power
  // Operating band a symmetric product occupies (2 * share); empty for
  // asymmetric products.
  std::optional<double> symmetric_band;
};

inline FleetCoverage fleet_coverage(double required_reserve, double fleet_power,
                                    bool symmetric) {
  if (!(fleet_power > 0.0)) throw std::invalid_argument("fleet power must be > 0");
  if (!(required_reserve >= 0.0)) throw std::invalid_argument("required reserve must be >= 0");
  const double share = required_reserve / fleet_power;
  return {share, symmetric ? std::optional<double>(2.0 * share) : std::nullopt};
}

/// Inputs echoed into every report.
struct EconomicAssumptions {
  double setpoint = 0.0;     // MW
  double hours = 24.0;       // h/day
  double spot_price = 0.0;   // EUR/MWh before grid fees
  double grid_fee_fraction = 0.0;
  double fcr_bid = 0.0;      // MW
  double afrr_quantity = 0.0;  // MW
  double afrr_price = 0.0;   // EUR/MW/h
  std::optional<double> rounded_cost;  // EUR, an externally quoted rounded bill
  std::optional<double> afrr_activation_price;  // EUR/MWh, echoed only
  std::optional<double> capex_min;  // EUR, echoed only
  std::optional<double> capex_max;
};

struct EconomicReport {
  EconomicAssumptions assumptions;
  double electricity_price = 0.0;  // EUR/MWh incl. grid fees
  double fcr_revenue = 0.0;
  double afrr_capacity_revenue = 0.0;
  double electricity_cost = 0.0;
  // Against the exact electricity cost.
  std::optional<double> savings_ratio;
  std::optional<double> fcr_savings_ratio;
  std::optional<double> afrr_savings_ratio;
  // Against assumptions.rounded_cost, when given.
  std::optional<double> savings_ratio_rounded_cost;
  std::optional<double> afrr_savings_ratio_rounded_cost;
  std::optional<FleetCoverage> coverage;
};

/// Daily revenue against the electricity bill. FCR prices may be absent when
/// no FCR is bid.
inline EconomicReport economic_report(const EconomicAssumptions& a,
                                      const std::optional<CapacityPriceTable>& fcr_prices) {
  EconomicReport r;
  r.assumptions = a;
  r.electricity_price = apply_grid_fee(a.spot_price, a.grid_fee_fraction);
  if (a.fcr_bid > 0.0) {
    if (!fcr_prices) throw std::invalid_argument("FCR bid given without FCR capacity prices");
    r.fcr_revenue = fcr_day_revenue(a.fcr_bid, *fcr_prices);
  }
  r.afrr_capacity_revenue = afrr_day_capacity_revenue(a.afrr_quantity, a.hours, a.afrr_price);
  r.electricity_cost = electricity_cost(a.setpoint, a.hours, r.electricity_price);
  if (r.electricity_cost > 0.0) {
    r.savings_ratio = savings_ratio(r.fcr_revenue, r.afrr_capacity_revenue, r.electricity_cost);
    r.fcr_savings_ratio = savings_ratio(r.fcr_revenue, 0.0, r.electricity_cost);
    r.afrr_savings_ratio = savings_ratio(0.0, r.afrr_capacity_revenue, r.electricity_cost);
  }
  if (a.rounded_cost && *a.rounded_cost > 0.0) {
    r.savings_ratio_rounded_cost =
        savings_ratio(r.fcr_revenue, r.afrr_capacity_revenue, *a.rounded_cost);
    r.afrr_savings_ratio_rounded_cost =
        savings_ratio(0.0, r.afrr_capacity_revenue, *a.rounded_cost);
  }
  return r;
}

}  // namespace elyflex
