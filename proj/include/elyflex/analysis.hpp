#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "elyflex/allocate.hpp"
#include "elyflex/dispatch.hpp"
#include "elyflex/economics.hpp"
#include "elyflex/eligibility.hpp"
#include "elyflex/report.hpp"
#include "elyflex/scenario_io.hpp"

// Scenario-driven analyses behind the command-line subcommands.

namespace elyflex {

inline json scenario_echo(const Scenario& sc) {
  json j;
  j["name"] = sc.name ? json(*sc.name) : json(nullptr);
  j["scenario"] = to_text(sc);
  return j;
}

inline AnalysisResults run_simulation(const Scenario& sc,
                                      const std::optional<std::filesystem::path>& signal_file = {}) {
  if (!sc.simulation) throw std::invalid_argument("scenario has no [simulation] section");
  const auto& sim = *sc.simulation;
  const auto unit = scenario_plant(sc);
  const auto product = product_from_string(sim.product);
  std::filesystem::path path;
  if (signal_file) {
    path = *signal_file;
  } else if (sim.signal_csv) {
    path = sc.resolve(*sim.signal_csv);
  } else {
    throw std::invalid_argument("no signal: set signal_csv in [simulation] or pass --signal");
  }
  const auto signal = load_signal(path, signal_kind_from_string(sim.signal_kind));

  AnalysisResults r;
  r.analysis = "simulate";
  r.assumptions = scenario_echo(sc);
  r.unit = unit;
  r.trajectory = simulate(unit, sim.setpoint_mw, sim.bid_mw, signal, product.direction);
  r.signal = signal;
  r.compliance = check_compliance(*r.trajectory, signal, product, sim.setpoint_mw, sim.bid_mw);
  if (unit.efficiency_curve()) r.hydrogen_kg = hydrogen_output(*r.trajectory, *unit.efficiency_curve());
  return r;
}

inline AnalysisResults run_allocation(const Scenario& sc,
                                      const std::optional<std::filesystem::path>& prices_file = {}) {
  const auto unit = scenario_plant(sc);
  const auto products = scenario_products(sc);
  if (products.empty()) throw std::invalid_argument("scenario has no [products] list");
  bool wants_fcr = false, wants_afrr = false;
  for (const auto& p : products) {
    wants_fcr |= p.kind == ProductKind::FCR;
    wants_afrr |= p.kind == ProductKind::aFRR;
  }
  std::optional<CapacityPriceTable> fcr_prices;
  if (prices_file) {
    fcr_prices = load_capacity_prices(*prices_file);
  } else {
    fcr_prices = scenario_fcr_prices(sc);
  }
  if (wants_fcr && !fcr_prices) {
    throw std::invalid_argument("FCR allocation needs capacity prices (--prices or [prices])");
  }
  const auto afrr_price = scenario_afrr_price_per_block(sc);
  if (wants_afrr && !afrr_price) {
    throw std::invalid_argument("aFRR allocation needs an aFRR capacity price in [prices]");
  }

  AllocationOptions opt;
  if (sc.allocation) {
    opt.prereserved_fcr = sc.allocation->prereserved_fcr_mw;
    if (sc.allocation->setpoint_step_mw) opt.setpoint_step = *sc.allocation->setpoint_step_mw;
  }
  if (sc.economics) opt.hydrogen_value = sc.economics->hydrogen_value_eur_per_kg;

  AnalysisResults r;
  r.analysis = "allocate";
  r.assumptions = scenario_echo(sc);
  r.unit = unit;
  r.capacity_prices = fcr_prices;
  r.allocation = optimize_day(unit, products, fcr_prices.value_or(CapacityPriceTable::uniform(0.0)),
                              afrr_price.value_or(0.0), opt);
  return r;
}

inline AnalysisResults run_economics(const Scenario& sc) {
  AnalysisResults r;
  r.analysis = "economics";
  r.assumptions = scenario_echo(sc);

  if (sc.economics) {
    const auto& e = *sc.economics;
    EconomicAssumptions a;
    if (!e.setpoint_mw) throw std::invalid_argument("[economics] needs setpoint_mw");
    a.setpoint = *e.setpoint_mw;
    a.hours = e.hours.value_or(24.0);
    a.grid_fee_fraction = e.grid_fee_percent.value_or(0.0) / 100.0;
    if (sc.prices.spot_price_eur_per_mwh) {
      a.spot_price = *sc.prices.spot_price_eur_per_mwh;
    } else if (sc.prices.spot_csv) {
      const auto series = load_spot_prices(sc.resolve(*sc.prices.spot_csv));
      const double threshold =
          e.spot_threshold_eur_per_mwh.value_or(std::numeric_limits<double>::infinity());
      r.spot_average = avg_price_below_threshold(series, threshold);
      a.spot_price = r.spot_average->mean_price;
    } else {
      throw std::invalid_argument("[economics] needs a spot price source in [prices]");
    }
    a.fcr_bid = e.fcr_bid_mw.value_or(0.0);
    a.afrr_quantity = e.afrr_quantity_mw.value_or(0.0);
    if (sc.prices.afrr_capacity_eur_per_mw_h) {
      a.afrr_price = *sc.prices.afrr_capacity_eur_per_mw_h;
    } else if (sc.prices.afrr_capacity_eur_per_mw_block) {
      a.afrr_price = *sc.prices.afrr_capacity_eur_per_mw_block / kHoursPerBlock;
    }
    a.rounded_cost = e.rounded_cost_eur;
    a.afrr_activation_price = e.afrr_activation_eur_per_mwh;
    a.capex_min = e.capex_min_eur;
    a.capex_max = e.capex_max_eur;
    r.capacity_prices = scenario_fcr_prices(sc);
    r.economics = economic_report(a, r.capacity_prices);
    r.assumptions["economics"] = to_json(a);
  }
  for (const auto& c : sc.coverage) {
    r.coverage.push_back({c, fleet_coverage(c.required_reserve_mw, c.fleet_power_mw, c.symmetric)});
  }
  for (const auto& g : sc.gradients) {
    r.gradients.push_back({g, eq1_min_ramp(g.rated_power_mw, g.min_load_percent / 100.0,
                                           g.reserve_mw, g.trade_size_mw, g.required_mw_per_s)});
  }
  if (!sc.economics && sc.coverage.empty() && sc.gradients.empty()) {
    throw std::invalid_argument("scenario has no [economics], [coverage] or [gradient] section");
  }
  return r;
}

}  // namespace elyflex
