#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "elyflex/allocate.hpp"
#include "elyflex/dispatch.hpp"
#include "elyflex/economics.hpp"
#include "elyflex/eligibility.hpp"
#include "elyflex/markets.hpp"
#include "elyflex/model.hpp"
#include "elyflex/scenario_io.hpp"

namespace elyflex {

using json = nlohmann::ordered_json;

enum class ReportFormat { Json, Csv, PlotData };

inline ReportFormat report_format_from_string(std::string_view s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "plotdata") return ReportFormat::PlotData;
  throw std::invalid_argument("unknown report format '" + std::string(s) + "'");
}

/// Euro amounts with two decimals, percentages with one.
inline std::string format_eur(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string format_percent(double ratio) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", ratio * 100.0);
  return buf;
}

struct GradientResult {
  GradientSection inputs;
  double min_ramp;  // fraction per second
};

struct CoverageResult {
  CoverageSection inputs;
  FleetCoverage coverage;
};

/// Everything one analysis produced. Absent parts are omitted from output.
struct AnalysisResults {
  std::string analysis;
  json assumptions = json::object();
  std::optional<ElectrolyzerUnit> unit;
  std::optional<EligibilityReport> eligibility;
  std::optional<PowerTrajectory> trajectory;
  std::optional<ActivationSignal> signal;
  std::optional<ComplianceResult> compliance;
  std::optional<double> hydrogen_kg;
  std::optional<AllocationResult> allocation;
  std::optional<EconomicReport> economics;
  std::optional<CapacityPriceTable> capacity_prices;
  std::optional<ThresholdAverage> spot_average;
  std::vector<CoverageResult> coverage;
  std::vector<GradientResult> gradients;
};

inline json to_json(const ElectrolyzerUnit& u) {
  json j;
  j["name"] = u.name();
  j["technology"] = std::string(to_string(u.technology()));
  j["rated_power_mw"] = u.rated_power();
  j["min_load_fraction"] = u.min_load_fraction();
  j["ramp_up_per_s"] = u.ramp_up();
  j["ramp_down_per_s"] = u.ramp_down();
  if (const auto& c = u.efficiency_curve()) {
    json pts = json::array();
    for (const auto& p : c->breakpoints()) pts.push_back({p.load_fraction, p.specific_energy});
    j["efficiency_curve"] = pts;
  } else {
    j["efficiency_curve"] = nullptr;
  }
  return j;
}

inline json to_json(const BalancingProduct& p) {
  json j;
  j["kind"] = std::string(to_string(p.kind));
  j["direction"] = std::string(to_string(p.direction));
  j["min_bid_mw"] = p.min_bid;
  j["trade_increment_mw"] = p.trade_increment;
  j["availability_s"] = p.availability;
  j["symmetric"] = p.symmetric;
  j["duration_h"] = p.duration;
  return j;
}

inline json to_json(const EligibilityReport& r) {
  json j;
  j["product"] = to_json(r.product);
  j["bid_mw"] = r.bid;
  j["setpoint_mw"] = r.setpoint;
  j["eligible"] = r.eligible;
  j["limiting_constraint"] = r.limiting_constraint ? json(*r.limiting_constraint) : json(nullptr);
  json cs = json::array();
  for (const auto& c : r.constraints) {
    cs.push_back({{"name", c.name},
                  {"required_value", c.required_value},
                  {"actual_value", c.actual_value},
                  {"pass", c.pass},
                  {"margin", c.margin}});
  }
  j["constraints"] = cs;
  return j;
}

inline json to_json(const ComplianceResult& c) {
  json j;
  j["compliant"] = c.compliant;
  j["first_violation_time_s"] =
      c.first_violation_time ? json(*c.first_violation_time) : json(nullptr);
  j["max_delivery_delay_s"] = c.max_delivery_delay;
  j["delivered_energy_mwh"] = c.delivered_energy;
  j["full_activations"] = c.activations;
  return j;
}

inline json to_json(const AllocationResult& a) {
  json j;
  j["capacity_revenue_eur"] = a.capacity_revenue;
  j["hydrogen_loss_kg"] = a.hydrogen_loss;
  j["objective_eur"] = a.objective;
  json blocks = json::array();
  for (const auto& b : a.blocks) {
    blocks.push_back({{"block", b.block.label()},
                      {"setpoint_mw", b.setpoint},
                      {"fcr_mw", b.fcr},
                      {"afrr_pos_mw", b.afrr},
                      {"revenue_eur", b.revenue},
                      {"hydrogen_loss_kg", b.hydrogen_loss},
                      {"objective_eur", b.objective}});
  }
  j["blocks"] = blocks;
  json sched = json::array();
  for (const auto& e : a.schedule) {
    sched.push_back({{"block", e.block.label()},
                     {"product", e.product.label()},
                     {"quantity_mw", e.quantity},
                     {"setpoint_mw", e.setpoint}});
  }
  j["schedule"] = sched;
  j["display"] = {{"capacity_revenue_eur", format_eur(a.capacity_revenue)},
                  {"objective_eur", format_eur(a.objective)}};
  return j;
}

inline json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json to_json(const EconomicReport& r) {
  json j;
  j["electricity_price_eur_per_mwh"] = r.electricity_price;
  j["fcr_revenue_eur"] = r.fcr_revenue;
  j["afrr_capacity_revenue_eur"] = r.afrr_capacity_revenue;
  j["afrr_activation_revenue"] = "not modeled";
  j["electricity_cost_eur"] = r.electricity_cost;
  j["savings_ratio"] = optional_number(r.savings_ratio);
  j["fcr_savings_ratio"] = optional_number(r.fcr_savings_ratio);
  j["afrr_savings_ratio"] = optional_number(r.afrr_savings_ratio);
  j["rounded_cost_eur"] = optional_number(r.assumptions.rounded_cost);
  j["savings_ratio_rounded_cost"] = optional_number(r.savings_ratio_rounded_cost);
  j["afrr_savings_ratio_rounded_cost"] = optional_number(r.afrr_savings_ratio_rounded_cost);
  json d;
  d["fcr_revenue_eur"] = format_eur(r.fcr_revenue);
  d["afrr_capacity_revenue_eur"] = format_eur(r.afrr_capacity_revenue);
  d["electricity_cost_eur"] = format_eur(r.electricity_cost);
  if (r.savings_ratio) d["savings_percent"] = format_percent(*r.savings_ratio);
  if (r.fcr_savings_ratio) d["fcr_savings_percent"] = format_percent(*r.fcr_savings_ratio);
  if (r.afrr_savings_ratio) d["afrr_savings_percent"] = format_percent(*r.afrr_savings_ratio);
  if (r.savings_ratio_rounded_cost)
    d["savings_percent_rounded_cost"] = format_percent(*r.savings_ratio_rounded_cost);
  if (r.afrr_savings_ratio_rounded_cost)
    d["afrr_savings_percent_rounded_cost"] = format_percent(*r.afrr_savings_ratio_rounded_cost);
  j["display"] = d;
  return j;
}

inline json to_json(const EconomicAssumptions& a) {
  json j;
  j["setpoint_mw"] = a.setpoint;
  j["hours"] = a.hours;
  j["spot_price_eur_per_mwh"] = a.spot_price;
  j["grid_fee_fraction"] = a.grid_fee_fraction;
  j["fcr_bid_mw"] = a.fcr_bid;
  j["afrr_quantity_mw"] = a.afrr_quantity;
  j["afrr_price_eur_per_mw_h"] = a.afrr_price;
  j["rounded_cost_eur"] = optional_number(a.rounded_cost);
  j["afrr_activation_eur_per_mwh"] = optional_number(a.afrr_activation_price);
  j["capex_min_eur"] = optional_number(a.capex_min);
  j["capex_max_eur"] = optional_number(a.capex_max);
  return j;
}

inline json to_json(const AnalysisResults& r) {
  json j;
  j["analysis"] = r.analysis;
  j["assumptions"] = r.assumptions;
  json res = json::object();
  if (r.unit) res["unit"] = to_json(*r.unit);
  if (r.eligibility) res["eligibility"] = to_json(*r.eligibility);
  if (r.compliance) res["compliance"] = to_json(*r.compliance);
  if (r.trajectory) {
    res["trajectory"] = {{"timestep_s", r.trajectory->timestep},
                         {"samples", r.trajectory->samples.size()},
                         {"horizon_s", r.trajectory->horizon()}};
  }
  if (r.hydrogen_kg) res["hydrogen_kg"] = *r.hydrogen_kg;
  if (r.allocation) res["allocation"] = to_json(*r.allocation);
  if (r.economics) res["economics"] = to_json(*r.economics);
  if (r.spot_average) {
    res["spot_average"] = {{"mean_price_eur_per_mwh", r.spot_average->mean_price},
                           {"qualifying_hours", r.spot_average->qualifying_hours}};
  }
  if (r.capacity_prices) {
    json p = json::object();
    for (auto b : day_blocks())
      if (auto v = r.capacity_prices->get(b)) p[b.label()] = *v;
    res["capacity_prices_eur_per_mw"] = p;
  }
  if (!r.coverage.empty()) {
    json cs = json::array();
    for (const auto& c : r.coverage) {
      cs.push_back({{"label", c.inputs.label},
                    {"required_reserve_mw", c.inputs.required_reserve_mw},
                    {"fleet_power_mw", c.inputs.fleet_power_mw},
                    {"symmetric", c.inputs.symmetric},
                    {"share", c.coverage.share},
                    {"symmetric_band", optional_number(c.coverage.symmetric_band)}});
    }
    res["fleet_coverage"] = cs;
  }
  if (!r.gradients.empty()) {
    json gs = json::array();
    for (const auto& g : r.gradients) {
      gs.push_back({{"label", g.inputs.label},
                    {"rated_power_mw", g.inputs.rated_power_mw},
                    {"min_load_percent", g.inputs.min_load_percent},
                    {"reserve_mw", g.inputs.reserve_mw},
                    {"trade_size_mw", g.inputs.trade_size_mw},
                    {"required_mw_per_s", g.inputs.required_mw_per_s},
                    {"min_ramp_per_s", g.min_ramp},
                    {"min_ramp_percent_per_s", g.min_ramp * 100.0}});
    }
    res["min_ramp"] = gs;
  }
  j["results"] = res;
  return j;
}

namespace detail {

/// Flattens a JSON tree into `path,value` rows; arrays index with [i].
inline void flatten(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten(j[i], prefix + "[" + std::to_string(i) + "]", os);
  } else {
    std::string v;
    if (j.is_string()) {
      v = j.get<std::string>();
    } else if (j.is_number_float()) {
      v = io::compact(j.get<double>());
    } else {
      v = j.dump();
    }
    if (v.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      v = q + "\"";
    }
    os << prefix << "," << v << "\n";
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace detail

inline std::string render_json(const AnalysisResults& r) { return to_json(r).dump(2) + "\n"; }

/// Flat `key,value` table of the whole report.
inline std::string render_csv(const AnalysisResults& r) {
  std::ostringstream os;
  os << "key,value\n";
  detail::flatten(to_json(r), "", os);
  return os.str();
}

inline std::string render_trajectory_csv(const PowerTrajectory& t) {
  std::ostringstream os;
  os << "time_s,power_mw\n";
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    os << io::compact(t.time(k)) << "," << io::number(t.samples[k]) << "\n";
  }
  return os.str();
}

inline std::string render_signal_csv(const ActivationSignal& s) {
  std::ostringstream os;
  os << "time_s,value\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    os << io::compact(s.time(k)) << "," << io::number(s.values()[k]) << "\n";
  }
  return os.str();
}

inline std::string render_price_csv(const CapacityPriceTable& t) {
  std::ostringstream os;
  os << "block_start_hour,price_eur_per_mw\n";
  for (auto b : day_blocks())
    if (auto v = t.get(b)) os << b.start_hour() << "," << io::number(*v) << "\n";
  return os.str();
}

inline std::string render_schedule_csv(const AllocationResult& a) {
  std::ostringstream os;
  os << "block,setpoint_mw,fcr_mw,afrr_pos_mw,revenue_eur,hydrogen_loss_kg,objective_eur\n";
  for (const auto& b : a.blocks) {
    os << b.block.label() << "," << io::number(b.setpoint) << "," << io::number(b.fcr) << ","
       << io::number(b.afrr) << "," << io::number(b.revenue) << ","
       << io::number(b.hydrogen_loss) << "," << io::number(b.objective) << "\n";
  }
  return os.str();
}

/// Writes the report in one format into `dir` and returns the files written.
/// json: report.json. csv: report.csv (+ schedule.csv for allocations).
/// plotdata: two-column CSVs for the trajectory, signal and capacity prices.
inline std::vector<std::filesystem::path> emit_report(const AnalysisResults& r,
                                                      ReportFormat format,
                                                      const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
  std::vector<std::filesystem::path> written;
  auto put = [&](const char* name, const std::string& text) {
    const auto path = dir / name;
    detail::write_text(path, text);
    written.push_back(path);
  };
  switch (format) {
    case ReportFormat::Json:
      put("report.json", render_json(r));
      break;
    case ReportFormat::Csv:
      put("report.csv", render_csv(r));
      if (r.allocation) put("schedule.csv", render_schedule_csv(*r.allocation));
      break;
    case ReportFormat::PlotData:
      if (r.trajectory) put("trajectory.csv", render_trajectory_csv(*r.trajectory));
      if (r.signal) put("signal.csv", render_signal_csv(*r.signal));
      if (r.capacity_prices) put("capacity_prices.csv", render_price_csv(*r.capacity_prices));
      break;
  }
  return written;
}

}  // namespace elyflex
