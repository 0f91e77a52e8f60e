#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "elyflex/dispatch.hpp"
#include "elyflex/markets.hpp"
#include "elyflex/model.hpp"
#include "elyflex/presets.hpp"

namespace elyflex {

/// Input error carrying the file, 1-based line (0 when not line-specific)
/// and offending key or row label.
class InputError : public std::runtime_error {
 public:
  InputError(std::string source, int line, std::string key, const std::string& what)
      : std::runtime_error(format(source, line, key, what)),
        source_(std::move(source)),
        line_(line),
        key_(std::move(key)) {}

  const std::string& source() const { return source_; }
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  static std::string format(const std::string& source, int line, const std::string& key,
                            const std::string& what) {
    std::string s = source;
    if (line > 0) s += ":" + std::to_string(line);
    s += ": ";
    if (!key.empty()) s += "'" + key + "': ";
    return s + what;
  }

  std::string source_;
  int line_;
  std::string key_;
};

namespace io {

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Shortest round-tripping decimal, always with a fractional part or
/// exponent so that values read back as floating point ("95.0").
inline std::string number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

/// Like number() but integers print without a fractional part.
inline std::string compact(double v) {
  std::string s = number(v);
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  return s;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CsvRow {
  int line;
  std::vector<std::string> cells;
};

/// Comma-separated rows below a mandatory header. Blank lines and lines
/// starting with '#' are skipped.
inline std::vector<CsvRow> read_csv(std::string_view text, const std::string& source,
                                    const std::vector<std::string>& header) {
  std::vector<CsvRow> rows;
  bool seen_header = false;
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line;
    if (line == 1 && raw.size() >= 3 && raw.substr(0, 3) == "\xEF\xBB\xBF") raw.remove_prefix(3);
    const auto t = trim(raw);
    if (t.empty() || t.front() == '#') continue;
    auto cells = split(t, ',');
    if (!seen_header) {
      if (cells != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw InputError(source, line, "", "expected header '" + want + "'");
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      throw InputError(source, line, "",
                       "expected " + std::to_string(header.size()) + " columns, got " +
                           std::to_string(cells.size()));
    }
    rows.push_back({line, std::move(cells)});
  }
  if (!seen_header) throw InputError(source, 0, "", "missing header");
  return rows;
}

/// Seconds since the Unix epoch for YYYY-MM-DDTHH:MM[:SS][Z|+HH:MM|-HH:MM].
/// A space may replace the 'T'. Timestamps without an offset are UTC.
inline std::optional<std::int64_t> parse_iso8601(std::string_view s) {
  s = trim(s);
  auto num = [&](std::size_t at, std::size_t len) -> std::optional<int> {
    if (at + len > s.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = at; i < at + len; ++i) {
      if (s[i] < '0' || s[i] > '9') return std::nullopt;
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':') {
    return std::nullopt;
  }
  auto y = num(0, 4), mo = num(5, 2), d = num(8, 2), h = num(11, 2), mi = num(14, 2);
  if (!y || !mo || !d || !h || !mi) return std::nullopt;
  std::size_t at = 16;
  int sec = 0;
  if (at < s.size() && s[at] == ':') {
    auto sv = num(at + 1, 2);
    if (!sv) return std::nullopt;
    sec = *sv;
    at += 3;
  }
  int offset = 0;
  if (at < s.size()) {
    if (s[at] == 'Z' && at + 1 == s.size()) {
      at += 1;
    } else if ((s[at] == '+' || s[at] == '-') && at + 6 == s.size() && s[at + 3] == ':') {
      auto oh = num(at + 1, 2), om = num(at + 4, 2);
      if (!oh || !om || *oh > 23 || *om > 59) return std::nullopt;
      offset = (*oh * 3600 + *om * 60) * (s[at] == '-' ? -1 : 1);
      at += 6;
    } else {
      return std::nullopt;
    }
  }
  using namespace std::chrono;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                           day{static_cast<unsigned>(*d)}};
  if (!ymd.ok() || *h > 23 || *mi > 59 || sec > 59) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + *h * 3600 + *mi * 60 + sec - offset;
}

}  // namespace io

// ---------------------------------------------------------------------------
// Data files

enum class PriceBasis { PerBlock, PerHour };

/// Capacity prices with header `block,price_eur_per_mw`. Labels are
/// normalized to the six canonical blocks; hourly prices are converted to
/// per-block prices.
inline CapacityPriceTable parse_capacity_prices(std::string_view text, const std::string& source,
                                                PriceBasis basis = PriceBasis::PerBlock) {
  const auto rows = io::read_csv(text, source, {"block", "price_eur_per_mw"});
  CapacityPriceTable table;
  std::map<int, int> seen;  // block index -> line
  for (const auto& row : rows) {
    const auto& label = row.cells[0];
    auto block = parse_block_label(label);
    if (!block) throw InputError(source, row.line, label, "unrecognized time block label");
    if (auto it = seen.find(block->index); it != seen.end()) {
      throw InputError(source, row.line, label,
                       "duplicate time block (first given on line " +
                           std::to_string(it->second) + ")");
    }
    auto price = io::to_double(row.cells[1]);
    if (!price) throw InputError(source, row.line, label, "price is not a number");
    if (*price < 0.0) throw InputError(source, row.line, label, "price must be >= 0");
    seen[block->index] = row.line;
    table.set(*block, basis == PriceBasis::PerHour ? *price * kHoursPerBlock : *price);
  }
  if (!table.complete()) {
    throw InputError(source, 0, table.missing_blocks().front().label(), "time block missing");
  }
  return table;
}

inline CapacityPriceTable load_capacity_prices(const std::filesystem::path& path,
                                               PriceBasis basis = PriceBasis::PerBlock) {
  return parse_capacity_prices(io::read_file(path), path.string(), basis);
}

/// Hourly spot prices with header `timestamp,price_eur_per_mwh`.
inline SpotPriceSeries parse_spot_prices(std::string_view text, const std::string& source) {
  const auto rows = io::read_csv(text, source, {"timestamp", "price_eur_per_mwh"});
  std::vector<SpotSample> samples;
  samples.reserve(rows.size());
  for (const auto& row : rows) {
    auto ts = io::parse_iso8601(row.cells[0]);
    if (!ts) throw InputError(source, row.line, row.cells[0], "invalid ISO-8601 timestamp");
    auto price = io::to_double(row.cells[1]);
    if (!price) throw InputError(source, row.line, row.cells[0], "price is not a number");
    if (!samples.empty() && *ts <= samples.back().timestamp) {
      throw InputError(source, row.line, row.cells[0], "timestamps must be strictly increasing");
    }
    samples.push_back({*ts, *price});
  }
  if (samples.empty()) throw InputError(source, 0, "", "no spot price rows");
  return SpotPriceSeries(std::move(samples));
}

inline SpotPriceSeries load_spot_prices(const std::filesystem::path& path) {
  return parse_spot_prices(io::read_file(path), path.string());
}

/// Activation signal with header `time_s,value`, uniformly spaced from 0.
inline ActivationSignal parse_signal(std::string_view text, const std::string& source,
                                     SignalKind kind) {
  const auto rows = io::read_csv(text, source, {"time_s", "value"});
  if (rows.size() < 2) throw InputError(source, 0, "", "signal needs at least two samples");
  std::vector<double> times, values;
  for (const auto& row : rows) {
    auto t = io::to_double(row.cells[0]);
    auto v = io::to_double(row.cells[1]);
    if (!t) throw InputError(source, row.line, row.cells[0], "time is not a number");
    if (!v) throw InputError(source, row.line, row.cells[0], "value is not a number");
    times.push_back(*t);
    values.push_back(*v);
  }
  if (times.front() != 0.0) throw InputError(source, rows.front().line, "time_s", "must start at 0");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw InputError(source, rows[1].line, "time_s", "timestep must be > 0");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs(times[k] - static_cast<double>(k) * dt) > 1e-9 * std::max(1.0, times[k])) {
      throw InputError(source, rows[k].line, "time_s", "non-uniform timestep");
    }
  }
  return ActivationSignal(kind, dt, std::move(values));
}

inline ActivationSignal load_signal(const std::filesystem::path& path, SignalKind kind) {
  return parse_signal(io::read_file(path), path.string(), kind);
}

inline SignalKind signal_kind_from_string(std::string_view s) {
  if (s == "frequency") return SignalKind::FrequencyDeviation;
  if (s == "setpoint") return SignalKind::SetpointRequest;
  throw std::invalid_argument("unknown signal kind '" + std::string(s) +
                              "' (expected frequency or setpoint)");
}

inline std::string_view to_string(SignalKind k) {
  return k == SignalKind::FrequencyDeviation ? "frequency" : "setpoint";
}

// ---------------------------------------------------------------------------
// Scenario files

/// One [unit] section as written. Percent values are kept as given and
/// converted to fractions when the unit is built.
struct UnitSpec {
  std::optional<std::string> name;
  std::optional<std::string> preset;
  std::optional<std::string> technology;
  std::optional<double> rated_power_mw;
  std::optional<double> min_load_percent;
  std::optional<double> ramp_up_percent_per_s;
  std::optional<double> ramp_down_percent_per_s;
  std::optional<std::string> efficiency;  // "load%:kWh/kg, ..."
  int count = 1;

  friend bool operator==(const UnitSpec&, const UnitSpec&) = default;
};

struct PriceSection {
  std::optional<std::string> fcr_capacity_csv;
  std::optional<std::string> fcr_capacity_eur_per_mw_block;  // six comma-separated values
  std::optional<double> afrr_capacity_eur_per_mw_h;
  std::optional<double> afrr_capacity_eur_per_mw_block;
  std::optional<std::string> spot_csv;
  std::optional<double> spot_price_eur_per_mwh;

  friend bool operator==(const PriceSection&, const PriceSection&) = default;
};

struct EconomicsSection {
  std::optional<double> setpoint_mw;
  std::optional<double> hours;
  std::optional<double> grid_fee_percent;
  std::optional<double> spot_threshold_eur_per_mwh;
  std::optional<double> fcr_bid_mw;
  std::optional<double> afrr_quantity_mw;
  std::optional<double> hydrogen_value_eur_per_kg;
  std::optional<double> rounded_cost_eur;
  std::optional<double> afrr_activation_eur_per_mwh;
  std::optional<double> capex_min_eur;
  std::optional<double> capex_max_eur;

  friend bool operator==(const EconomicsSection&, const EconomicsSection&) = default;
};

struct AllocationSection {
  std::optional<double> prereserved_fcr_mw;
  std::optional<double> setpoint_step_mw;

  friend bool operator==(const AllocationSection&, const AllocationSection&) = default;
};

struct SimulationSection {
  std::string product;
  double setpoint_mw = 0.0;
  double bid_mw = 0.0;
  std::optional<std::string> signal_csv;
  std::string signal_kind = "setpoint";

  friend bool operator==(const SimulationSection&, const SimulationSection&) = default;
};

struct CoverageSection {
  std::string label;
  double required_reserve_mw = 0.0;
  double fleet_power_mw = 0.0;
  bool symmetric = true;

  friend bool operator==(const CoverageSection&, const CoverageSection&) = default;
};

/// Minimum-ramp query on the gradient relation.
struct GradientSection {
  std::string label;
  double rated_power_mw = 0.0;
  double min_load_percent = 0.0;
  double reserve_mw = 0.0;
  double trade_size_mw = 0.0;
  double required_mw_per_s = 0.0;

  friend bool operator==(const GradientSection&, const GradientSection&) = default;
};

struct Scenario {
  std::optional<std::string> name;
  std::vector<UnitSpec> unit_specs;
  std::vector<std::string> products;  // product slugs, e.g. "fcr", "afrr-pos"
  PriceSection prices;
  std::optional<EconomicsSection> economics;
  std::optional<AllocationSection> allocation;
  std::optional<SimulationSection> simulation;
  std::vector<CoverageSection> coverage;
  std::vector<GradientSection> gradients;
  std::vector<std::string> output_formats;  // json, csv, plotdata

  // Directory that relative file references resolve against. Not part of
  // the scenario's content.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& ref) const {
    std::filesystem::path p(ref);
    return p.is_absolute() ? p : base_dir / p;
  }

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.name == b.name && a.unit_specs == b.unit_specs && a.products == b.products &&
           a.prices == b.prices && a.economics == b.economics &&
           a.allocation == b.allocation && a.simulation == b.simulation &&
           a.coverage == b.coverage && a.gradients == b.gradients &&
           a.output_formats == b.output_formats;
  }
};

/// Parses "25:52, 60:50, 100:55" (load percent : kWh/kg) into a curve.
inline EfficiencyCurve parse_efficiency(std::string_view text) {
  std::vector<EfficiencyBreakpoint> pts;
  for (const auto& item : io::split(text, ',')) {
    const auto parts = io::split(item, ':');
    if (parts.size() != 2) throw std::invalid_argument("efficiency point '" + item + "' is not load:kWh");
    auto load = io::to_double(parts[0]);
    auto se = io::to_double(parts[1]);
    if (!load || !se) throw std::invalid_argument("efficiency point '" + item + "' is not numeric");
    pts.push_back({*load / 100.0, *se});
  }
  return EfficiencyCurve(std::move(pts));
}

/// Builds the unit described by a spec: preset values first, explicit keys
/// override them.
inline ElectrolyzerUnit build_unit(const UnitSpec& spec) {
  std::optional<Preset> preset;
  if (spec.preset) {
    preset = find_preset(*spec.preset);
    if (!preset) throw std::invalid_argument("unknown preset '" + *spec.preset + "'");
  }
  auto pick = [&](const std::optional<double>& v, double Preset::*field,
                  const char* key) -> double {
    if (v) return *v;
    if (preset) return (*preset).*field;
    throw std::invalid_argument(std::string("missing required key ") + key);
  };
  const double rated = pick(spec.rated_power_mw, &Preset::power_mw, "rated_power_mw");
  const double min_pct = pick(spec.min_load_percent, &Preset::range_min_pct, "min_load_percent");
  const double up_pct =
      pick(spec.ramp_up_percent_per_s, &Preset::dynamic_pct_per_s, "ramp_up_percent_per_s");
  std::optional<double> down;
  if (spec.ramp_down_percent_per_s) down = *spec.ramp_down_percent_per_s / 100.0;
  Technology tech = Technology::AEL;
  if (spec.technology) {
    tech = technology_from_string(*spec.technology);
  } else if (preset) {
    tech = preset->technology;
  }
  std::optional<EfficiencyCurve> curve;
  if (spec.efficiency) curve = parse_efficiency(*spec.efficiency);
  std::string name = spec.name ? *spec.name : preset ? std::string(preset->slug) : "unit";
  if (!(min_pct > 0.0 && min_pct < 100.0)) {
    throw std::invalid_argument("min_load_fraction must lie in (0, 1): min_load_percent = " +
                                io::compact(min_pct));
  }
  return ElectrolyzerUnit(std::move(name), tech, rated, min_pct / 100.0, up_pct / 100.0, down,
                          std::move(curve));
}

/// Expands unit counts into the ordered unit list.
inline std::vector<ElectrolyzerUnit> scenario_units(const Scenario& s) {
  std::vector<ElectrolyzerUnit> out;
  for (const auto& spec : s.unit_specs) {
    const auto u = build_unit(spec);
    for (int i = 0; i < spec.count; ++i) out.push_back(u);
  }
  return out;
}

/// The single unit, or the aggregate when the scenario describes a fleet.
inline ElectrolyzerUnit scenario_plant(const Scenario& s) {
  auto units = scenario_units(s);
  if (units.empty()) throw std::invalid_argument("scenario defines no [unit]");
  if (units.size() == 1) return units.front();
  return aggregate(Fleet{std::move(units)});
}

namespace detail {

class SectionReader {
 public:
  SectionReader(std::string source, std::string section, int line)
      : source_(std::move(source)), section_(std::move(section)), line_(line) {}

  void add(const std::string& key, const std::string& value, int line) {
    if (values_.count(key)) {
      throw InputError(source_, line, key, "duplicate key in [" + section_ + "]");
    }
    values_[key] = {value, line};
  }

  std::optional<std::string> text(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second.first;
  }

  std::optional<double> num(const std::string& key) {
    auto t = text(key);
    if (!t) return std::nullopt;
    auto v = io::to_double(*t);
    if (!v) throw InputError(source_, line_of(key), key, "'" + *t + "' is not a number");
    return v;
  }

  double require_num(const std::string& key) {
    auto v = num(key);
    if (!v) throw missing(key);
    return *v;
  }

  std::string require_text(const std::string& key) {
    auto v = text(key);
    if (!v) throw missing(key);
    return *v;
  }

  std::optional<bool> flag(const std::string& key) {
    auto t = text(key);
    if (!t) return std::nullopt;
    if (*t == "true" || *t == "yes" || *t == "1") return true;
    if (*t == "false" || *t == "no" || *t == "0") return false;
    throw InputError(source_, line_of(key), key, "'" + *t + "' is not a boolean");
  }

  InputError missing(const std::string& key) const {
    return InputError(source_, line_, key, "missing required key in [" + section_ + "]");
  }

  InputError invalid(const std::string& key, const std::string& what) const {
    return InputError(source_, line_of(key), key, what);
  }

  int line_of(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? line_ : it->second.second;
  }

  void reject_unknown() const {
    for (const auto& [key, v] : values_) {
      if (!used_.count(key)) {
        throw InputError(source_, v.second, key, "unknown key in [" + section_ + "]");
      }
    }
  }

  const std::string& section() const { return section_; }
  int line() const { return line_; }

 private:
  std::string source_;
  std::string section_;
  int line_;
  std::map<std::string, std::pair<std::string, int>> values_;
  std::set<std::string> used_;
};

template <typename F>
auto guarded(SectionReader& r, const std::string& key, F&& f) {
  try {
    return f();
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw r.invalid(key, e.what());
  }
}

}  // namespace detail

/// Parses the sectioned key-value scenario format. Every model invariant is
/// checked here; errors name the offending key and line.
inline Scenario parse_scenario(std::string_view text, const std::string& source,
                               const std::filesystem::path& base_dir = {}) {
  using detail::SectionReader;
  std::vector<SectionReader> sections;
  std::optional<SectionReader> top;  // keys before any section header
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto t = io::trim(raw);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw InputError(source, line, std::string(t), "malformed section header");
      sections.emplace_back(source, std::string(io::trim(t.substr(1, t.size() - 2))), line);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(source, line, std::string(t), "expected 'key = value'");
    }
    const std::string key(io::trim(t.substr(0, eq)));
    const std::string value(io::trim(t.substr(eq + 1)));
    if (key.empty()) throw InputError(source, line, "", "empty key");
    if (sections.empty()) {
      if (!top) top.emplace(source, "scenario", line);
      top->add(key, value, line);
    } else {
      sections.back().add(key, value, line);
    }
  }

  Scenario sc;
  sc.base_dir = base_dir;
  if (top) {
    sc.name = top->text("name");
    top->reject_unknown();
  }

  std::set<std::string> singletons;
  for (auto& r : sections) {
    const auto& sec = r.section();
    if (sec != "unit" && sec != "coverage" && sec != "gradient") {
      if (!singletons.insert(sec).second) {
        throw InputError(source, r.line(), sec, "section may appear only once");
      }
    }
    if (sec == "unit") {
      UnitSpec u;
      u.name = r.text("name");
      u.preset = r.text("preset");
      u.technology = r.text("technology");
      u.rated_power_mw = r.num("rated_power_mw");
      u.min_load_percent = r.num("min_load_percent");
      u.ramp_up_percent_per_s = r.num("ramp_up_percent_per_s");
      u.ramp_down_percent_per_s = r.num("ramp_down_percent_per_s");
      u.efficiency = r.text("efficiency");
      if (auto c = r.num("count")) {
        if (*c < 1 || *c != std::floor(*c)) throw r.invalid("count", "must be a positive integer");
        u.count = static_cast<int>(*c);
      }
      r.reject_unknown();
      if (u.preset && !find_preset(*u.preset)) throw r.invalid("preset", "unknown preset '" + *u.preset + "'");
      if (!u.preset) {
        for (const char* k : {"rated_power_mw", "min_load_percent", "ramp_up_percent_per_s"}) {
          if (!r.text(k)) throw r.missing(k);
        }
      }
      if (u.min_load_percent && !(*u.min_load_percent > 0.0 && *u.min_load_percent < 100.0)) {
        throw r.invalid("min_load_percent",
                        "min_load_fraction must lie in (0, 1); got " +
                            io::compact(*u.min_load_percent) + " %");
      }
      if (u.rated_power_mw && !(*u.rated_power_mw > 0.0))
        throw r.invalid("rated_power_mw", "rated power must be > 0");
      if (u.ramp_up_percent_per_s && !(*u.ramp_up_percent_per_s > 0.0))
        throw r.invalid("ramp_up_percent_per_s", "ramp must be > 0");
      if (u.ramp_down_percent_per_s && !(*u.ramp_down_percent_per_s > 0.0))
        throw r.invalid("ramp_down_percent_per_s", "ramp must be > 0");
      if (u.technology) {
        detail::guarded(r, "technology", [&] { return technology_from_string(*u.technology); });
      }
      detail::guarded(r, u.efficiency ? "efficiency" : "unit", [&] { return build_unit(u); });
      sc.unit_specs.push_back(std::move(u));
    } else if (sec == "products") {
      for (const auto& p : io::split(r.require_text("list"), ',')) {
        auto prod = detail::guarded(r, "list", [&] { return product_from_string(p); });
        sc.products.push_back(product_slug(prod));
      }
      r.reject_unknown();
    } else if (sec == "prices") {
      auto& p = sc.prices;
      p.fcr_capacity_csv = r.text("fcr_capacity_csv");
      p.fcr_capacity_eur_per_mw_block = r.text("fcr_capacity_eur_per_mw_block");
      p.afrr_capacity_eur_per_mw_h = r.num("afrr_capacity_eur_per_mw_h");
      p.afrr_capacity_eur_per_mw_block = r.num("afrr_capacity_eur_per_mw_block");
      p.spot_csv = r.text("spot_csv");
      p.spot_price_eur_per_mwh = r.num("spot_price_eur_per_mwh");
      r.reject_unknown();
      if (p.fcr_capacity_csv && p.fcr_capacity_eur_per_mw_block)
        throw r.invalid("fcr_capacity_eur_per_mw_block", "only one FCR price source allowed");
      if (p.afrr_capacity_eur_per_mw_h && p.afrr_capacity_eur_per_mw_block)
        throw r.invalid("afrr_capacity_eur_per_mw_block", "only one aFRR price source allowed");
      if (p.spot_csv && p.spot_price_eur_per_mwh)
        throw r.invalid("spot_price_eur_per_mwh", "only one spot price source allowed");
      for (const char* k : {"afrr_capacity_eur_per_mw_h", "afrr_capacity_eur_per_mw_block"}) {
        if (auto v = r.num(k); v && *v < 0.0) throw r.invalid(k, "price must be >= 0");
      }
      if (p.fcr_capacity_eur_per_mw_block) {
        const auto vals = io::split(*p.fcr_capacity_eur_per_mw_block, ',');
        if (vals.size() != kBlocksPerDay)
          throw r.invalid("fcr_capacity_eur_per_mw_block", "expected six block prices");
        for (const auto& v : vals) {
          auto d = io::to_double(v);
          if (!d || *d < 0.0)
            throw r.invalid("fcr_capacity_eur_per_mw_block", "'" + v + "' is not a price >= 0");
        }
      }
    } else if (sec == "economics") {
      EconomicsSection e;
      e.setpoint_mw = r.num("setpoint_mw");
      e.hours = r.num("hours");
      e.grid_fee_percent = r.num("grid_fee_percent");
      e.spot_threshold_eur_per_mwh = r.num("spot_threshold_eur_per_mwh");
      e.fcr_bid_mw = r.num("fcr_bid_mw");
      e.afrr_quantity_mw = r.num("afrr_quantity_mw");
      e.hydrogen_value_eur_per_kg = r.num("hydrogen_value_eur_per_kg");
      e.rounded_cost_eur = r.num("rounded_cost_eur");
      e.afrr_activation_eur_per_mwh = r.num("afrr_activation_eur_per_mwh");
      e.capex_min_eur = r.num("capex_min_eur");
      e.capex_max_eur = r.num("capex_max_eur");
      r.reject_unknown();
      for (const char* k : {"setpoint_mw", "hours", "grid_fee_percent", "fcr_bid_mw",
                            "afrr_quantity_mw", "hydrogen_value_eur_per_kg", "rounded_cost_eur"}) {
        if (auto v = r.num(k); v && *v < 0.0) throw r.invalid(k, "must be >= 0");
      }
      sc.economics = e;
    } else if (sec == "allocation") {
      AllocationSection a;
      a.prereserved_fcr_mw = r.num("prereserved_fcr_mw");
      a.setpoint_step_mw = r.num("setpoint_step_mw");
      r.reject_unknown();
      if (a.prereserved_fcr_mw && *a.prereserved_fcr_mw < 0.0)
        throw r.invalid("prereserved_fcr_mw", "must be >= 0");
      if (a.setpoint_step_mw && !(*a.setpoint_step_mw > 0.0))
        throw r.invalid("setpoint_step_mw", "must be > 0");
      sc.allocation = a;
    } else if (sec == "simulation") {
      SimulationSection s;
      s.product = r.require_text("product");
      detail::guarded(r, "product", [&] { return product_from_string(s.product); });
      s.setpoint_mw = r.require_num("setpoint_mw");
      s.bid_mw = r.require_num("bid_mw");
      s.signal_csv = r.text("signal_csv");
      if (auto k = r.text("signal_kind")) s.signal_kind = *k;
      r.reject_unknown();
      detail::guarded(r, "signal_kind", [&] { return signal_kind_from_string(s.signal_kind); });
      if (!(s.bid_mw >= 0.0)) throw r.invalid("bid_mw", "must be >= 0");
      sc.simulation = s;
    } else if (sec == "coverage") {
      CoverageSection c;
      c.label = r.text("label").value_or("coverage");
      c.required_reserve_mw = r.require_num("required_reserve_mw");
      c.fleet_power_mw = r.require_num("fleet_power_mw");
      c.symmetric = r.flag("symmetric").value_or(true);
      r.reject_unknown();
      if (!(c.fleet_power_mw > 0.0)) throw r.invalid("fleet_power_mw", "must be > 0");
      if (!(c.required_reserve_mw >= 0.0)) throw r.invalid("required_reserve_mw", "must be >= 0");
      sc.coverage.push_back(c);
    } else if (sec == "gradient") {
      GradientSection g;
      g.label = r.text("label").value_or("gradient");
      g.rated_power_mw = r.require_num("rated_power_mw");
      g.min_load_percent = r.require_num("min_load_percent");
      g.reserve_mw = r.require_num("reserve_mw");
      g.trade_size_mw = r.require_num("trade_size_mw");
      g.required_mw_per_s = r.require_num("required_mw_per_s");
      r.reject_unknown();
      if (!(g.rated_power_mw > 0.0)) throw r.invalid("rated_power_mw", "must be > 0");
      if (!(g.min_load_percent >= 0.0 && g.min_load_percent < 100.0))
        throw r.invalid("min_load_percent", "must lie in [0, 100)");
      if (!(g.reserve_mw > 0.0)) throw r.invalid("reserve_mw", "must be > 0");
      if (!(g.trade_size_mw > 0.0)) throw r.invalid("trade_size_mw", "must be > 0");
      if (!(g.required_mw_per_s >= 0.0)) throw r.invalid("required_mw_per_s", "must be >= 0");
      sc.gradients.push_back(g);
    } else if (sec == "output") {
      for (const auto& f : io::split(r.require_text("formats"), ',')) {
        if (f != "json" && f != "csv" && f != "plotdata")
          throw r.invalid("formats", "unknown format '" + f + "'");
        sc.output_formats.push_back(f);
      }
      r.reject_unknown();
    } else {
      throw InputError(source, r.line(), sec, "unknown section");
    }
  }
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(io::read_file(path), path.string(), path.parent_path());
}

/// Serializes a scenario back into the text format. Loading the result
/// yields an equal Scenario.
inline std::string to_text(const Scenario& sc) {
  std::ostringstream os;
  auto kv = [&os](const char* key, const auto& value) {
    using T = std::decay_t<decltype(value)>;
    if constexpr (std::is_same_v<T, std::optional<double>>) {
      if (value) os << key << " = " << io::compact(*value) << "\n";
    } else if constexpr (std::is_same_v<T, std::optional<std::string>>) {
      if (value) os << key << " = " << *value << "\n";
    } else if constexpr (std::is_same_v<T, double>) {
      os << key << " = " << io::compact(value) << "\n";
    } else {
      os << key << " = " << value << "\n";
    }
  };
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
  };
  if (sc.name) kv("name", *sc.name);
  for (const auto& u : sc.unit_specs) {
    os << "\n[unit]\n";
    kv("name", u.name);
    kv("preset", u.preset);
    kv("technology", u.technology);
    kv("rated_power_mw", u.rated_power_mw);
    kv("min_load_percent", u.min_load_percent);
    kv("ramp_up_percent_per_s", u.ramp_up_percent_per_s);
    kv("ramp_down_percent_per_s", u.ramp_down_percent_per_s);
    kv("efficiency", u.efficiency);
    if (u.count != 1) kv("count", u.count);
  }
  if (!sc.products.empty()) {
    os << "\n[products]\n";
    kv("list", join(sc.products));
  }
  const auto& p = sc.prices;
  if (p != PriceSection{}) {
    os << "\n[prices]\n";
    kv("fcr_capacity_csv", p.fcr_capacity_csv);
    kv("fcr_capacity_eur_per_mw_block", p.fcr_capacity_eur_per_mw_block);
    kv("afrr_capacity_eur_per_mw_h", p.afrr_capacity_eur_per_mw_h);
    kv("afrr_capacity_eur_per_mw_block", p.afrr_capacity_eur_per_mw_block);
    kv("spot_csv", p.spot_csv);
    kv("spot_price_eur_per_mwh", p.spot_price_eur_per_mwh);
  }
  if (const auto& e = sc.economics) {
    os << "\n[economics]\n";
    kv("setpoint_mw", e->setpoint_mw);
    kv("hours", e->hours);
    kv("grid_fee_percent", e->grid_fee_percent);
    kv("spot_threshold_eur_per_mwh", e->spot_threshold_eur_per_mwh);
    kv("fcr_bid_mw", e->fcr_bid_mw);
    kv("afrr_quantity_mw", e->afrr_quantity_mw);
    kv("hydrogen_value_eur_per_kg", e->hydrogen_value_eur_per_kg);
    kv("rounded_cost_eur", e->rounded_cost_eur);
    kv("afrr_activation_eur_per_mwh", e->afrr_activation_eur_per_mwh);
    kv("capex_min_eur", e->capex_min_eur);
    kv("capex_max_eur", e->capex_max_eur);
  }
  if (const auto& a = sc.allocation) {
    os << "\n[allocation]\n";
    kv("prereserved_fcr_mw", a->prereserved_fcr_mw);
    kv("setpoint_step_mw", a->setpoint_step_mw);
  }
  if (const auto& s = sc.simulation) {
    os << "\n[simulation]\n";
    kv("product", s->product);
    kv("setpoint_mw", s->setpoint_mw);
    kv("bid_mw", s->bid_mw);
    kv("signal_csv", s->signal_csv);
    kv("signal_kind", s->signal_kind);
  }
  for (const auto& c : sc.coverage) {
    os << "\n[coverage]\n";
    kv("label", c.label);
    kv("required_reserve_mw", c.required_reserve_mw);
    kv("fleet_power_mw", c.fleet_power_mw);
    kv("symmetric", c.symmetric ? "true" : "false");
  }
  for (const auto& g : sc.gradients) {
    os << "\n[gradient]\n";
    kv("label", g.label);
    kv("rated_power_mw", g.rated_power_mw);
    kv("min_load_percent", g.min_load_percent);
    kv("reserve_mw", g.reserve_mw);
    kv("trade_size_mw", g.trade_size_mw);
    kv("required_mw_per_s", g.required_mw_per_s);
  }
  if (!sc.output_formats.empty()) {
    os << "\n[output]\n";
    kv("formats", join(sc.output_formats));
  }
  return os.str();
}

// Scenario-level accessors used by the command-line tool.

inline std::vector<BalancingProduct> scenario_products(const Scenario& sc) {
  std::vector<BalancingProduct> out;
  for (const auto& p : sc.products) out.push_back(product_from_string(p));
  return out;
}

inline std::optional<CapacityPriceTable> scenario_fcr_prices(const Scenario& sc) {
  if (sc.prices.fcr_capacity_csv) return load_capacity_prices(sc.resolve(*sc.prices.fcr_capacity_csv));
  if (sc.prices.fcr_capacity_eur_per_mw_block) {
    std::array<double, kBlocksPerDay> v{};
    const auto vals = io::split(*sc.prices.fcr_capacity_eur_per_mw_block, ',');
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = *io::to_double(vals.at(i));
    return CapacityPriceTable::from_array(v);
  }
  return std::nullopt;
}

/// aFRR capacity price per MW and 4 h block.
inline std::optional<double> scenario_afrr_price_per_block(const Scenario& sc) {
  if (sc.prices.afrr_capacity_eur_per_mw_h) return *sc.prices.afrr_capacity_eur_per_mw_h * kHoursPerBlock;
  return sc.prices.afrr_capacity_eur_per_mw_block;
}

}  // namespace elyflex
