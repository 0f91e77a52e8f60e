// elyflex: balancing-capacity eligibility, dispatch simulation, bid
// allocation and economics for electrolyzer plants.
//
// Exit codes: 0 success / eligible / compliant, 2 analysis negative
// (ineligible, non-compliant), 1 input error.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "elyflex/elyflex.hpp"

namespace fs = std::filesystem;
using namespace elyflex;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNegative = 2;

constexpr const char* kDirEnv = "ELYFLEX_SCENARIO_DIR";

/// Resolves a file reference against the working directory, then against
/// $ELYFLEX_SCENARIO_DIR.
fs::path locate(const std::string& ref) {
  fs::path p(ref);
  if (fs::exists(p) || p.is_absolute()) return p;
  if (const char* dir = std::getenv(kDirEnv)) {
    auto alt = fs::path(dir) / p;
    if (fs::exists(alt)) return alt;
  }
  return p;
}

/// Replaces every `@file` argument (or `--flag=@file`) with the file's
/// trimmed contents.
std::vector<std::string> expand_file_refs(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = 0; i < argc; ++i) {
    std::string a = argv[i];
    if (i > 0) {
      std::string prefix;
      std::string ref;
      if (a.size() > 1 && a[0] == '@') {
        ref = a.substr(1);
      } else if (auto eq = a.find("=@"); a.rfind("--", 0) == 0 && eq != std::string::npos) {
        prefix = a.substr(0, eq + 1);
        ref = a.substr(eq + 2);
      }
      if (!ref.empty()) {
        a = prefix + std::string(io::trim(io::read_file(locate(ref))));
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

/// Unit given inline as `key=value;key=value` (or newline separated), using
/// the [unit] keys of the scenario format.
UnitSpec parse_unit_inline(const std::string& text) {
  std::string body;
  for (char c : text) body += c == ';' ? '\n' : c;
  if (body.find("[unit]") == std::string::npos) body = "[unit]\n" + body;
  auto sc = parse_scenario(body, "--unit");
  if (sc.unit_specs.size() != 1) throw std::invalid_argument("--unit must describe exactly one unit");
  return sc.unit_specs.front();
}

/// Fleet as `preset:count,preset:count` or a scenario fragment with
/// several [unit] sections.
Fleet parse_fleet(const std::string& text) {
  Scenario sc;
  if (text.find('[') != std::string::npos) {
    sc = parse_scenario(text, "--fleet");
  } else {
    for (const auto& item : io::split(text, ',')) {
      const auto parts = io::split(item, ':');
      UnitSpec u;
      u.preset = parts.at(0);
      if (!find_preset(*u.preset)) throw std::invalid_argument("unknown preset '" + *u.preset + "'");
      if (parts.size() == 2) {
        auto n = io::to_double(parts[1]);
        if (!n || *n < 1 || *n != static_cast<int>(*n))
          throw std::invalid_argument("bad unit count in '" + item + "'");
        u.count = static_cast<int>(*n);
      } else if (parts.size() != 1) {
        throw std::invalid_argument("bad fleet entry '" + item + "'");
      }
      sc.unit_specs.push_back(u);
    }
  }
  Fleet f{scenario_units(sc)};
  if (f.units.empty()) throw std::invalid_argument("--fleet describes no units");
  return f;
}

std::string pct(double fraction) { return io::compact(fraction * 100.0); }

void print_eligibility_text(const ElectrolyzerUnit& u, const EligibilityReport& r,
                            std::ostream& os) {
  os << "unit     " << u.name() << " (" << to_string(u.technology()) << "), "
     << io::compact(u.rated_power()) << " MW, band " << io::compact(u.min_power()) << "-"
     << io::compact(u.max_power()) << " MW, ramp up " << pct(u.ramp_up()) << " %/s, down "
     << pct(u.ramp_down()) << " %/s\n";
  os << "product  " << r.product.label() << ", min " << io::compact(r.product.min_bid)
     << " MW, step " << io::compact(r.product.trade_increment) << " MW, deadline "
     << io::compact(r.product.availability) << " s\n";
  os << "bid      " << io::compact(r.bid) << " MW at setpoint " << io::compact(r.setpoint)
     << " MW\n";
  char buf[160];
  for (const auto& c : r.constraints) {
    std::snprintf(buf, sizeof buf, "  %-14s %-4s required %-10.6g actual %-10.6g margin %.6g\n",
                  c.name.c_str(), c.pass ? "ok" : "FAIL", c.required_value, c.actual_value,
                  c.margin);
    os << buf;
  }
  os << "result   " << (r.eligible ? "ELIGIBLE" : "INELIGIBLE");
  if (r.limiting_constraint) os << " (" << *r.limiting_constraint << ")";
  os << "\n";
}

struct JobOutput {
  int code = kOk;
  std::string out;
  std::string err;
};

std::vector<ReportFormat> formats_for(const Scenario& sc) {
  std::vector<ReportFormat> f;
  for (const auto& s : sc.output_formats) f.push_back(report_format_from_string(s));
  if (f.empty()) f = {ReportFormat::Json, ReportFormat::Csv, ReportFormat::PlotData};
  return f;
}

template <typename Run, typename Summarize>
JobOutput run_scenario_job(const std::string& ref, const fs::path& out_dir, Run run,
                           Summarize summarize) {
  JobOutput job;
  std::ostringstream os;
  try {
    const auto sc = load_scenario(locate(ref));
    const AnalysisResults r = run(sc);
    for (auto f : formats_for(sc)) emit_report(r, f, out_dir);
    job.code = summarize(r, os);
    os << "wrote " << out_dir.string() << "\n";
  } catch (const std::exception& e) {
    job.code = kInputError;
    job.err = "error: " + std::string(e.what()) + "\n";
  }
  job.out = os.str();
  return job;
}

/// Runs one job per scenario, up to `jobs` at a time, and reports in input
/// order. The exit code is the worst one seen.
template <typename Run, typename Summarize>
int run_scenarios(const std::vector<std::string>& refs, const std::string& out, int jobs,
                  Run run, Summarize summarize) {
  std::vector<JobOutput> results(refs.size());
  auto dir_for = [&](std::size_t i) {
    return refs.size() == 1 ? fs::path(out) : fs::path(out) / fs::path(refs[i]).stem();
  };
  const std::size_t width = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t start = 0; start < refs.size(); start += width) {
    std::vector<std::future<JobOutput>> batch;
    for (std::size_t i = start; i < std::min(refs.size(), start + width); ++i) {
      batch.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred,
                                 [&, i] { return run_scenario_job(refs[i], dir_for(i), run, summarize); }));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) results[start + k] = batch[k].get();
  }
  int code = kOk;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs.size() > 1) std::cout << "== " << refs[i] << "\n";
    std::cout << results[i].out;
    std::cerr << results[i].err;
    if (results[i].code == kInputError || (results[i].code == kNegative && code == kOk)) {
      code = results[i].code;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balancing-capacity analysis for electrolyzer plants"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  // eligibility
  std::string unit_text, preset_name, fleet_text, product_name = "fcr", format = "text";
  std::optional<double> rated_override, setpoint;
  double bid = 0.0;
  auto* elig = app.add_subcommand("eligibility", "Check one capacity bid against a product");
  auto* unit_opt = elig->add_option("--unit", unit_text,
                                    "Unit as key=value;... using [unit] keys, or @file");
  auto* preset_opt = elig->add_option("--preset", preset_name, "Preset name (see `presets list`)");
  auto* fleet_opt = elig->add_option("--fleet", fleet_text, "preset:count,... or @file with [unit] sections");
  unit_opt->excludes(preset_opt)->excludes(fleet_opt);
  preset_opt->excludes(fleet_opt);
  elig->add_option("--rated-power", rated_override, "Override the preset's rated power (MW)")
      ->needs(preset_opt);
  elig->add_option("--product", product_name, "fcr, afrr-pos, afrr-neg, mfrr-pos, mfrr-neg")
      ->capture_default_str();
  elig->add_option("--bid", bid, "Offered capacity (MW)")->required();
  elig->add_option("--setpoint", setpoint,
                   "Operating setpoint (MW); default: highest setpoint hosting the bid");
  elig->add_option("--format", format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();

  // simulate / allocate / economics share the scenario batch options.
  std::vector<std::string> scenarios;
  std::string out_dir, signal_file, prices_file;
  int jobs = 1;
  auto add_batch = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenarios, "Scenario file(s)")->required();
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--jobs", jobs, "Scenario files processed in parallel")
        ->check(CLI::PositiveNumber);
  };
  auto* sim = app.add_subcommand("simulate", "Ramp-limited response to an activation signal");
  add_batch(sim);
  sim->add_option("--signal", signal_file, "Signal CSV (time_s,value); overrides the scenario");

  auto* alloc = app.add_subcommand("allocate", "Per-block FCR/aFRR capacity bids for one day");
  add_batch(alloc);
  alloc->add_option("--prices", prices_file,
                    "FCR capacity price CSV (block,price_eur_per_mw); overrides the scenario");

  auto* econ = app.add_subcommand("economics", "Capacity revenue against electricity cost");
  add_batch(econ);

  auto* presets = app.add_subcommand("presets", "Built-in electrolyzer catalog");
  presets->require_subcommand(1);
  presets->add_subcommand("list", "List all presets");
  std::string show_name;
  auto* show = presets->add_subcommand("show", "Show one preset");
  show->add_option("name", show_name)->required();

  std::vector<std::string> args;
  try {
    args = expand_file_refs(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  std::vector<char*> cargs;
  for (auto& a : args) cargs.push_back(a.data());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*elig) {
      ElectrolyzerUnit unit = [&] {
        if (!unit_text.empty()) return build_unit(parse_unit_inline(unit_text));
        if (!preset_name.empty()) {
          auto p = find_preset(preset_name);
          if (!p) throw std::invalid_argument("unknown preset '" + preset_name + "'");
          return p->to_unit(rated_override);
        }
        if (!fleet_text.empty()) return aggregate(parse_fleet(fleet_text));
        throw std::invalid_argument("one of --unit, --preset or --fleet is required");
      }();
      const auto product = product_from_string(product_name);
      if (!(bid > 0.0)) throw std::invalid_argument("--bid must be > 0");
      double sp = 0.0;
      if (setpoint) {
        sp = *setpoint;
      } else {
        switch (product.direction) {
          case ReserveDirection::SYM: sp = std::max(unit.min_power(), unit.max_power() - bid); break;
          case ReserveDirection::POS: sp = unit.max_power(); break;
          case ReserveDirection::NEG: sp = unit.min_power(); break;
        }
      }
      const auto report = check_eligibility(unit, product, bid, sp);
      AnalysisResults r;
      r.analysis = "eligibility";
      r.unit = unit;
      r.eligibility = report;
      if (format == "json") {
        std::cout << render_json(r);
      } else if (format == "csv") {
        std::cout << render_csv(r);
      } else {
        print_eligibility_text(unit, report, std::cout);
      }
      return report.eligible ? kOk : kNegative;
    }

    if (*sim) {
      std::optional<fs::path> sig;
      if (!signal_file.empty()) sig = locate(signal_file);
      return run_scenarios(
          scenarios, out_dir, jobs, [&](const Scenario& sc) { return run_simulation(sc, sig); },
          [](const AnalysisResults& r, std::ostream& os) {
            const auto& c = *r.compliance;
            os << "compliant " << (c.compliant ? "yes" : "no") << ", max delivery delay "
               << io::compact(c.max_delivery_delay) << " s";
            if (c.first_violation_time) {
              os << ", first violation at " << io::compact(*c.first_violation_time) << " s";
            }
            os << "\n";
            return c.compliant ? kOk : kNegative;
          });
    }

    if (*alloc) {
      std::optional<fs::path> prices;
      if (!prices_file.empty()) prices = locate(prices_file);
      return run_scenarios(
          scenarios, out_dir, jobs, [&](const Scenario& sc) { return run_allocation(sc, prices); },
          [](const AnalysisResults& r, std::ostream& os) {
            for (const auto& b : r.allocation->blocks) {
              os << b.block.label() << "  setpoint " << io::compact(b.setpoint) << " MW  FCR "
                 << io::compact(b.fcr) << " MW  aFRR+ " << io::compact(b.afrr) << " MW  "
                 << format_eur(b.revenue) << " EUR\n";
            }
            os << "capacity revenue " << format_eur(r.allocation->capacity_revenue)
               << " EUR/day, objective " << format_eur(r.allocation->objective) << " EUR/day\n";
            return kOk;
          });
    }

    if (*econ) {
      return run_scenarios(
          scenarios, out_dir, jobs, [](const Scenario& sc) { return run_economics(sc); },
          [](const AnalysisResults& r, std::ostream& os) {
            if (r.economics) {
              const auto& e = *r.economics;
              os << "FCR revenue " << format_eur(e.fcr_revenue) << " EUR/day, aFRR capacity "
                 << format_eur(e.afrr_capacity_revenue) << " EUR/day, electricity "
                 << format_eur(e.electricity_cost) << " EUR/day\n";
              if (e.savings_ratio) os << "savings " << format_percent(*e.savings_ratio) << " %\n";
              if (e.afrr_savings_ratio_rounded_cost) {
                os << "aFRR savings vs rounded cost "
                   << format_percent(*e.afrr_savings_ratio_rounded_cost) << " %\n";
              }
            }
            for (const auto& c : r.coverage) {
              os << c.inputs.label << ": share " << format_percent(c.coverage.share) << " %";
              if (c.coverage.symmetric_band)
                os << ", band " << format_percent(*c.coverage.symmetric_band) << " %";
              os << "\n";
            }
            for (const auto& g : r.gradients) {
              char buf[64];
              std::snprintf(buf, sizeof buf, "%.4g", g.min_ramp * 100.0);
              os << g.inputs.label << ": minimum ramp " << buf << " %/s\n";
            }
            return kOk;
          });
    }

    if (*presets) {
      if (*show) {
        auto p = find_preset(show_name);
        if (!p) throw std::invalid_argument("unknown preset '" + show_name + "'");
        std::cout << p->describe() << "\n";
      } else {
        for (const auto& p : kPresets) std::cout << p.describe() << "\n";
        std::cout << "* from manufacturer discussions or calculated\n";
      }
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}
