#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "elyflex/analysis.hpp"
#include "elyflex/presets.hpp"

namespace elyflex {
namespace {

namespace fs = std::filesystem;

const fs::path kDir = ELYFLEX_SCENARIOS;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path TempDir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("elyflex_report_" + name);
  fs::remove_all(d);
  return d;
}

TEST(Report, Demo4GridEligibilityJson) {
  AnalysisResults r;
  r.analysis = "eligibility";
  r.unit = find_preset("sunfire-ael")->to_unit(4.0);
  r.eligibility = check_eligibility(*r.unit, fcr(), 1.0, 3.0);
  const auto j = json::parse(render_json(r));
  const auto& e = j["results"]["eligibility"];
  EXPECT_FALSE(e["eligible"].get<bool>());
  EXPECT_EQ(e["limiting_constraint"], "ramp_deadline");
  for (const auto& c : e["constraints"]) {
    if (c["name"] == "ramp_deadline") {
      EXPECT_NEAR(c["margin"].get<double>(), -11.0, 0.05);
      EXPECT_FALSE(c["pass"].get<bool>());
    }
  }
}

TEST(Report, EmptyResultsSkeleton) {
  AnalysisResults r;
  const auto j = json::parse(render_json(r));
  EXPECT_TRUE(j.contains("analysis"));
  EXPECT_TRUE(j["assumptions"].is_object());
  EXPECT_TRUE(j["results"].is_object());
  EXPECT_TRUE(j["results"].empty());
  EXPECT_NO_THROW(render_csv(r));
}

TEST(Report, TrajectoryCsvRows) {
  const auto sc = load_scenario(kDir / "decoupling-100mw.scenario");
  const auto r = run_simulation(sc);
  const auto csv = render_trajectory_csv(*r.trajectory);
  EXPECT_EQ(csv.rfind("time_s,power_mw\n0,95.0\n1,94.0\n2,93.0\n", 0), 0u) << csv.substr(0, 60);
  EXPECT_TRUE(r.compliance->compliant);
  EXPECT_DOUBLE_EQ(r.compliance->max_delivery_delay, 5.0);
}

TEST(Report, EmitWritesAllFormats) {
  const auto r = run_allocation(load_scenario(kDir / "combined-100mw.scenario"));
  const auto dir = TempDir("alloc");
  std::vector<fs::path> files;
  for (auto f : {ReportFormat::Json, ReportFormat::Csv, ReportFormat::PlotData}) {
    auto w = emit_report(r, f, dir);
    files.insert(files.end(), w.begin(), w.end());
  }
  EXPECT_EQ(files.size(), 4u);
  const auto j = json::parse(Slurp(dir / "report.json"));
  EXPECT_NEAR(j["results"]["allocation"]["capacity_revenue_eur"].get<double>(), 20518.15, 1e-9);
  EXPECT_NE(Slurp(dir / "schedule.csv").find("NEGPOS_12_16,95.0,5.0,40.0"), std::string::npos);
  EXPECT_NE(Slurp(dir / "capacity_prices.csv").find("0,14.71\n4,21.92"), std::string::npos);
  EXPECT_NE(Slurp(dir / "report.csv").find("key,value"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Report, UnwritableDestinationThrows) {
  const auto dir = TempDir("blocked");
  fs::create_directories(dir);
  { std::ofstream(dir / "file") << "x"; }
  AnalysisResults r;
  EXPECT_THROW(emit_report(r, ReportFormat::Json, dir / "file" / "sub"), std::runtime_error);
  fs::remove_all(dir);
}

TEST(Report, EconomicsDisplayValues) {
  const auto r = run_economics(load_scenario(kDir / "economics-100mw.scenario"));
  const auto j = to_json(r);
  const auto& e = j["results"]["economics"];
  EXPECT_EQ(e["display"]["fcr_revenue_eur"], "1318.15");
  EXPECT_EQ(e["display"]["afrr_capacity_revenue_eur"], "19200.00");
  EXPECT_EQ(e["display"]["savings_percent"], "13.8");
  EXPECT_EQ(e["display"]["afrr_savings_percent_rounded_cost"], "12.8");
  EXPECT_EQ(e["afrr_activation_revenue"], "not modeled");
}

TEST(Analysis, GermanyGradients) {
  const auto r = run_economics(load_scenario(kDir / "germany.scenario"));
  ASSERT_EQ(r.gradients.size(), 2u);
  EXPECT_NEAR(r.gradients[0].min_ramp * 100, 0.0859, 5e-5);
  EXPECT_NEAR(r.gradients[1].min_ramp * 100, 3.4, 1e-12);
  ASSERT_EQ(r.coverage.size(), 1u);
  EXPECT_DOUBLE_EQ(r.coverage[0].coverage.share, 0.05);
}

}  // namespace
}  // namespace elyflex
