#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

const std::string kCli = ELYFLEX_CLI;
const fs::path kDir = ELYFLEX_SCENARIOS;

struct Run {
  int code;
  std::string out;
};

Run Cli(const std::string& args, const std::string& env = "") {
  const auto capture = fs::temp_directory_path() / ("elyflex_cli_" + std::to_string(::getpid()) + ".txt");
  const std::string cmd = env + " '" + kCli + "' " + args + " > '" + capture.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(capture);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string Scenario(const std::string& name) { return "'" + (kDir / name).string() + "'"; }

fs::path OutDir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("elyflex_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

TEST(Cli, EligibilityExitCodes) {
  auto r = Cli("eligibility --preset sunfire-ael --product fcr --bid 1 --setpoint 3");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("INELIGIBLE"), std::string::npos);
  r = Cli("eligibility --preset sunfire-ael --product afrr-pos --bid 1 --setpoint 4");
  EXPECT_EQ(r.code, 0) << r.out;
  r = Cli("eligibility --preset sunfire-ael --product fcr --bid 0");
  EXPECT_EQ(r.code, 1) << r.out;
}

TEST(Cli, Demo4GridRampLimit) {
  auto r = Cli("eligibility --preset sunfire-ael --rated-power 4 --bid 1 --setpoint 3 --format json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("\"limiting_constraint\": \"ramp_deadline\""), std::string::npos) << r.out;
}

TEST(Cli, InlineUnitAndFleet) {
  auto r = Cli("eligibility --unit 'name=x;technology=PEM;rated_power_mw=100;min_load_percent=10;"
               "ramp_up_percent_per_s=1' --bid 5 --setpoint 95");
  EXPECT_EQ(r.code, 0) << r.out;
  r = Cli("eligibility --fleet mcphy:2 --bid 10 --format csv");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("eligible,true"), std::string::npos) << r.out;
}

TEST(Cli, BadFlagsExitOne) {
  EXPECT_EQ(Cli("eligibility --bogus").code, 1);
  EXPECT_EQ(Cli("eligibility --preset nope --bid 1").code, 1);
  EXPECT_EQ(Cli("frobnicate").code, 1);
  EXPECT_EQ(Cli("--help").code, 0);
}

TEST(Cli, PresetsShow) {
  auto r = Cli("presets show mcphy");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("16 MW"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("10-100 %"), std::string::npos);
  EXPECT_NE(r.out.find("5 %/s"), std::string::npos);
  EXPECT_NE(r.out.find("AEL"), std::string::npos);
  EXPECT_EQ(Cli("presets show nothing").code, 1);
  r = Cli("presets list");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("enapter"), std::string::npos);
}

TEST(Cli, SimulateScenarios) {
  const auto out = OutDir("sim");
  auto r = Cli("simulate --scenario " + Scenario("demo4grid.scenario") + " --out '" + out.string() + "'");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("first violation at 30 s"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(out / "trajectory.csv"));

  r = Cli("simulate --scenario " + Scenario("decoupling-100mw.scenario") + " " +
          Scenario("idle-100mw.scenario") + " " + Scenario("demo4grid-afrr.scenario") +
          " --jobs 2 --out '" + out.string() + "'");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(out / "decoupling-100mw" / "report.json"));
  EXPECT_TRUE(fs::exists(out / "idle-100mw" / "trajectory.csv"));
  std::ifstream t(out / "decoupling-100mw" / "trajectory.csv");
  std::string l1, l2, l3;
  std::getline(t, l1);
  std::getline(t, l2);
  std::getline(t, l3);
  EXPECT_EQ(l2, "0,95.0");
  EXPECT_EQ(l3, "1,94.0");

  r = Cli("simulate --scenario " + Scenario("decoupling-100mw.scenario") + " --signal '" +
          (kDir / "step_minus_1mw_120s.csv").string() + "' --out '" + out.string() + "'");
  EXPECT_EQ(r.code, 0) << r.out;
  fs::remove_all(out);
}

TEST(Cli, AllocateScenarios) {
  const auto out = OutDir("alloc");
  auto r = Cli("allocate --scenario " + Scenario("fcr-100mw.scenario") + " --out '" + out.string() + "'");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("1318.15"), std::string::npos) << r.out;
  r = Cli("allocate --scenario " + Scenario("combined-100mw.scenario") + " --out '" + out.string() + "'");
  EXPECT_NE(r.out.find("20518.15"), std::string::npos) << r.out;
  r = Cli("allocate --scenario " + Scenario("zero-prices.scenario") + " --out '" + out.string() + "'");
  EXPECT_NE(r.out.find("objective 0.00"), std::string::npos) << r.out;
  r = Cli("allocate --scenario " + Scenario("afrr-100mw.scenario") + " --prices '" +
          (kDir / "fcr-block-prices.csv").string() + "' --out '" + out.string() + "'");
  EXPECT_EQ(r.code, 0) << r.out;
  fs::remove_all(out);
}

TEST(Cli, EconomicsScenarios) {
  const auto out = OutDir("econ");
  auto r = Cli("economics --scenario " + Scenario("economics-100mw.scenario") + " --out '" +
               out.string() + "'");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("148200.00"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("12.8 %"), std::string::npos);
  r = Cli("economics --scenario germany.scenario --out '" + out.string() + "'",
          "ELYFLEX_SCENARIO_DIR='" + kDir.string() + "'");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("3.4 %/s"), std::string::npos) << r.out;
  fs::remove_all(out);
}

TEST(Cli, MissingScenarioIsInputError) {
  const auto out = OutDir("missing");
  EXPECT_EQ(Cli("simulate --scenario /nonexistent.scenario --out '" + out.string() + "'").code, 1);
  EXPECT_EQ(Cli("simulate --out '" + out.string() + "'").code, 1);
  fs::remove_all(out);
}

}  // namespace
