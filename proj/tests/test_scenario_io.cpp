#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "elyflex/scenario_io.hpp"

namespace elyflex {
namespace {

namespace fs = std::filesystem;

const fs::path kDir = ELYFLEX_SCENARIOS;

std::string CapacityCsv(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string s = "block,price_eur_per_mw\n";
  for (const auto& [b, p] : rows) s += b + "," + p + "\n";
  return s;
}

TEST(Scenario, Demo4GridShipsWithRepo) {
  const auto sc = load_scenario(kDir / "demo4grid.scenario");
  ASSERT_EQ(sc.unit_specs.size(), 1u);
  EXPECT_EQ(sc.unit_specs[0].preset, std::optional<std::string>("sunfire-ael"));
  const auto unit = scenario_plant(sc);
  EXPECT_EQ(unit.technology(), Technology::AEL);
  EXPECT_EQ(unit.rated_power(), 4.0);
  EXPECT_DOUBLE_EQ(unit.min_load_fraction(), 0.25);
  EXPECT_NEAR(unit.ramp_up(), 0.0061, 1e-15);
  const auto products = scenario_products(sc);
  ASSERT_EQ(products.size(), 2u);
  EXPECT_EQ(products[0], fcr());
  EXPECT_EQ(products[1], afrr(ReserveDirection::POS));
  EXPECT_NEAR(day_capacity_price_sum(*scenario_fcr_prices(sc)), 263.63, 1e-9);
  EXPECT_DOUBLE_EQ(*scenario_afrr_price_per_block(sc), 80.0);
}

TEST(Scenario, MinLoadOutOfRangeNamesKeyAndLine) {
  const std::string text =
      "[unit]\nname = x\ntechnology = AEL\nrated_power_mw = 10\nmin_load_percent = 120\n"
      "ramp_up_percent_per_s = 1\n";
  try {
    build_unit(parse_scenario(text, "bad.scenario").unit_specs.at(0));
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_EQ(e.key(), "min_load_percent");
    EXPECT_EQ(e.line(), 5);
    EXPECT_NE(std::string(e.what()).find("min_load_fraction"), std::string::npos);
  }
}

TEST(Scenario, McPhyPresetByDisplayName) {
  const auto sc = parse_scenario("[unit]\nname = m\npreset = McPhy\n", "m.scenario");
  const auto u = scenario_plant(sc);
  EXPECT_EQ(u.rated_power(), 16.0);
  EXPECT_DOUBLE_EQ(u.min_load_fraction(), 0.1);
  EXPECT_DOUBLE_EQ(u.ramp_up(), 0.05);
}

TEST(Scenario, UnknownAndDuplicateKeysAreRejected) {
  EXPECT_THROW(parse_scenario("[unit]\nname = x\nfoo = 1\n", "s"), InputError);
  EXPECT_THROW(parse_scenario("[unit]\nname = x\nname = y\n", "s"), InputError);
  EXPECT_THROW(parse_scenario("[bogus]\n", "s"), InputError);
  EXPECT_THROW(parse_scenario("[simulation]\nproduct = fcr\n", "s"), InputError);
  EXPECT_THROW(parse_scenario("just text\n", "s"), InputError);
}

TEST(Scenario, FleetAggregatesCount) {
  const auto sc = load_scenario(kDir / "fleet-mcphy.scenario");
  const auto u = scenario_plant(sc);
  EXPECT_DOUBLE_EQ(u.rated_power(), 160.0);
  EXPECT_NEAR(u.ramp_mw_per_s(RampDirection::Up), 8.0, 1e-12);
}

TEST(Scenario, ShippedScenariosRoundTrip) {
  for (const auto& entry : fs::directory_iterator(kDir)) {
    if (entry.path().extension() != ".scenario") continue;
    SCOPED_TRACE(entry.path().string());
    const auto a = load_scenario(entry.path());
    const auto b = parse_scenario(to_text(a), "echo", kDir);
    EXPECT_EQ(a, b);
    EXPECT_EQ(to_text(a), to_text(b));
  }
}

TEST(Scenario, RandomScenariosRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit01(0, 1);
  auto num = [&](double lo, double hi) {
    return std::round((lo + unit01(rng) * (hi - lo)) * 1000) / 1000;
  };
  for (int i = 0; i < 100; ++i) {
    Scenario sc;
    sc.name = "random-" + std::to_string(i);
    UnitSpec u;
    u.name = "u" + std::to_string(i);
    u.technology = "PEM";
    u.rated_power_mw = num(1, 500);
    u.min_load_percent = num(1, 90);
    u.ramp_up_percent_per_s = num(0.01, 20);
    if (i % 2) u.ramp_down_percent_per_s = num(0.01, 20);
    u.count = 1 + i % 3;
    sc.unit_specs.push_back(u);
    sc.products = {"fcr", "afrr-pos"};
    sc.prices.afrr_capacity_eur_per_mw_h = num(0, 50);
    sc.prices.spot_price_eur_per_mwh = num(0, 200);
    EconomicsSection e;
    e.setpoint_mw = num(1, 100);
    e.grid_fee_percent = num(0, 50);
    sc.economics = e;
    CoverageSection c;
    c.label = "c" + std::to_string(i);
    c.required_reserve_mw = num(0, 1000);
    c.fleet_power_mw = num(1000, 5000);
    c.symmetric = i % 2 == 0;
    sc.coverage.push_back(c);
    const auto back = parse_scenario(to_text(sc), "rt");
    EXPECT_EQ(back, sc) << to_text(sc);
  }
}

TEST(CapacityPrices, BlockPriceFile) {
  const auto t = load_capacity_prices(kDir / "fcr-block-prices.csv");
  EXPECT_NEAR(day_capacity_price_sum(t), 263.63, 1e-9);
}

TEST(CapacityPrices, MissingBlockIsAnError) {
  const auto text = CapacityCsv({{"NEGPOS_00_04", "1"}, {"NEGPOS_04_08", "1"}, {"NEGPOS_08_12", "1"},
                                 {"NEGPOS_16_20", "1"}, {"NEGPOS_20_24", "1"}});
  try {
    parse_capacity_prices(text, "p.csv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("NEGPOS_12_16"), std::string::npos);
  }
}

TEST(CapacityPrices, RepeatedBlockNamesLabel) {
  const auto text = CapacityCsv({{"NEGPOS_00_04", "1"}, {"NEGPOS_04_08", "1"}, {"NEGPOS_04_08", "2"},
                                 {"NEGPOS_08_12", "1"}, {"NEGPOS_12_16", "1"}, {"NEGPOS_16_20", "1"},
                                 {"NEGPOS_20_24", "1"}});
  try {
    parse_capacity_prices(text, "p.csv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.key(), "NEGPOS_04_08");
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(CapacityPrices, RejectsNegativeAndNonNumeric) {
  auto rows = std::vector<std::pair<std::string, std::string>>{
      {"00-04", "1"}, {"04-08", "1"}, {"08-12", "1"}, {"12-16", "1"}, {"16-20", "1"}, {"20-24", "-1"}};
  EXPECT_THROW(parse_capacity_prices(CapacityCsv(rows), "p"), InputError);
  rows.back().second = "abc";
  EXPECT_THROW(parse_capacity_prices(CapacityCsv(rows), "p"), InputError);
  rows.back().second = "2";
  EXPECT_NO_THROW(parse_capacity_prices(CapacityCsv(rows), "p"));
  EXPECT_THROW(parse_capacity_prices("block,price\n", "p"), InputError);
}

TEST(CapacityPrices, HourlyBasisScalesToBlocks) {
  auto rows = std::vector<std::pair<std::string, std::string>>{
      {"00-04", "1"}, {"04-08", "2"}, {"08-12", "3"}, {"12-16", "4"}, {"16-20", "5"}, {"20-24", "6"}};
  const auto t = parse_capacity_prices(CapacityCsv(rows), "p", PriceBasis::PerHour);
  EXPECT_DOUBLE_EQ(day_capacity_price_sum(t), 84.0);
}

TEST(SpotPrices, ParsesTimestampsAndOffsets) {
  const auto s = parse_spot_prices(
      "timestamp,price_eur_per_mwh\n2024-01-01T00:00Z,40\n2024-01-01T02:00+01:00,60\n"
      "2024-01-01 02:00,90\n",
      "spot.csv");
  ASSERT_EQ(s.samples().size(), 3u);
  EXPECT_EQ(s.samples()[1].timestamp - s.samples()[0].timestamp, 3600);
  EXPECT_TRUE(s.uniformly_hourly());
  EXPECT_DOUBLE_EQ(avg_price_below_threshold(s, 85).mean_price, 50.0);
  EXPECT_THROW(parse_spot_prices("timestamp,price_eur_per_mwh\n2024-13-01T00:00Z,1\n", "s"),
               InputError);
  EXPECT_THROW(
      parse_spot_prices("timestamp,price_eur_per_mwh\n2024-01-01T01:00Z,1\n2024-01-01T00:00Z,1\n", "s"),
      InputError);
}

TEST(Signal, ParsesUniformSeries) {
  const auto s = parse_signal("time_s,value\n0,-1\n0.5,-1\n1.0,0\n", "sig", SignalKind::SetpointRequest);
  EXPECT_DOUBLE_EQ(s.timestep(), 0.5);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_THROW(parse_signal("time_s,value\n1,0\n2,0\n", "sig", SignalKind::SetpointRequest), InputError);
  EXPECT_THROW(parse_signal("time_s,value\n0,0\n1,0\n3,0\n", "sig", SignalKind::SetpointRequest),
               InputError);
  EXPECT_THROW(parse_signal("time_s,value\n0,0\n", "sig", SignalKind::SetpointRequest), InputError);
}

TEST(Efficiency, ParsesPercentBreakpoints) {
  const auto c = parse_efficiency("25:50, 100:55");
  EXPECT_DOUBLE_EQ(specific_energy_at(c, 0.625), 52.5);
  EXPECT_THROW(parse_efficiency("25-50"), std::invalid_argument);
}

}  // namespace
}  // namespace elyflex
