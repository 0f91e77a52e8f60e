#include <gtest/gtest.h>

#include "elyflex/economics.hpp"

namespace elyflex {
namespace {

const CapacityPriceTable kBlockPrices =
    CapacityPriceTable::from_array({14.71, 21.92, 62.00, 78.00, 51.00, 36.00});

TEST(FcrRevenue, Examples) {
  EXPECT_NEAR(fcr_day_revenue(5, kBlockPrices), 1318.15, 1e-9);
  EXPECT_EQ(fcr_day_revenue(0, kBlockPrices), 0.0);
  EXPECT_DOUBLE_EQ(fcr_day_revenue(1, CapacityPriceTable::uniform(10)), 60.0);
  EXPECT_THROW(fcr_day_revenue(1, CapacityPriceTable{}), std::invalid_argument);
}

TEST(AfrrRevenue, Examples) {
  EXPECT_DOUBLE_EQ(afrr_day_capacity_revenue(40, 24, 20), 19200.0);
  EXPECT_EQ(afrr_day_capacity_revenue(0, 24, 20), 0.0);
  EXPECT_DOUBLE_EQ(afrr_day_capacity_revenue(3, 24, 20), 1440.0);
}

TEST(ElectricityCost, Examples) {
  EXPECT_DOUBLE_EQ(electricity_cost(95, 24, 65), 148200.0);
  EXPECT_EQ(electricity_cost(0, 24, 65), 0.0);
  EXPECT_DOUBLE_EQ(electricity_cost(100, 1, 50), 5000.0);
}

TEST(SavingsRatio, Examples) {
  EXPECT_NEAR(savings_ratio(1318.15, 19200, 148200), 20518.15 / 148200, 1e-15);
  EXPECT_NEAR(savings_ratio(1318.15, 19200, 148200), 0.1385, 1e-4);
  EXPECT_DOUBLE_EQ(savings_ratio(0, 19200, 150000), 0.128);
  EXPECT_EQ(savings_ratio(0, 0, 1000), 0.0);
  EXPECT_THROW(savings_ratio(1, 1, 0), std::domain_error);
}

TEST(FleetCoverage, Examples) {
  auto a = fleet_coverage(500, 10000, true);
  EXPECT_DOUBLE_EQ(a.share, 0.05);
  EXPECT_DOUBLE_EQ(*a.symmetric_band, 0.10);
  auto b = fleet_coverage(3000, 40000, true);
  EXPECT_DOUBLE_EQ(b.share, 0.075);
  EXPECT_DOUBLE_EQ(*b.symmetric_band, 0.15);
  EXPECT_EQ(fleet_coverage(0, 123, true).share, 0.0);
  EXPECT_FALSE(fleet_coverage(10, 100, false).symmetric_band);
}

TEST(EconomicReport, HundredMegawattDay) {
  EconomicAssumptions a;
  a.setpoint = 95;
  a.spot_price = 50;
  a.grid_fee_fraction = 0.30;
  a.fcr_bid = 5;
  a.afrr_quantity = 40;
  a.afrr_price = 20;
  a.rounded_cost = 150000;
  const auto r = economic_report(a, kBlockPrices);
  EXPECT_DOUBLE_EQ(r.electricity_price, 65.0);
  EXPECT_DOUBLE_EQ(r.electricity_cost, 148200.0);
  EXPECT_NEAR(r.fcr_revenue, 1318.15, 1e-9);
  EXPECT_DOUBLE_EQ(r.afrr_capacity_revenue, 19200.0);
  EXPECT_NEAR(*r.savings_ratio, (1318.15 + 19200) / 148200, 1e-15);
  EXPECT_DOUBLE_EQ(*r.afrr_savings_ratio_rounded_cost, 0.128);
  EXPECT_THROW(economic_report(a, std::nullopt), std::invalid_argument);
}

TEST(EconomicReport, RevenueLinearInQuantities) {
  EconomicAssumptions a;
  a.setpoint = 50;
  a.spot_price = 40;
  a.fcr_bid = 2;
  a.afrr_quantity = 7;
  a.afrr_price = 11;
  auto b = a;
  b.fcr_bid *= 3;
  b.afrr_quantity *= 3;
  const auto ra = economic_report(a, kBlockPrices), rb = economic_report(b, kBlockPrices);
  EXPECT_NEAR(rb.fcr_revenue, 3 * ra.fcr_revenue, 1e-9);
  EXPECT_NEAR(rb.afrr_capacity_revenue, 3 * ra.afrr_capacity_revenue, 1e-9);
}

}  // namespace
}  // namespace elyflex
