#include <random>

#include <gtest/gtest.h>

#include "elyflex/eligibility.hpp"
#include "elyflex/presets.hpp"

namespace elyflex {
namespace {

ElectrolyzerUnit Unit(double p, double u, double ramp) {
  return ElectrolyzerUnit("u", Technology::AEL, p, u, ramp);
}

ElectrolyzerUnit Demo4Grid() { return find_preset("sunfire-ael")->to_unit(4.0); }

TEST(Gradient, ForwardExamples) {
  EXPECT_NEAR(eq1_gradient({4, 0.25, 0.0061, 1, 1}), 0.0183, 1e-12);
  EXPECT_NEAR(eq1_gradient({10, 0.0, 0.01, 1, 1}), 0.1, 1e-12);
  // 9000 * 0.44 * 0.00086 / 1000 = 0.0034056
  EXPECT_NEAR(eq1_gradient({9000, 0.56, 0.00086, 2000, 2}), 0.0034056, 1e-12);
  EXPECT_NEAR(eq1_gradient({9000, 0.56, 0.00086, 2000, 2}), 0.0034, 1e-5);
}

TEST(Gradient, InverseExamples) {
  EXPECT_NEAR(eq1_min_ramp(9000, 0.56, 2000, 2, 0.0034) * 100, 0.0859, 5e-5);
  EXPECT_NEAR(eq1_min_ramp(10000, 0.9, 2000, 2, 0.034), 0.034, 1e-15);
  EXPECT_NEAR(eq1_min_ramp(100, 0.0, 1, 1, 0.034), 0.00034, 1e-15);
  EXPECT_THROW(eq1_min_ramp(100, 1.0, 1, 1, 0.034), std::domain_error);
}

TEST(Gradient, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> p(0.5, 20000), u(0.0, 0.95), ramp(1e-5, 0.2),
      reserve(0.1, 5000), ts(0.1, 10);
  for (int i = 0; i < 1000; ++i) {
    GradientInputs in{p(rng), u(rng), ramp(rng), reserve(rng), ts(rng)};
    const double g = eq1_gradient(in);
    const double back = eq1_min_ramp(in.rated_power, in.min_load_fraction, in.reserve, in.trade_size, g);
    EXPECT_NEAR(back, in.ramp, 1e-12 * in.ramp);
  }
}

TEST(MinRatedPower, Examples) {
  EXPECT_NEAR(min_rated_power(1, 0.0061, 30), 5.4645, 1e-4);
  EXPECT_NEAR(min_rated_power(1, 0.01, 100), 1.0, 1e-12);
  EXPECT_NEAR(min_rated_power(5, 0.005, 300), 10.0 / 3.0, 1e-12);
  EXPECT_THROW(min_rated_power(1, 0.0, 30), std::invalid_argument);
}

TEST(TimeToDeliver, Examples) {
  EXPECT_NEAR(time_to_deliver(Demo4Grid(), 1.0, RampDirection::Up), 1.0 / (4 * 0.0061), 1e-12);
  EXPECT_NEAR(time_to_deliver(Demo4Grid(), 1.0, RampDirection::Up), 40.98, 0.005);
  EXPECT_EQ(time_to_deliver(Demo4Grid(), 0.0, RampDirection::Up), 0.0);
  EXPECT_NEAR(time_to_deliver(Unit(100, 0.1, 0.01), 40, RampDirection::Up), 40.0, 1e-12);
}

TEST(TimeToDeliver, UsesDirectionalRamp) {
  ElectrolyzerUnit u("u", Technology::PEM, 10, 0.1, 0.01, 0.05);
  // POS reserve sheds load, so it rides the ramp-down rate.
  EXPECT_NEAR(time_to_deliver(u, 1, ReserveDirection::POS), 2.0, 1e-12);
  EXPECT_NEAR(time_to_deliver(u, 1, ReserveDirection::NEG), 10.0, 1e-12);
  EXPECT_NEAR(time_to_deliver(u, 1, ReserveDirection::SYM), 10.0, 1e-12);
}

TEST(CheckEligibility, Demo4GridFcrRejectedOnRamp) {
  const auto r = check_eligibility(Demo4Grid(), fcr(), 1.0, 3.0);
  EXPECT_FALSE(r.eligible);
  EXPECT_EQ(r.limiting_constraint, std::string(kRampDeadline));
  const auto& c = r.constraint(kRampDeadline);
  EXPECT_NEAR(c.actual_value, 40.98, 0.05);
  EXPECT_EQ(c.required_value, 30.0);
  EXPECT_NEAR(c.margin, -10.98, 0.01);
  EXPECT_TRUE(r.constraint(kHeadroom).pass);
  ASSERT_EQ(r.constraints.size(), 5u);
  EXPECT_EQ(r.constraints[0].name, kMinBid);
  EXPECT_EQ(r.constraints[4].name, kDuration);
}

TEST(CheckEligibility, Demo4GridAfrrAccepted) {
  const auto r = check_eligibility(Demo4Grid(), afrr(ReserveDirection::POS), 1.0, 4.0);
  EXPECT_TRUE(r.eligible);
  EXPECT_FALSE(r.limiting_constraint.has_value());
  EXPECT_NEAR(r.constraint(kHeadroom).actual_value, 3.0, 1e-12);
}

TEST(CheckEligibility, HundredMegawattAtDeadline) {
  const auto r = check_eligibility(Unit(100, 0.5, 0.00167), fcr(), 5.0, 95.0);
  EXPECT_TRUE(r.eligible);
  EXPECT_NEAR(r.constraint(kRampDeadline).actual_value, 29.94, 0.01);
}

TEST(CheckEligibility, ErrorsAreDistinctFromIneligibility) {
  EXPECT_THROW(check_eligibility(Demo4Grid(), fcr(), 0.0, 3.0), std::invalid_argument);
  EXPECT_THROW(check_eligibility(Demo4Grid(), fcr(), 1.0, 0.5), std::out_of_range);
  EXPECT_THROW(check_eligibility(Demo4Grid(), fcr(), 1.0, 4.5), std::out_of_range);
}

TEST(CheckEligibility, GranularityAndMinBid) {
  const auto u = Unit(100, 0.1, 0.05);
  auto r = check_eligibility(u, fcr(), 2.5, 50);
  EXPECT_FALSE(r.eligible);
  EXPECT_EQ(r.limiting_constraint, std::string(kGranularity));
  r = check_eligibility(u, fcr(), 0.5, 50);
  EXPECT_EQ(r.limiting_constraint, std::string(kMinBid));
}

TEST(MaxOfferable, Examples) {
  EXPECT_EQ(max_offerable(Demo4Grid(), fcr()).quantity, 0.0);
  const auto a = max_offerable(Demo4Grid(), afrr(ReserveDirection::POS), 4.0);
  EXPECT_EQ(a.quantity, 3.0);
  EXPECT_EQ(a.setpoint, 4.0);
  const auto fast = max_offerable(Unit(4, 0.25, 0.00834), fcr());
  EXPECT_EQ(fast.quantity, 1.0);
  EXPECT_EQ(fast.setpoint, 3.0);
  const auto big = max_offerable(Unit(100, 0.5, 0.00167), fcr());
  EXPECT_EQ(big.quantity, 5.0);
  EXPECT_EQ(big.setpoint, 95.0);
}

TEST(MaxOfferable, MonotoneInRampAndEveryOfferIsEligible) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p(1, 60), u(0.05, 0.8), ramp(0.0005, 0.1);
  const BalancingProduct products[] = {fcr(), afrr(ReserveDirection::POS),
                                       afrr(ReserveDirection::NEG), mfrr(ReserveDirection::POS)};
  for (int i = 0; i < 300; ++i) {
    const double pp = p(rng), uu = u(rng), r1 = ramp(rng), r2 = r1 * (1.0 + ramp(rng) * 10);
    for (const auto& prod : products) {
      const auto slow = max_offerable(Unit(pp, uu, r1), prod);
      const auto fast = max_offerable(Unit(pp, uu, r2), prod);
      EXPECT_LE(slow.quantity, fast.quantity);
      if (slow.quantity > 0) {
        EXPECT_TRUE(check_eligibility(Unit(pp, uu, r1), prod, slow.quantity, slow.setpoint).eligible);
        EXPECT_FALSE(
            check_eligibility(Unit(pp, uu, r1), prod, slow.quantity + prod.trade_increment, slow.setpoint)
                .eligible);
      }
    }
  }
}

}  // namespace
}  // namespace elyflex
