#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "elyflex/eligibility.hpp"
#include "elyflex/markets.hpp"
#include "elyflex/model.hpp"

namespace elyflex {

struct AllocationOptions {
  // EUR per kg of hydrogen not produced because the setpoint sits below
  // rated power. Disabled when empty.
  std::optional<double> hydrogen_value;
  // Fixed FCR quantity held in every block (MW); the optimizer then only
  // chooses the setpoint and aFRR quantity.
  std::optional<double> prereserved_fcr;
  double setpoint_step = 1.0;  // MW
};

struct BidEntry {
  TimeBlock block;
  BalancingProduct product;
  double quantity;  // MW
  double setpoint;  // MW
};

using BidSchedule = std::vector<BidEntry>;

struct BlockDecision {
  TimeBlock block;
  double setpoint;
  double fcr;   // MW, symmetric
  double afrr;  // MW, positive (load decrease)
  double revenue;
  double hydrogen_loss;  // kg over the block
  double objective;
};

struct AllocationResult {
  BidSchedule schedule;
  std::vector<BlockDecision> blocks;
  double capacity_revenue = 0.0;  // EUR/day
  double hydrogen_loss = 0.0;     // kg/day
  double objective = 0.0;         // EUR/day
};

namespace detail {

struct AllocationProblem {
  const ElectrolyzerUnit& unit;
  bool with_fcr = false;
  bool with_afrr = false;
  BalancingProduct fcr_product = fcr();
  BalancingProduct afrr_product = afrr(ReserveDirection::POS);
  CapacityPriceTable fcr_prices;
  double afrr_price = 0.0;  // EUR/MW/block
  AllocationOptions options;
  std::vector<double> setpoints;  // descending grid anchored at rated power
};

inline AllocationProblem make_problem(const ElectrolyzerUnit& unit,
                                      const std::vector<BalancingProduct>& products,
                                      const CapacityPriceTable& fcr_prices,
                                      double afrr_price_per_block,
                                      const AllocationOptions& options) {
  if (products.empty()) throw std::invalid_argument("allocation needs at least one product");
  AllocationProblem pb{unit, false, false, fcr(), afrr(ReserveDirection::POS), {}, 0.0, {}, {}};
  for (const auto& p : products) {
    p.validate();
    if (p.kind == ProductKind::FCR) {
      pb.with_fcr = true;
      pb.fcr_product = p;
    } else if (p.kind == ProductKind::aFRR && p.direction == ReserveDirection::POS) {
      pb.with_afrr = true;
      pb.afrr_product = p;
    } else {
      throw std::invalid_argument("allocation supports FCR and aFRR-POS only, got " + p.label());
    }
  }
  if (pb.with_fcr) {
    if (!fcr_prices.complete()) {
      throw std::invalid_argument("FCR price table is missing block " +
                                  fcr_prices.missing_blocks().front().label());
    }
    pb.fcr_prices = fcr_prices;
  } else {
    pb.fcr_prices = CapacityPriceTable::uniform(0.0);
  }
  if (pb.with_afrr && !(afrr_price_per_block >= 0.0)) {
    throw std::invalid_argument("aFRR capacity price must be >= 0");
  }
  pb.afrr_price = pb.with_afrr ? afrr_price_per_block : 0.0;
  if (options.prereserved_fcr) {
    if (!pb.with_fcr) throw std::invalid_argument("pre-reserved FCR requires the FCR product");
    if (!(*options.prereserved_fcr >= 0.0))
      throw std::invalid_argument("pre-reserved FCR must be >= 0");
  }
  if (options.hydrogen_value) {
    if (!(*options.hydrogen_value >= 0.0))
      throw std::invalid_argument("hydrogen value must be >= 0");
    if (!unit.efficiency_curve())
      throw std::invalid_argument("hydrogen value needs an efficiency curve on the unit");
  }
  if (!(options.setpoint_step > 0.0)) throw std::invalid_argument("setpoint step must be > 0");
  pb.options = options;

  for (double s = unit.max_power(); leq(unit.min_power(), s); s -= options.setpoint_step) {
    pb.setpoints.push_back(std::max(s, unit.min_power()));
  }
  return pb;
}

/// Hydrogen not produced over one block by running at `setpoint` instead of
/// rated power (kg). Zero without an efficiency curve.
inline double block_hydrogen_loss(const ElectrolyzerUnit& unit, double setpoint) {
  if (!unit.efficiency_curve()) return 0.0;
  const auto& curve = *unit.efficiency_curve();
  auto kg_per_h = [&](double p) {
    return p * 1000.0 / specific_energy_at(curve, p / unit.rated_power());
  };
  return (kg_per_h(unit.max_power()) - kg_per_h(setpoint)) * kHoursPerBlock;
}

struct Candidate {
  double setpoint;
  double fcr;
  double afrr;
  double revenue;
  double loss;
  double objective;
};

/// Strict preference: higher objective, then less reserved capacity, then
/// less FCR, then a higher setpoint.
inline bool better(const Candidate& a, const Candidate& b) {
  const double tol = 1e-9 * std::max({1.0, std::abs(a.objective), std::abs(b.objective)});
  if (a.objective > b.objective + tol) return true;
  if (b.objective > a.objective + tol) return false;
  const double ta = a.fcr + a.afrr;
  const double tb = b.fcr + b.afrr;
  if (ta < tb - 1e-9) return true;
  if (tb < ta - 1e-9) return false;
  if (a.fcr < b.fcr - 1e-9) return true;
  if (b.fcr < a.fcr - 1e-9) return false;
  return a.setpoint > b.setpoint + 1e-9;
}

inline Candidate score(const AllocationProblem& pb, TimeBlock b, double s, double qf,
                       double qa) {
  Candidate c{s, qf, qa, 0.0, 0.0, 0.0};
  c.revenue = qf * pb.fcr_prices.at(b) + qa * pb.afrr_price;
  c.loss = block_hydrogen_loss(pb.unit, s);
  c.objective = c.revenue - (pb.options.hydrogen_value ? c.loss * *pb.options.hydrogen_value : 0.0);
  return c;
}

inline AllocationResult assemble(const AllocationProblem& pb,
                                 const std::vector<std::optional<Candidate>>& best) {
  AllocationResult res;
  for (auto b : day_blocks()) {
    const auto& cand = best[static_cast<std::size_t>(b.index)];
    // An empty feasible set leaves the block without a bid, at rated power.
    Candidate c = cand ? *cand : score(pb, b, pb.unit.max_power(), 0.0, 0.0);
    res.blocks.push_back({b, c.setpoint, c.fcr, c.afrr, c.revenue, c.loss, c.objective});
    if (c.fcr > 0.0) res.schedule.push_back({b, pb.fcr_product, c.fcr, c.setpoint});
    if (c.afrr > 0.0) res.schedule.push_back({b, pb.afrr_product, c.afrr, c.setpoint});
    res.capacity_revenue += c.revenue;
    res.hydrogen_loss += c.loss;
    res.objective += c.objective;
  }
  return res;
}

inline double floor_to_increment(double x, double inc) {
  return std::floor(x / inc + 1e-9) * inc;
}

}  // namespace detail

/// Chooses, for each 4 h block independently, a setpoint and integer-MW FCR
/// (symmetric) and aFRR (positive) quantities maximizing capacity revenue
/// minus the optional hydrogen opportunity cost.
///
/// FCR reserves [s - q_fcr, s + q_fcr] around setpoint s; aFRR POS may use the
/// remaining band [u * P, s - q_fcr]. Every quantity must pass
/// check_eligibility on its own.
inline AllocationResult optimize_day(const ElectrolyzerUnit& unit,
                                     const std::vector<BalancingProduct>& products,
                                     const CapacityPriceTable& fcr_prices,
                                     double afrr_price_per_block,
                                     const AllocationOptions& options = {}) {
  using detail::Candidate;
  const auto pb =
      detail::make_problem(unit, products, fcr_prices, afrr_price_per_block, options);

  std::vector<std::optional<Candidate>> best(kBlocksPerDay);
  for (double s : pb.setpoints) {
    // Feasible FCR quantities at s: 0 and every increment multiple from the
    // minimum bid up to the largest eligible one (eligibility is monotone).
    std::vector<double> fcr_options{0.0};
    if (pb.with_fcr) {
      const double qmax = max_offerable(unit, pb.fcr_product, s).quantity;
      if (pb.options.prereserved_fcr) {
        const double q = *pb.options.prereserved_fcr;
        fcr_options.clear();
        if (q == 0.0) {
          fcr_options.push_back(0.0);
        } else if (detail::leq(q, qmax) && check_eligibility(unit, pb.fcr_product, q, s).eligible) {
          fcr_options.push_back(q);
        }
      } else {
        const double inc = pb.fcr_product.trade_increment;
        for (double q = qmax; q > 0.0 && detail::leq(pb.fcr_product.min_bid, q); q -= inc) {
          fcr_options.push_back(q);
        }
      }
    }
    const double afrr_alone = pb.with_afrr ? max_offerable(unit, pb.afrr_product, s).quantity : 0.0;

    for (double qf : fcr_options) {
      double qa = 0.0;
      if (pb.with_afrr && pb.afrr_price > 0.0) {
        const double joint_room = s - qf - unit.min_power();
        qa = std::min(afrr_alone,
                      detail::floor_to_increment(std::max(joint_room, 0.0),
                                                 pb.afrr_product.trade_increment));
        if (!detail::leq(pb.afrr_product.min_bid, qa)) qa = 0.0;
      }
      for (auto b : day_blocks()) {
        auto c = detail::score(pb, b, s, qf, qa);
        auto& slot = best[static_cast<std::size_t>(b.index)];
        if (!slot || detail::better(c, *slot)) slot = c;
      }
    }
  }
  return detail::assemble(pb, best);
}

/// Exhaustive search over every setpoint on the grid and every integer FCR
/// and aFRR quantity up to rated power, using direct constraint arithmetic.
/// Intended as ground truth for small instances; throws when the search
/// space exceeds `max_combinations`.
inline AllocationResult brute_force_oracle(const ElectrolyzerUnit& unit,
                                           const std::vector<BalancingProduct>& products,
                                           const CapacityPriceTable& fcr_prices,
                                           double afrr_price_per_block,
                                           const AllocationOptions& options = {},
                                           double max_combinations = 1e6) {
  using detail::Candidate;
  const auto pb =
      detail::make_problem(unit, products, fcr_prices, afrr_price_per_block, options);

  const double fi = pb.fcr_product.trade_increment;
  const double ai = pb.afrr_product.trade_increment;
  const auto nf = pb.with_fcr ? static_cast<long long>(std::floor(unit.max_power() / fi)) : 0;
  const auto na = pb.with_afrr ? static_cast<long long>(std::floor(unit.max_power() / ai)) : 0;
  const double combos = static_cast<double>(pb.setpoints.size()) * static_cast<double>(nf + 1) *
                        static_cast<double>(na + 1) * kBlocksPerDay;
  if (combos > max_combinations) {
    throw std::length_error("oracle search space of " + std::to_string(combos) +
                            " combinations exceeds the bound");
  }

  const double pmin = unit.min_power();
  const double pmax = unit.max_power();
  const double sym_rate = std::min(unit.ramp_up(), unit.ramp_down()) * pmax;
  const double down_rate = unit.ramp_down() * pmax;

  auto fcr_ok = [&](double s, double q) {
    if (q == 0.0) return true;
    return q >= pb.fcr_product.min_bid - 1e-9 && s - q >= pmin - 1e-9 && s + q <= pmax + 1e-9 &&
           q / sym_rate <= pb.fcr_product.availability * (1.0 + 1e-9);
  };
  auto afrr_ok = [&](double s, double qf, double q) {
    if (q == 0.0) return true;
    return q >= pb.afrr_product.min_bid - 1e-9 && s - qf - q >= pmin - 1e-9 &&
           q / down_rate <= pb.afrr_product.availability * (1.0 + 1e-9);
  };

  std::vector<std::optional<Candidate>> best(kBlocksPerDay);
  for (auto b : day_blocks()) {
    auto& slot = best[static_cast<std::size_t>(b.index)];
    for (double s : pb.setpoints) {
      for (long long i = 0; i <= nf; ++i) {
        const double qf = static_cast<double>(i) * fi;
        if (pb.options.prereserved_fcr && std::abs(qf - *pb.options.prereserved_fcr) > 1e-9)
          continue;
        if (!fcr_ok(s, qf)) continue;
        for (long long j = 0; j <= na; ++j) {
          const double qa = static_cast<double>(j) * ai;
          if (!afrr_ok(s, qf, qa)) continue;
          auto c = detail::score(pb, b, s, qf, qa);
          if (!slot || detail::better(c, *slot)) slot = c;
        }
      }
    }
  }
  return detail::assemble(pb, best);
}

}  // namespace elyflex
