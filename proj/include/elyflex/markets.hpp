#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace elyflex {

enum class ProductKind { FCR, aFRR, mFRR };

/// Reserve direction from the grid's point of view. For a load, POS means
/// consuming less and NEG means consuming more.
enum class ReserveDirection { SYM, POS, NEG };

inline std::string_view to_string(ProductKind k) {
  switch (k) {
    case ProductKind::FCR: return "FCR";
    case ProductKind::aFRR: return "aFRR";
    case ProductKind::mFRR: return "mFRR";
  }
  return "?";
}

inline std::string_view to_string(ReserveDirection d) {
  switch (d) {
    case ReserveDirection::SYM: return "SYM";
    case ReserveDirection::POS: return "POS";
    case ReserveDirection::NEG: return "NEG";
  }
  return "?";
}

struct BalancingProduct {
  ProductKind kind;
  double min_bid;          // MW
  double trade_increment;  // MW
  double availability;     // s, full delivery deadline
  bool symmetric;
  double duration;  // h
  ReserveDirection direction;

  void validate() const {
    if (!(min_bid > 0.0)) throw std::invalid_argument("product min_bid must be > 0");
    if (!(trade_increment > 0.0))
      throw std::invalid_argument("product trade_increment must be > 0");
    if (!(availability > 0.0)) throw std::invalid_argument("product availability must be > 0");
    if (!(duration > 0.0)) throw std::invalid_argument("product duration must be > 0");
    if (symmetric != (direction == ReserveDirection::SYM)) {
      throw std::invalid_argument("product direction must be SYM iff symmetric");
    }
  }

  std::string label() const {
    std::string s(to_string(kind));
    if (!symmetric) {
      s += '-';
      s += to_string(direction);
    }
    return s;
  }

  friend bool operator==(const BalancingProduct&, const BalancingProduct&) = default;
};

// Continental European defaults: 1 MW minimum and increment, 4 h blocks.
inline BalancingProduct fcr() {
  return {ProductKind::FCR, 1.0, 1.0, 30.0, true, 4.0, ReserveDirection::SYM};
}

inline BalancingProduct afrr(ReserveDirection d) {
  if (d == ReserveDirection::SYM) throw std::invalid_argument("aFRR is asymmetric");
  return {ProductKind::aFRR, 1.0, 1.0, 300.0, false, 4.0, d};
}

inline BalancingProduct mfrr(ReserveDirection d) {
  if (d == ReserveDirection::SYM) throw std::invalid_argument("mFRR is asymmetric");
  return {ProductKind::mFRR, 1.0, 1.0, 750.0, false, 4.0, d};
}

/// Parses "fcr", "afrr-pos", "afrr-neg", "mfrr-pos", "mfrr-neg" (case-insensitive).
inline BalancingProduct product_from_string(std::string_view name) {
  std::string s(name);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "fcr") return fcr();
  if (s == "afrr-pos") return afrr(ReserveDirection::POS);
  if (s == "afrr-neg") return afrr(ReserveDirection::NEG);
  if (s == "mfrr-pos") return mfrr(ReserveDirection::POS);
  if (s == "mfrr-neg") return mfrr(ReserveDirection::NEG);
  throw std::invalid_argument("unknown product '" + std::string(name) +
                              "' (expected fcr, afrr-pos, afrr-neg, mfrr-pos, mfrr-neg)");
}

inline std::string product_slug(const BalancingProduct& p) {
  std::string s = p.label();
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Ramp needed to deliver one traded increment within the availability
/// deadline, in MW/s.
inline double required_gradient(const BalancingProduct& p) {
  return p.trade_increment / p.availability;
}

// ---------------------------------------------------------------------------
// Time blocks

inline constexpr int kBlocksPerDay = 6;
inline constexpr int kHoursPerBlock = 4;

struct TimeBlock {
  int index;  // 0..5

  int start_hour() const { return index * kHoursPerBlock; }
  int end_hour() const { return start_hour() + kHoursPerBlock; }

  std::string label() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "NEGPOS_%02d_%02d", start_hour(), end_hour());
    return buf;
  }

  friend auto operator<=>(const TimeBlock&, const TimeBlock&) = default;
};

inline std::array<TimeBlock, kBlocksPerDay> day_blocks() {
  return {TimeBlock{0}, TimeBlock{1}, TimeBlock{2}, TimeBlock{3}, TimeBlock{4}, TimeBlock{5}};
}

/// Maps a block label onto one of the six canonical 4 h blocks. Accepts the
/// canonical NEGPOS_HH_HH form as well as NEG_POS_HH_HH, POS_HH_HH,
/// NEG_HH_HH, HH_HH, HH-HH and HH:MM-HH:MM.
inline std::optional<TimeBlock> parse_block_label(std::string_view label) {
  std::vector<int> numbers;
  int cur = -1;
  int digits = 0;
  for (char c : label) {
    if (c >= '0' && c <= '9') {
      cur = (cur < 0 ? 0 : cur * 10) + (c - '0');
      ++digits;
    } else {
      if (cur >= 0) numbers.push_back(cur);
      cur = -1;
      digits = 0;
    }
    if (digits > 2) return std::nullopt;
  }
  if (cur >= 0) numbers.push_back(cur);
  // HH:MM-HH:MM carries minutes that must be zero.
  if (numbers.size() == 4) {
    if (numbers[1] != 0 || numbers[3] != 0) return std::nullopt;
    numbers = {numbers[0], numbers[2]};
  }
  if (numbers.size() != 2) return std::nullopt;
  const int start = numbers[0];
  const int end = numbers[1];
  if (start % kHoursPerBlock != 0 || end != start + kHoursPerBlock || end > 24) {
    return std::nullopt;
  }
  return TimeBlock{start / kHoursPerBlock};
}

/// Capacity price per MW for each 4 h block (EUR/MW/block).
class CapacityPriceTable {
 public:
  CapacityPriceTable() = default;

  static CapacityPriceTable uniform(double price) {
    CapacityPriceTable t;
    for (auto b : day_blocks()) t.set(b, price);
    return t;
  }

  static CapacityPriceTable from_array(const std::array<double, kBlocksPerDay>& prices) {
    CapacityPriceTable t;
    for (auto b : day_blocks()) t.set(b, prices[static_cast<std::size_t>(b.index)]);
    return t;
  }

  void set(TimeBlock b, double price) {
    if (!(price >= 0.0) || !std::isfinite(price)) {
      throw std::invalid_argument("capacity price for " + b.label() + " must be >= 0");
    }
    prices_.at(static_cast<std::size_t>(b.index)) = price;
  }

  std::optional<double> get(TimeBlock b) const {
    return prices_.at(static_cast<std::size_t>(b.index));
  }

  /// Throws when the block has no price.
  double at(TimeBlock b) const {
    auto p = get(b);
    if (!p) throw std::invalid_argument("capacity price table is missing block " + b.label());
    return *p;
  }

  bool complete() const {
    for (const auto& p : prices_)
      if (!p) return false;
    return true;
  }

  std::vector<TimeBlock> missing_blocks() const {
    std::vector<TimeBlock> out;
    for (auto b : day_blocks())
      if (!get(b)) out.push_back(b);
    return out;
  }

  CapacityPriceTable scaled(double factor) const {
    CapacityPriceTable t;
    for (auto b : day_blocks())
      if (auto p = get(b)) t.set(b, *p * factor);
    return t;
  }

  friend bool operator==(const CapacityPriceTable&, const CapacityPriceTable&) = default;

 private:
  std::array<std::optional<double>, kBlocksPerDay> prices_{};
};

/// Sum of the six block prices, EUR/MW/day.
inline double day_capacity_price_sum(const CapacityPriceTable& table) {
  double sum = 0.0;
  for (auto b : day_blocks()) sum += table.at(b);
  return sum;
}

// ---------------------------------------------------------------------------
// Spot prices

struct SpotSample {
  std::int64_t timestamp;  // seconds since Unix epoch, UTC
  double price;            // EUR/MWh
};

class SpotPriceSeries {
 public:
  SpotPriceSeries() = default;
  explicit SpotPriceSeries(std::vector<SpotSample> samples) : samples_(std::move(samples)) {
    for (std::size_t i = 1; i < samples_.size(); ++i) {
      if (samples_[i].timestamp <= samples_[i - 1].timestamp) {
        throw std::invalid_argument("spot price timestamps must be strictly increasing (row " +
                                    std::to_string(i + 1) + ")");
      }
    }
  }

  const std::vector<SpotSample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }

  bool uniformly_hourly() const {
    for (std::size_t i = 1; i < samples_.size(); ++i)
      if (samples_[i].timestamp - samples_[i - 1].timestamp != 3600) return false;
    return true;
  }

 private:
  std::vector<SpotSample> samples_;
};

struct ThresholdAverage {
  double mean_price;  // EUR/MWh
  std::size_t qualifying_hours;
};

/// Mean spot price over samples strictly below the threshold.
inline ThresholdAverage avg_price_below_threshold(const SpotPriceSeries& series,
                                                  double threshold) {
  if (series.empty()) throw std::invalid_argument("spot price series is empty");
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : series.samples()) {
    if (s.price < threshold) {
      sum += s.price;
      ++n;
    }
  }
  if (n == 0) {
    throw std::domain_error("no spot prices below threshold " + std::to_string(threshold));
  }
  return {sum / static_cast<double>(n), n};
}

inline double apply_grid_fee(double price, double fee_fraction) {
  if (!(fee_fraction >= 0.0)) throw std::invalid_argument("grid fee fraction must be >= 0");
  return price * (1.0 + fee_fraction);
}

}  // namespace elyflex
