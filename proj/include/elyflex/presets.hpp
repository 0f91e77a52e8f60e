#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "elyflex/model.hpp"

namespace elyflex {

/// Manufacturer datasheet figures for commercial electrolyzer stacks.
/// Power range and dynamic are percent of rated power; dynamic is the hot
/// ramp-up rate. `estimated` marks values obtained from manufacturer
/// discussions or calculation rather than a datasheet.
struct Preset {
  std::string_view slug;
  std::string_view name;
  double power_mw;
  double range_min_pct;
  double range_max_pct;
  double dynamic_pct_per_s;
  Technology technology;
  bool estimated;

  /// Unit with rated power as given. Operation above 100 % (Trina lists
  /// 30-110 %) is not modeled; the band is capped at rated power.
  ElectrolyzerUnit to_unit(std::optional<double> rated_power_mw = std::nullopt) const {
    return ElectrolyzerUnit(std::string(slug), technology, rated_power_mw.value_or(power_mw),
                            range_min_pct / 100.0, dynamic_pct_per_s / 100.0);
  }

  std::string describe() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-14s %-13s %6g MW  %g-%g %%  %g%s %%/s  %s",
                  std::string(slug).c_str(), std::string(name).c_str(), power_mw, range_min_pct,
                  range_max_pct, dynamic_pct_per_s, estimated ? "*" : "",
                  std::string(to_string(technology)).c_str());
    return buf;
  }
};

inline constexpr std::array<Preset, 10> kPresets{{
    {"ecolyzer", "Ecolyzer", 3.0, 10.0, 100.0, 0.5, Technology::AEL, true},
    {"sunfire-ael", "Sunfire", 10.0, 25.0, 100.0, 0.61, Technology::AEL, false},
    {"sunfire-soec", "Sunfire", 10.0, 50.0, 100.0, 0.16, Technology::SOEC, false},
    {"mcphy", "McPhy", 16.0, 10.0, 100.0, 5.0, Technology::AEL, false},
    {"thyssenkrupp", "ThyssenKrupp", 20.0, 10.0, 100.0, 3.0, Technology::AEL, true},
    {"trina", "Trina", 15.0, 30.0, 110.0, 5.0, Technology::AEL, false},
    {"questone", "QuestOne", 10.0, 10.0, 100.0, 3.0, Technology::PEM, true},
    {"elyzer", "Elyzer", 17.5, 40.0, 100.0, 10.0, Technology::PEM, false},
    {"neptun-itm", "Neptun ITM", 2.0, 25.0, 100.0, 10.0, Technology::PEM, false},
    {"enapter", "Enapter", 2.5, 1.0, 100.0, 0.73, Technology::AEM, false},
}};

/// Case-insensitive lookup by slug or display name ("McPhy", "mcphy").
inline std::optional<Preset> find_preset(std::string_view key) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  const std::string k = lower(key);
  for (const auto& p : kPresets)
    if (lower(p.slug) == k) return p;
  // Display names are ambiguous for Sunfire; only unique ones resolve.
  std::optional<Preset> hit;
  int matches = 0;
  for (const auto& p : kPresets) {
    if (lower(p.name) == k) {
      hit = p;
      ++matches;
    }
  }
  return matches == 1 ? hit : std::nullopt;
}

}  // namespace elyflex
