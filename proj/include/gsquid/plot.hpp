#pragma once

#include <string>
#include <vector>

#include "gsquid/oracle.hpp"
#include "gsquid/pattern.hpp"

namespace gsquid {

// Self-contained SVG renderings. Flux axes are labelled in units of Φ₀.

std::string pattern_svg(const InterferencePattern& pattern, const std::string& title = "");
std::string region_map_svg(const RegionMap& map, double phi0, const std::string& title = "");
/// Exact and linearized curves overlaid on the per-m lobes, with the error
/// in a panel underneath.
std::string oracle_svg(const ComparisonReport& report, const std::vector<StabilityRegion>& lobes,
                       double phi0, const std::string& title = "");

}  // namespace gsquid
