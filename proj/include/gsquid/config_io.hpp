#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gsquid/analysis.hpp"
#include "gsquid/circuit.hpp"
#include "gsquid/fit.hpp"
#include "gsquid/oracle.hpp"
#include "gsquid/pattern.hpp"

namespace gsquid {

inline constexpr int kSchemaVersion = 1;

/// Parses a device config from JSON text. Numeric fields take numbers or
/// quantity strings ("10mV"). Errors name the offending field, or the line
/// and column for malformed JSON. The result is not validated.
DeviceConfig parse_config(std::string_view text);
DeviceConfig read_config(const std::filesystem::path& path);

/// Canonical JSON form (sorted keys, two-space indent, trailing newline).
std::string config_to_json(const DeviceConfig& config);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// phi_ext,i_c,branch,m
std::string pattern_csv(const InterferencePattern& pattern);
/// phi_ext,i_in,left,right,jump
std::string vertices_csv(const InterferencePattern& pattern);
/// phi_ext,i_in,state[,resistance]
std::string region_map_csv(const RegionMap& map);
/// phi_ext,i_c_exact,i_c_linear,error
std::string comparison_csv(const ComparisonReport& report);
/// m,phi_ext,upper,lower
std::string lobes_csv(const std::vector<StabilityRegion>& lobes);

/// Reads fit data with a header row naming phi_ext, i_c and optionally
/// v_g (any order). Rows are grouped into one curve per distinct v_g, in
/// order of first appearance. Values are SI numbers or quantity strings.
std::vector<FitCurve> read_fit_csv(const std::filesystem::path& path);
std::vector<FitCurve> parse_fit_csv(std::string_view text);

std::string fit_report_json(const FitResult& result);
std::string alpha_report_json(const DeviceConfig& config, const AlphaStar& a);

struct ShiftRow {
  double v_gate = 0.0;
  FluxShift predicted;
  FluxShift measured;
};
std::string shift_report_json(const DeviceConfig& config, double v_reference,
                              const std::vector<ShiftRow>& rows);

std::string oracle_report_json(const TwoJunctionLoop& loop, const ComparisonReport& report);

/// Formats a double so that it reads back to the same value.
std::string format_number(double v);

}  // namespace gsquid
