#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsquid/circuit.hpp"
#include "gsquid/constraints.hpp"

namespace gsquid {

struct PatternSample {
  double phi_ext = 0.0;
  double i_c = 0.0;
  std::string label;
  int m = 0;
  bool reentrant = false;
};

/// One affine piece of the envelope, i_c = slope·phi_ext + intercept on
/// [phi_lo, phi_hi]. A zero-inductance piece is vertical: phi_lo = phi_hi and
/// the current runs between i_lo and i_hi.
struct PatternSegment {
  double phi_lo = 0.0;
  double phi_hi = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::string label;
  int m = 0;
  bool zero_inductance = false;
  double i_lo = 0.0;
  double i_hi = 0.0;

  double at(double phi) const { return slope * phi + intercept; }
};

struct PatternVertex {
  double phi_ext = 0.0;
  double i_in = 0.0;
  std::string left_label;
  std::string right_label;
  bool jump = false;  ///< one end of a vertical (zero-inductance) step
};

struct InterferencePattern {
  std::vector<PatternSample> samples;
  std::vector<PatternVertex> vertices;
  std::vector<PatternSegment> segments;
  std::string config_digest;
  std::vector<double> v_gate;
  double phi0 = 1.0;
  double period = 1.0;  ///< Φ₀ divided by the loop's flux fraction
  double current_scale = 1.0;
  double phi_lo = 0.0;
  double phi_hi = 0.0;

  /// Envelope value from the analytic segments (right-continuous at jumps).
  double evaluate(double phi) const;
  /// Index of the non-vertical segment containing phi.
  std::size_t segment_at(double phi) const;
};

/// FNV-1a hash of the canonical text form of a config, as 16 hex digits.
std::string config_digest(const DeviceConfig& config);

struct SweepOptions {
  int window = 3;
};

/// Samples I_c over [phi_lo, phi_hi] and builds the analytic envelope
/// geometry. Needs a single-loop network.
InterferencePattern sweep_pattern(const DeviceConfig& config, double phi_lo, double phi_hi,
                                  int n_samples, std::span<const double> v_gate,
                                  const SweepOptions& options = {});
InterferencePattern sweep_pattern(const DeviceConfig& config, double phi_lo, double phi_hi,
                                  int n_samples, double v_gate, const SweepOptions& options = {});

enum class CellState { Superconducting, Normal, GateLimited };
std::string cell_state_name(CellState s);

struct RegionMap {
  std::vector<double> phi_ext;
  std::vector<double> i_in;
  std::vector<CellState> cells;  ///< row-major, i_in index outer
  std::vector<bool> reentrant_column;
  std::optional<double> normal_resistance;
  std::vector<double> v_gate;

  CellState at(std::size_t i_row, std::size_t phi_col) const {
    return cells[i_row * phi_ext.size() + phi_col];
  }
  /// Display resistance of a cell: 0, R_n, or R_n for gate-limited cells.
  std::optional<double> resistance(std::size_t i_row, std::size_t phi_col) const;
};

RegionMap region_map(const DeviceConfig& config, std::span<const double> phi_grid,
                     std::span<const double> i_in_grid, std::span<const double> v_gate,
                     std::optional<double> normal_resistance = std::nullopt, int window = 3);

struct EnvelopeStats {
  double max_ic = 0.0;
  double min_ic = 0.0;
  double modulation_depth = 0.0;
};

/// Extrema of the analytic envelope over one period starting at the
/// pattern's lower flux bound. Throws InputError if the pattern is shorter
/// than one period.
EnvelopeStats envelope_stats(const InterferencePattern& pattern);

}  // namespace gsquid
