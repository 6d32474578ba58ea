#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gsquid/circuit.hpp"

namespace gsquid {

/// Two sinusoidal weak links in parallel, each with a series inductance.
/// Both currents are counted from the input to the output node; the loop
/// condition is
///   θ₁ − θ₂ + (2π/Φ₀)(L₁I₁ − L₂I₂) + 2πΦ_ext/Φ₀ = 2πm,  Iₖ = Iₖc·sin θₖ.
struct TwoJunctionLoop {
  double l1 = 1.0;
  double l2 = 1.0;
  double ic1 = 1.0;
  double ic2 = 1.0;
  double phi0 = 1.0;

  double beta1() const;
  double beta2() const;

  /// Symmetric loop with the given β_L per arm, in normalized units.
  static TwoJunctionLoop symmetric(double beta_l);
};

void require_valid(const TwoJunctionLoop& loop);

struct OracleOptions {
  int grid = 2048;  ///< θ₁ scan points per fluxon number
  int window = 3;   ///< fluxon numbers m₀ − window .. m₀ + window
};

struct ExactResult {
  double i_c = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  int m = 0;
  double residual = 0.0;  ///< loop condition residual at the optimum, rad
};

/// Range of total current over the locally stable states of one fluxon
/// number at fixed flux. Empty when no stable state exists.
struct LobeExtent {
  double upper = 0.0;
  double lower = 0.0;
  double theta1_upper = 0.0;
  double theta2_upper = 0.0;
  double residual = 0.0;
};

std::optional<LobeExtent> lobe_extent(const TwoJunctionLoop& loop, int m, double phi_ext,
                                      const OracleOptions& options = {});

/// Largest stable total current over the fluxon window.
ExactResult exact_critical_current(const TwoJunctionLoop& loop, double phi_ext,
                                   const OracleOptions& options = {});

struct StabilityRegion {
  int m = 0;
  std::vector<double> phi_ext;
  std::vector<double> upper;  ///< NaN where the lobe is absent
  std::vector<double> lower;
};

/// Boundary of the lobe of fluxon number m sampled on n points of
/// [phi_lo, phi_hi].
StabilityRegion stability_region(const TwoJunctionLoop& loop, int m, double phi_lo,
                                 double phi_hi, int n, const OracleOptions& options = {});

/// Linearized counterpart: two branches between input node 0 and output
/// node 1, explicit Θ₀ = 0, no gates.
DeviceConfig linearized_equivalent(const TwoJunctionLoop& loop);

struct ComparisonReport {
  std::vector<double> phi_ext;
  std::vector<double> exact;
  std::vector<double> linear;
  std::vector<double> error;  ///< |exact − linear| / I₁c
  double max_error = 0.0;
  double mean_error = 0.0;
};

ComparisonReport compare_linearized(const TwoJunctionLoop& loop, std::span<const double> phi_ext,
                                    const OracleOptions& options = {});

}  // namespace gsquid
