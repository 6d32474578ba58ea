#pragma once

#include "gsquid/circuit.hpp"
#include "gsquid/pattern.hpp"

namespace gsquid {

/// A translation of the pattern along the flux axis, in weber (or Φ₀ in
/// normalized mode) and in radians (2π/Φ₀ times the flux).
struct FluxShift {
  double flux = 0.0;
  double radians = 0.0;
};

/// Translation of the wide-gate pattern produced by V_g relative to V_g = 0:
/// −L₂V_g/(R_g + R_out). The pattern moves towards negative flux for V_g > 0.
FluxShift phase_shift_predicted(const DeviceConfig& config, double v_gate);

/// Translation δ that best maps `a` onto `b`, b(Φ) ≈ a(Φ − δ), by least
/// squares over one period of `b` with periodic linear interpolation of `a`.
/// Result lies in (−P/2, P/2] for period P.
FluxShift phase_shift_measured(const InterferencePattern& a, const InterferencePattern& b);

/// Downward shift of the narrow-gate envelope maximum caused by V_g:
/// (V_g/R_g)(1 + α)/(1 − α·r). Throws NumericalError when α·r = 1.
double amplitude_shift_predicted(const DeviceConfig& config, double v_gate);

/// Narrow-gate envelope maximum, set by branches 2 and 3 together:
/// ((1 + α)V_g − 2R_s·I*)/(αR_out − R_g), with I* of branch 1.
double envelope_max_closed(const DeviceConfig& config, double v_gate);

/// Narrow-gate envelope minimum: the maximum less R_s·Φ₀/(L_tot(R_g − αR_out)).
double envelope_min_closed(const DeviceConfig& config, double v_gate);

struct EffectiveInductance {
  double left = 0.0;   ///< (dI_c/dΦ)⁻¹ just below phi; ±inf on a flat piece
  double right = 0.0;  ///< just above phi
  bool at_vertex = false;
  bool zero_inductance = false;
};

/// Reciprocal envelope slope at phi from the analytic segments. Slopes above
/// 1/(ε·Φ₀/I*) and vertical steps count as zero inductance.
EffectiveInductance effective_inductance(const InterferencePattern& pattern, double phi,
                                         double epsilon = 1e-6);

struct AlphaStar {
  double value = 0.0;  ///< clamped at 0
  double raw = 0.0;    ///< (L₃/r − L₁)/L_tot before clamping
  bool clamped = false;
  bool physical = true;
};

/// Coupling at which the branch-2 critical line turns vertical:
/// L₃ − (L₁ + α·L_tot)·r = 0.
AlphaStar alpha_star(const DeviceConfig& config);

/// L₃ − (L₁ + α·L_tot)·r.
double zero_inductance_residual(const DeviceConfig& config, double alpha);

}  // namespace gsquid
