#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsquid/circuit.hpp"

namespace gsquid {

// Loop convention used throughout the library (one loop):
//
//   Σ sᵢ·Lᵢ·Iᵢ + f·Φ_ext = (m + Θ₀/2π)·Φ₀
//
// with sᵢ = ±1 the loop orientation of branch i and f the flux fraction.
// The right-hand side minus f·Φ_ext is the "flux term" F that every solved
// current depends on; for the standard three-branch device the closed forms
// read exactly like the textbook ones with F in place of the flux bracket.

/// Solved internal state of the network at one drive and fluxon assignment.
struct BranchState {
  std::vector<double> currents;       ///< per branch, along the branch direction
  std::vector<double> gate_currents;  ///< per gate, into the gate node
  std::vector<int> fluxons;           ///< per loop
  std::vector<double> fulton_phases;  ///< (2π/Φ₀)LᵢIᵢ + (π/2)sign(Iᵢ)
  double output_voltage = 0.0;        ///< V₀ of the superconducting island
  double kirchhoff_residual = 0.0;    ///< max KCL residual / max |Iᵢ|
  double quantization_residual = 0.0; ///< rad
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo < hi); }
};

/// I_g = (V_g − R_out·I_in)/(R_g + R_out) for a single-gate device.
double gate_current(const DeviceConfig& config, const Drive& drive);

/// The gate-limited input bound in its textbook form,
/// (V_g − I_g*·R_out)/(R_g + R_out).
double gate_critical_input(const DeviceConfig& config, double v_gate);

/// Input currents with |I_g| < I_g*, i.e.
/// ((V_g − I_g*·R_s)/R_out, (V_g + I_g*·R_s)/R_out) with R_s = R_g + R_out.
/// This is the bound the superconductivity test applies.
Interval gate_input_window(const DeviceConfig& config, double v_gate);

/// Flux term F = (m + Θ₀/2π)Φ₀ − f·Φ_ext for one loop.
double flux_term(const DeviceConfig& config, double phi_ext, int m, std::size_t loop_index = 0);

/// Θ₀ for loop `loop_index`: the explicit value, or for the "auto" policy
/// Σ (π/2)·sign(Iᵢ) over the loop with the signs of the flux-free split of a
/// unit input current (gate currents held at zero).
double resolve_theta0(const DeviceConfig& config, std::size_t loop_index = 0);

/// Closed-form currents for the standard single-gate three-branch device
/// (or its ungated variant).
BranchState internal_currents_closed(const DeviceConfig& config, const Drive& drive, int m);

/// Assembles Kirchhoff current laws, the output/gate resistor relations and
/// one linearized quantization equation per loop, and solves the system.
/// Throws SingularSystemError naming the deficient equation set.
BranchState internal_currents_generic(const DeviceConfig& config, const Drive& drive,
                                      std::span<const int> m);
BranchState internal_currents_generic(const DeviceConfig& config, const Drive& drive, int m);

/// Affine decomposition of a single-loop network at fixed gate voltages:
///   Iᵢ   = branch_in[i]·I_in + branch_flux[i]·F + branch_base[i]
///   I_gk = gate_in[k]·I_in + gate_base[k]
struct AffineCurrents {
  std::vector<double> branch_in, branch_flux, branch_base;
  std::vector<double> gate_in, gate_base;
};
AffineCurrents affine_currents(const DeviceConfig& config, std::span<const double> v_gate);

/// One critical condition as a line in the (Φ_ext, I_in) plane:
///   denominator·I_in < numerator_const + numerator_flux·F,
/// F = (m + Θ₀/2π)Φ₀ − Φ_ext. With a non-zero denominator this reads
///   I_in = slope·(Φ_ext − (m + Θ₀/2π)Φ₀) + offset,
/// otherwise the condition does not involve I_in at all (a vertical line).
struct CriticalLine {
  int branch = 0;
  int m = 0;
  double denominator = 0.0;
  double numerator_const = 0.0;
  double numerator_flux = 0.0;
  bool vertical = false;
  double slope = 0.0;   ///< A per Wb (or normalized); 0 when vertical
  double offset = 0.0;  ///< I_in at F = 0; 0 when vertical

  /// Φ_ext where the line sits (meaningful for vertical lines).
  double vertical_phi(double theta0, double phi0) const;
  double at(double phi_ext, double theta0, double phi0) const;
};

struct CriticalLines {
  double theta0 = 0.0;
  double phi0 = 1.0;
  double v_gate = 0.0;
  double alpha = 0.0;
  std::vector<CriticalLine> lines;  ///< for each m in range: branches 1, 2, 3

  const CriticalLine& find(int branch, int m) const;
};

/// Closed-form critical conditions of the single-gate device: I₁ = I₁* − αI_g,
/// I₂ = I₂* − αI_g, I₃ = −I₃*. With α = 0 these are the wide-gate lines.
CriticalLines critical_lines(const DeviceConfig& config, double v_gate, int m_first, int m_last);

}  // namespace gsquid
