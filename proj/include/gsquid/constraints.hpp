#pragma once

#include <optional>
#include <utility>
#include <span>
#include <string>
#include <vector>

#include "gsquid/circuit.hpp"
#include "gsquid/linear_solver.hpp"

namespace gsquid {

/// a·I_in + c·F < d, with F the loop flux term. `constraint` is the 1-based
/// branch id, or −k for gate k.
struct HalfPlane {
  double a = 0.0;
  double c = 0.0;
  double d = 0.0;
  int constraint = 0;
  bool vertical = false;  ///< a is zero to rounding: the bound does not involve I_in
};

/// "1".."N" for branches, "gate" for gate bounds, "none" otherwise.
std::string constraint_label(int constraint);

struct FeasibleInterval {
  double lo = 0.0;
  double hi = 0.0;
  int lo_plane = -1;  ///< index into half_planes(), −1 when unbounded
  int hi_plane = -1;
  bool empty = true;
};

struct CriticalPoint {
  double i_c = 0.0;
  std::string label = "none";
  int constraint = 0;
  int m = 0;
  int plane = -1;          ///< binding half-plane, −1 for the fallbacks
  bool reentrant = false;  ///< superconducting set below I_c has a gap
};

struct Membership {
  bool superconducting = false;
  std::optional<int> m;        ///< witness fluxon number
  bool gate_violated = false;  ///< some |I_g| ≥ I_g*
};

/// Superconductivity conditions of a single-loop network at fixed gate
/// voltages. Branch thresholds are |Iᵢ| + Σ α_k|I_gk| < Iᵢ* over the gates
/// coupled to branch i, gates need |I_gk| < I_gk*. Every condition is expanded
/// into half-planes in (I_in, F).
class ConstraintSet {
 public:
  ConstraintSet(const DeviceConfig& config, std::span<const double> v_gate, int window = 3);

  double flux_term(double phi_ext, int m) const;
  /// Fluxon number that puts F closest to zero.
  int window_center(double phi_ext) const;
  int window() const { return window_; }
  /// Fluxon numbers searched at phi_ext: the window around window_center,
  /// widened to every m with |F| ≤ Σ LᵢIᵢ* over the loop, since no
  /// superconducting state exists outside that band.
  std::pair<int, int> m_range(double phi_ext) const;

  /// Open feasible interval of I_in at a given flux term.
  FeasibleInterval interval(double flux_term) const;
  /// Same, ignoring the gate bounds.
  FeasibleInterval branch_interval(double flux_term) const;

  CriticalPoint critical_current(double phi_ext) const;
  Membership classify(double i_in, double phi_ext) const;

  /// Interval allowed by the gate bounds alone (whole line without gates).
  Interval gate_window() const;

  const std::vector<HalfPlane>& half_planes() const { return planes_; }
  double theta0() const { return theta0_; }
  double phi0() const { return phi0_; }
  double flux_fraction() const { return fraction_; }
  /// Largest branch threshold, the scale of the tie tolerance.
  double current_scale() const { return scale_; }
  bool has_gates() const { return has_gates_; }

 private:
  FeasibleInterval interval_impl(double flux_term, bool with_gates) const;

  std::vector<HalfPlane> planes_;
  double theta0_ = 0.0;
  double phi0_ = 1.0;
  double fraction_ = 1.0;
  double scale_ = 1.0;
  double flux_reach_ = 0.0;
  int window_ = 3;
  bool has_gates_ = false;
};

/// Tie-break margin: a drive within this of a bound counts as normal.
inline constexpr double kTieTolerance = 1e-12;

CriticalPoint critical_current(const DeviceConfig& config, double phi_ext,
                               std::span<const double> v_gate, int window = 3);
CriticalPoint critical_current(const DeviceConfig& config, double phi_ext, double v_gate,
                               int window = 3);

Membership is_superconducting(const DeviceConfig& config, const Drive& drive, int window = 3);

}  // namespace gsquid
