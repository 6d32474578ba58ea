#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gsquid/units.hpp"

namespace gsquid {

enum class UnitsMode { SI, Normalized };

/// Current-phase relation of a weak link. Only the sinusoidal Josephson
/// relation is implemented; the linearized model needs nothing beyond
/// dI/dθ = 0 at the maximum, so other analytic CPRs would slot in here.
enum class Cpr { Sinusoidal };

/// One superconducting branch: a weak link in series with its (kinetic plus
/// geometric) inductance, carrying current from `from_node` to `to_node`.
struct BranchSpec {
  int index = 0;                 ///< 1-based id, equal to position + 1
  double inductance = 0.0;       ///< H (or normalized)
  double critical_current = 0.0; ///< A (or normalized)
  Cpr cpr = Cpr::Sinusoidal;
  int from_node = 0;
  int to_node = 0;
};

/// A gate port: voltage source V_g behind R_g feeding `node`, returning to
/// ground through the shared output resistor R_out.
struct GateSpec {
  double r_gate = 0.0;
  double r_out = 0.0;
  double gate_threshold = 0.0;   ///< I_g*
  double coupling_alpha = 0.0;   ///< 0 = wide gate, > 0 = narrow gate
  double width_ratio = 1.0;      ///< w_g / w_j, descriptive only
  int node = 1;
  /// Branches whose thresholds drop to I* - α|I_g|. Empty means "branches
  /// incident to the gate node".
  std::vector<int> coupled_branches;

  double resistance_ratio() const { return r_out / r_gate; }
};

/// A superconducting loop as a signed list of 1-based branch ids (negative =
/// traversed against the branch direction). The loop links
/// `flux_fraction * phi_ext` of the applied flux.
struct LoopSpec {
  std::vector<int> branches;
  double flux_fraction = 1.0;
  std::optional<double> theta0;  ///< overrides the device policy for this loop
};

struct DeviceConfig {
  std::vector<BranchSpec> branches;
  std::vector<GateSpec> gates;
  std::vector<LoopSpec> loops;     ///< empty: auto-detected single loop
  int input_node = 0;
  int output_node = 2;
  std::optional<double> theta0;    ///< nullopt = "auto"
  double phi0 = kFluxQuantum;
  UnitsMode units = UnitsMode::SI;

  int node_count() const;
  bool single_gate_three_branch() const;
};

/// External knobs. `v_gate` has one entry per gate.
struct Drive {
  double i_in = 0.0;
  std::vector<double> v_gate;
  double phi_ext = 0.0;
  std::optional<int> m;
};

struct Violation {
  std::string field;
  std::string message;
};

/// Empty result means the config is valid.
std::vector<Violation> validate_device(const DeviceConfig& config);

/// Throws InputError listing every violation.
void require_valid(const DeviceConfig& config);

/// β_L = (2π/Φ₀)·L·I*.
double beta_l(const BranchSpec& branch, double phi0);

/// Loops used by the solvers: the configured ones, or the single cycle of
/// the branch graph when none are configured.
std::vector<LoopSpec> resolved_loops(const DeviceConfig& config);

/// Branches coupled to gate `g` (explicit list, or those incident to its node).
std::vector<int> coupled_branches(const DeviceConfig& config, std::size_t g);

struct UnitScales {
  double current = 1.0;
  double flux = 1.0;
  double resistance = 1.0;

  double inductance() const { return flux / current; }
  double voltage() const { return resistance * current; }
};

struct NormalizedProblem {
  DeviceConfig config;
  Drive drive;
  UnitScales scales;
};

/// Currents in units of branch 1's I*, flux in Φ₀, resistances in units of
/// the first gate's R_g. A normalized config is returned unchanged.
NormalizedProblem to_normalized(const DeviceConfig& config, const Drive& drive);

std::pair<DeviceConfig, Drive> from_normalized(const DeviceConfig& config, const Drive& drive,
                                               const UnitScales& scales);

/// Standard single-gate device: branches 1: 0→1, 2: 1→2, 3: 2→0, gate at
/// node 1, input at node 0, output at node 2.
DeviceConfig make_gated_squid(const std::array<double, 3>& inductance,
                              const std::array<double, 3>& critical_current,
                              const GateSpec& gate, UnitsMode units = UnitsMode::SI,
                              std::optional<double> theta0 = std::nullopt);

/// Same branch layout with no gate port (I_g ≡ 0).
DeviceConfig make_ungated_squid(const std::array<double, 3>& inductance,
                                const std::array<double, 3>& critical_current,
                                UnitsMode units = UnitsMode::SI,
                                std::optional<double> theta0 = std::nullopt);

/// Two gated arms plus an ungated centre link between input node 0 and
/// output node 2. Gate 1 sits on node 1 (arm 0→1→2), gate 2 on node 3
/// (arm 0→3→2), branch 3 closes 2→0. Two loops share the applied flux.
DeviceConfig make_double_gated_squid(const std::array<double, 5>& inductance,
                                     const std::array<double, 5>& critical_current,
                                     const GateSpec& gate1, const GateSpec& gate2,
                                     UnitsMode units = UnitsMode::SI);

}  // namespace gsquid
