#include "gsquid/linear_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "gsquid/errors.hpp"
#include "network_system.hpp"

namespace gsquid {

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

const GateSpec& single_gate(const DeviceConfig& config) {
  if (config.gates.size() != 1) {
    throw InputError("operation requires exactly one gate, config has " +
                     std::to_string(config.gates.size()));
  }
  return config.gates.front();
}

bool standard_ring(const DeviceConfig& c) {
  if (c.branches.size() != 3) return false;
  const auto& b = c.branches;
  const bool ring = b[0].from_node == 0 && b[0].to_node == 1 && b[1].from_node == 1 &&
                    b[1].to_node == 2 && b[2].from_node == 2 && b[2].to_node == 0 &&
                    c.input_node == 0 && c.output_node == 2;
  if (!ring) return false;
  if (c.loops.empty()) return true;
  return c.loops.size() == 1 && c.loops[0].branches == std::vector<int>{1, 2, 3} &&
         c.loops[0].flux_fraction == 1.0;
}

void require_standard_layout(const DeviceConfig& config) {
  const bool ok = standard_ring(config) &&
                  (config.gates.empty() || (config.gates.size() == 1 && config.gates[0].node == 1));
  if (!ok) {
    throw InputError(
        "closed forms need the standard three-branch layout (0→1→2→0, gate on node 1, "
        "input 0, output 2)");
  }
}

void fill_fulton(const DeviceConfig& config, BranchState& s) {
  s.fulton_phases.resize(s.currents.size());
  for (std::size_t i = 0; i < s.currents.size(); ++i) {
    const double l = config.branches[i].inductance;
    s.fulton_phases[i] = kTwoPi / config.phi0 * l * s.currents[i] + 0.5 * kPi * sign_of(s.currents[i]);
  }
}

}  // namespace

double gate_current(const DeviceConfig& config, const Drive& drive) {
  const auto& g = single_gate(config);
  const double v = drive.v_gate.empty() ? 0.0 : drive.v_gate.front();
  return (v - g.r_out * drive.i_in) / (g.r_gate + g.r_out);
}

double gate_critical_input(const DeviceConfig& config, double v_gate) {
  const auto& g = single_gate(config);
  return (v_gate - g.gate_threshold * g.r_out) / (g.r_gate + g.r_out);
}

Interval gate_input_window(const DeviceConfig& config, double v_gate) {
  const auto& g = single_gate(config);
  const double rs = g.r_gate + g.r_out;
  return {(v_gate - g.gate_threshold * rs) / g.r_out, (v_gate + g.gate_threshold * rs) / g.r_out};
}

double flux_term(const DeviceConfig& config, double phi_ext, int m, std::size_t loop_index) {
  const auto loops = resolved_loops(config);
  const double theta0 = resolve_theta0(config, loop_index);
  return (m + theta0 / kTwoPi) * config.phi0 - loops.at(loop_index).flux_fraction * phi_ext;
}

double resolve_theta0(const DeviceConfig& config, std::size_t loop_index) {
  const auto loops = resolved_loops(config);
  const auto& loop = loops.at(loop_index);
  if (loop.theta0) return *loop.theta0;
  if (config.theta0) return *config.theta0;

  DeviceConfig bare = config;
  bare.gates.clear();
  const detail::NetworkSystem sys(bare);
  const std::vector<double> no_gates;
  const std::vector<double> zero_rhs(loops.size(), 0.0);
  const Eigen::VectorXd x = sys.solve(1.0, no_gates, zero_rhs);
  double theta0 = 0.0;
  for (int signed_id : loop.branches) {
    const double current = x(std::abs(signed_id) - 1) * (signed_id > 0 ? 1.0 : -1.0);
    theta0 += 0.5 * kPi * sign_of(current);
  }
  return theta0;
}

BranchState internal_currents_closed(const DeviceConfig& config, const Drive& drive, int m) {
  require_standard_layout(config);
  const double l1 = config.branches[0].inductance;
  const double l2 = config.branches[1].inductance;
  const double l3 = config.branches[2].inductance;
  const double lt = l1 + l2 + l3;
  const double f = flux_term(config, drive.phi_ext, m);
  const double i_in = drive.i_in;

  BranchState s;
  s.fluxons = {m};
  double i_out = i_in;
  if (config.gates.empty()) {
    const double i1 = (l3 * i_in + f) / lt;
    s.currents = {i1, i1, i1 - i_in};
  } else {
    const auto& g = config.gates[0];
    const double rg = g.r_gate;
    const double ro = g.r_out;
    const double rs = rg + ro;
    const double vg = drive.v_gate.empty() ? 0.0 : drive.v_gate.front();
    const double i1 = (l2 * (-vg + ro * i_in) + rs * (l3 * i_in + f)) / (lt * rs);
    const double i2 = (l3 * (vg + rg * i_in) + l1 * (vg - ro * i_in) + rs * f) / (lt * rs);
    const double i3 = -(l2 * (vg + rg * i_in) + rs * (l1 * i_in - f)) / (lt * rs);
    const double ig = (vg - ro * i_in) / rs;
    s.currents = {i1, i2, i3};
    s.gate_currents = {ig};
    i_out = i_in + ig;
    s.output_voltage = ro * i_out;
  }

  const auto& c = s.currents;
  const double scale = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2]), 1e-300});
  const double ig = s.gate_currents.empty() ? 0.0 : s.gate_currents[0];
  const double kcl = std::max({std::abs(i_in - (c[0] - c[2])), std::abs(ig - (c[1] - c[0])),
                               std::abs(i_out - (c[1] - c[2]))});
  s.kirchhoff_residual = kcl / scale;
  const double theta0 = resolve_theta0(config);
  s.quantization_residual =
      std::abs(kTwoPi / config.phi0 * (l1 * c[0] + l2 * c[1] + l3 * c[2] + drive.phi_ext) -
               (kTwoPi * m + theta0));
  fill_fulton(config, s);
  return s;
}

BranchState internal_currents_generic(const DeviceConfig& config, const Drive& drive,
                                      std::span<const int> m) {
  const auto loops = resolved_loops(config);
  if (m.size() != loops.size()) {
    throw InputError("expected one fluxon number per loop (" + std::to_string(loops.size()) +
                     "), got " + std::to_string(m.size()));
  }
  if (drive.v_gate.size() != config.gates.size() && !drive.v_gate.empty()) {
    throw InputError("expected one gate voltage per gate (" + std::to_string(config.gates.size()) + ")");
  }
  std::vector<double> v_gate = drive.v_gate;
  v_gate.resize(config.gates.size(), 0.0);

  std::vector<double> rhs(loops.size());
  std::vector<double> theta0(loops.size());
  for (std::size_t l = 0; l < loops.size(); ++l) {
    theta0[l] = resolve_theta0(config, l);
    rhs[l] = (m[l] + theta0[l] / kTwoPi) * config.phi0 - loops[l].flux_fraction * drive.phi_ext;
  }

  const detail::NetworkSystem sys(config);
  const Eigen::VectorXd x = sys.solve(drive.i_in, v_gate, rhs);

  BranchState s;
  s.fluxons.assign(m.begin(), m.end());
  const std::size_t nb = config.branches.size();
  s.currents.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) s.currents[i] = x(static_cast<Eigen::Index>(i));
  s.output_voltage = sys.has_island_voltage() ? x(static_cast<Eigen::Index>(nb)) : 0.0;
  for (std::size_t g = 0; g < config.gates.size(); ++g) {
    s.gate_currents.push_back((v_gate[g] - s.output_voltage) / config.gates[g].r_gate);
  }

  double scale = 1e-300;
  for (double c : s.currents) scale = std::max(scale, std::abs(c));
  s.kirchhoff_residual = sys.kirchhoff_residual(x, drive.i_in, v_gate) / scale;
  s.quantization_residual = 0.0;
  for (std::size_t l = 0; l < loops.size(); ++l) {
    double lhs = loops[l].flux_fraction * drive.phi_ext;
    for (int id : loops[l].branches) {
      const auto k = static_cast<std::size_t>(std::abs(id) - 1);
      lhs += (id > 0 ? 1.0 : -1.0) * config.branches[k].inductance * s.currents[k];
    }
    const double resid = kTwoPi / config.phi0 * lhs - (kTwoPi * m[l] + theta0[l]);
    s.quantization_residual = std::max(s.quantization_residual, std::abs(resid));
  }
  fill_fulton(config, s);
  return s;
}

BranchState internal_currents_generic(const DeviceConfig& config, const Drive& drive, int m) {
  const int ms[1] = {m};
  return internal_currents_generic(config, drive, std::span<const int>(ms, 1));
}

AffineCurrents affine_currents(const DeviceConfig& config, std::span<const double> v_gate) {
  const auto loops = resolved_loops(config);
  if (loops.size() != 1) {
    throw InputError("affine decomposition needs a single-loop network, config has " +
                     std::to_string(loops.size()) + " loops");
  }
  std::vector<double> vg(v_gate.begin(), v_gate.end());
  vg.resize(config.gates.size(), 0.0);
  const std::vector<double> zero_v(config.gates.size(), 0.0);

  const detail::NetworkSystem sys(config);
  const std::vector<double> f0{0.0};
  const std::vector<double> f1{1.0};
  const Eigen::VectorXd base = sys.solve(0.0, vg, f0);
  const Eigen::VectorXd d_in = sys.solve(1.0, zero_v, f0);
  const Eigen::VectorXd d_flux = sys.solve(0.0, zero_v, f1);

  AffineCurrents a;
  const std::size_t nb = config.branches.size();
  for (std::size_t i = 0; i < nb; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    a.branch_in.push_back(d_in(k));
    a.branch_flux.push_back(d_flux(k));
    a.branch_base.push_back(base(k));
  }
  const auto v0 = static_cast<Eigen::Index>(nb);
  for (std::size_t g = 0; g < config.gates.size(); ++g) {
    const double rg = config.gates[g].r_gate;
    a.gate_in.push_back(-d_in(v0) / rg);
    a.gate_base.push_back((vg[g] - base(v0)) / rg);
  }
  return a;
}

double CriticalLine::vertical_phi(double theta0, double phi0) const {
  const double f0 = (m + theta0 / kTwoPi) * phi0;
  return f0 + numerator_const / numerator_flux;
}

double CriticalLine::at(double phi_ext, double theta0, double phi0) const {
  const double f0 = (m + theta0 / kTwoPi) * phi0;
  return slope * (phi_ext - f0) + offset;
}

const CriticalLine& CriticalLines::find(int branch, int m) const {
  for (const auto& l : lines) {
    if (l.branch == branch && l.m == m) return l;
  }
  throw InputError("no critical line for branch " + std::to_string(branch) + ", m = " +
                   std::to_string(m));
}

CriticalLines critical_lines(const DeviceConfig& config, double v_gate, int m_first, int m_last) {
  require_standard_layout(config);
  const auto& g = single_gate(config);
  const double l1 = config.branches[0].inductance;
  const double l2 = config.branches[1].inductance;
  const double l3 = config.branches[2].inductance;
  const double lt = l1 + l2 + l3;
  const double i1 = config.branches[0].critical_current;
  const double i2 = config.branches[1].critical_current;
  const double i3 = config.branches[2].critical_current;
  const double rg = g.r_gate;
  const double ro = g.r_out;
  const double rs = rg + ro;
  const double alpha = g.coupling_alpha;

  struct Raw {
    double den, scale, num_const, num_flux;
  };
  // I₁ + αI_g < I₁*
  const double k1 = alpha * lt - l2;
  const Raw r1{l3 * rs - k1 * ro, std::abs(l3 * rs) + std::abs(k1 * ro), lt * rs * i1 - k1 * v_gate, -rs};
  // I₂ + αI_g < I₂*
  const double k2 = l1 + l3 + alpha * lt;
  const Raw r2{l3 * rs - k2 * ro, std::abs(l3 * rs) + std::abs(k2 * ro), lt * rs * i2 - k2 * v_gate, -rs};
  // I₃ > −I₃*
  const Raw r3{l1 * rs + l2 * rg, l1 * rs + l2 * rg, lt * rs * i3 - l2 * v_gate, rs};

  CriticalLines out;
  out.theta0 = resolve_theta0(config);
  out.phi0 = config.phi0;
  out.v_gate = v_gate;
  out.alpha = alpha;
  for (int m = m_first; m <= m_last; ++m) {
    int branch = 1;
    for (const Raw& r : {r1, r2, r3}) {
      CriticalLine line;
      line.branch = branch++;
      line.m = m;
      line.denominator = r.den;
      line.numerator_const = r.num_const;
      line.numerator_flux = r.num_flux;
      line.vertical = std::abs(r.den) <= 1e-12 * r.scale;
      if (!line.vertical) {
        line.slope = -r.num_flux / r.den;
        line.offset = r.num_const / r.den;
      }
      out.lines.push_back(line);
    }
  }
  return out;
}

}  // namespace gsquid
