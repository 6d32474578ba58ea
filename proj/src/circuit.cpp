#include "gsquid/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "gsquid/errors.hpp"

namespace gsquid {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::string branch_field(std::size_t i, const char* name) {
  return "branches[" + std::to_string(i) + "]." + name;
}

std::string gate_field(std::size_t g, const char* name) {
  return "gates[" + std::to_string(g) + "]." + name;
}

// Union-find over nodes, used for connectivity and cycle counting.
struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

// Checks that a signed branch list walks a closed path.
bool loop_is_closed(const DeviceConfig& config, const LoopSpec& loop) {
  if (loop.branches.empty()) return false;
  int start = -1;
  int at = -1;
  for (int signed_id : loop.branches) {
    const auto& b = config.branches[static_cast<std::size_t>(std::abs(signed_id) - 1)];
    const int tail = signed_id > 0 ? b.from_node : b.to_node;
    const int head = signed_id > 0 ? b.to_node : b.from_node;
    if (start < 0) {
      start = tail;
    } else if (tail != at) {
      return false;
    }
    at = head;
  }
  return at == start;
}

}  // namespace

int DeviceConfig::node_count() const {
  int n = 0;
  for (const auto& b : branches) n = std::max({n, b.from_node + 1, b.to_node + 1});
  return n;
}

bool DeviceConfig::single_gate_three_branch() const {
  if (branches.size() != 3 || gates.size() != 1) return false;
  const auto& b = branches;
  return b[0].from_node == 0 && b[0].to_node == 1 && b[1].from_node == 1 && b[1].to_node == 2 &&
         b[2].from_node == 2 && b[2].to_node == 0 && gates[0].node == 1 && input_node == 0 &&
         output_node == 2;
}

std::vector<Violation> validate_device(const DeviceConfig& config) {
  std::vector<Violation> out;
  const int nodes = config.node_count();

  if (config.branches.size() < 2) {
    out.push_back({"branches", "at least 2 branches are required"});
  }
  for (std::size_t i = 0; i < config.branches.size(); ++i) {
    const auto& b = config.branches[i];
    if (b.index != static_cast<int>(i) + 1) {
      out.push_back({branch_field(i, "index"), "branch index must equal its position + 1"});
    }
    if (!positive_finite(b.inductance)) {
      out.push_back({branch_field(i, "inductance"), "inductance must be positive"});
    }
    if (!positive_finite(b.critical_current)) {
      out.push_back({branch_field(i, "critical_current"), "critical current must be positive"});
    }
    if (b.from_node < 0 || b.to_node < 0 || b.from_node == b.to_node) {
      out.push_back({branch_field(i, "nodes"), "branch must join two distinct non-negative nodes"});
    }
  }

  if (!positive_finite(config.phi0)) {
    out.push_back({"phi0", "flux quantum must be positive"});
  }
  if (config.units == UnitsMode::Normalized && config.phi0 != 1.0) {
    out.push_back({"phi0", "normalized units require phi0 = 1"});
  }
  if (config.theta0 && !std::isfinite(*config.theta0)) {
    out.push_back({"theta0", "theta0 must be finite"});
  }
  if (config.input_node < 0 || config.input_node >= nodes) {
    out.push_back({"input_node", "dangling attachment: node " + std::to_string(config.input_node) +
                                     " does not exist"});
  }
  if (config.output_node < 0 || config.output_node >= nodes) {
    out.push_back({"output_node", "dangling attachment: node " + std::to_string(config.output_node) +
                                      " does not exist"});
  }

  for (std::size_t g = 0; g < config.gates.size(); ++g) {
    const auto& gate = config.gates[g];
    if (!positive_finite(gate.r_gate)) out.push_back({gate_field(g, "r_gate"), "resistance must be positive"});
    if (!positive_finite(gate.r_out)) out.push_back({gate_field(g, "r_out"), "resistance must be positive"});
    if (!positive_finite(gate.gate_threshold)) {
      out.push_back({gate_field(g, "gate_threshold"), "gate threshold must be positive"});
    }
    if (!std::isfinite(gate.coupling_alpha) || gate.coupling_alpha < 0.0) {
      out.push_back({gate_field(g, "coupling_alpha"), "coupling alpha must be >= 0"});
    }
    if (gate.node < 0 || gate.node >= nodes) {
      out.push_back({gate_field(g, "node"),
                     "dangling attachment: node " + std::to_string(gate.node) + " does not exist"});
    }
    for (int id : gate.coupled_branches) {
      if (id < 1 || id > static_cast<int>(config.branches.size())) {
        out.push_back({gate_field(g, "coupled_branches"),
                       "dangling attachment: branch " + std::to_string(id) + " does not exist"});
      }
    }
    if (g > 0 && gate.r_out != config.gates[0].r_out) {
      out.push_back({gate_field(g, "r_out"), "all gates share one output resistor; r_out must agree"});
    }
  }

  // Structural checks need sane branch endpoints.
  const bool endpoints_ok = std::none_of(out.begin(), out.end(), [](const Violation& v) {
    return v.field.find(".nodes") != std::string::npos || v.field == "branches";
  });
  if (!endpoints_ok || nodes == 0) return out;

  DisjointSet ds(nodes);
  int cycles = 0;
  for (const auto& b : config.branches) {
    if (!ds.unite(b.from_node, b.to_node)) ++cycles;
  }
  for (int n = 1; n < nodes; ++n) {
    if (ds.find(n) != ds.find(0)) {
      out.push_back({"branches", "branch graph is disconnected (node " + std::to_string(n) + ")"});
      break;
    }
  }

  if (config.loops.empty()) {
    if (cycles != 1) {
      out.push_back({"loops", "network has " + std::to_string(cycles) +
                                  " independent loops; list them explicitly"});
    }
  } else {
    if (static_cast<int>(config.loops.size()) != cycles) {
      out.push_back({"loops", "expected " + std::to_string(cycles) + " loops, got " +
                                  std::to_string(config.loops.size())});
    }
    for (std::size_t l = 0; l < config.loops.size(); ++l) {
      const auto& loop = config.loops[l];
      const std::string field = "loops[" + std::to_string(l) + "]";
      bool ids_ok = !loop.branches.empty();
      for (int id : loop.branches) {
        if (id == 0 || std::abs(id) > static_cast<int>(config.branches.size())) ids_ok = false;
      }
      if (!ids_ok) {
        out.push_back({field + ".branches", "loop references a branch that does not exist"});
      } else if (!loop_is_closed(config, loop)) {
        out.push_back({field + ".branches", "loop does not form a closed path"});
      }
      if (!std::isfinite(loop.flux_fraction)) {
        out.push_back({field + ".flux_fraction", "flux fraction must be finite"});
      }
    }
  }
  return out;
}

void require_valid(const DeviceConfig& config) {
  const auto violations = validate_device(config);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid device config:";
  for (const auto& v : violations) msg << "\n  " << v.field << ": " << v.message;
  throw InputError(msg.str());
}

double beta_l(const BranchSpec& branch, double phi0) {
  return kTwoPi / phi0 * branch.inductance * branch.critical_current;
}

std::vector<LoopSpec> resolved_loops(const DeviceConfig& config) {
  if (!config.loops.empty()) return config.loops;

  // Single cycle: the branch that closes the spanning forest, plus the tree
  // path back between its endpoints.
  const int nodes = config.node_count();
  DisjointSet ds(nodes);
  std::vector<std::vector<std::pair<int, int>>> tree(static_cast<std::size_t>(nodes));
  int closing = -1;
  for (const auto& b : config.branches) {
    if (ds.unite(b.from_node, b.to_node)) {
      tree[static_cast<std::size_t>(b.from_node)].push_back({b.to_node, b.index});
      tree[static_cast<std::size_t>(b.to_node)].push_back({b.from_node, -b.index});
    } else if (closing < 0) {
      closing = b.index;
    }
  }
  if (closing < 0) throw InputError("branch graph has no loop");

  const auto& cb = config.branches[static_cast<std::size_t>(closing - 1)];
  // Path from cb.to_node back to cb.from_node through the tree.
  std::vector<int> via(static_cast<std::size_t>(nodes), 0);
  std::vector<int> prev(static_cast<std::size_t>(nodes), -1);
  std::vector<int> stack{cb.to_node};
  prev[static_cast<std::size_t>(cb.to_node)] = cb.to_node;
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    for (const auto& [next, signed_id] : tree[static_cast<std::size_t>(n)]) {
      if (prev[static_cast<std::size_t>(next)] >= 0) continue;
      prev[static_cast<std::size_t>(next)] = n;
      via[static_cast<std::size_t>(next)] = signed_id;
      stack.push_back(next);
    }
  }
  std::vector<int> path;
  for (int n = cb.from_node; n != cb.to_node; n = prev[static_cast<std::size_t>(n)]) {
    path.push_back(via[static_cast<std::size_t>(n)]);
  }
  std::reverse(path.begin(), path.end());

  LoopSpec loop;
  loop.branches.push_back(closing);
  loop.branches.insert(loop.branches.end(), path.begin(), path.end());
  // Orient the loop along branch 1 when it takes part.
  for (int id : loop.branches) {
    if (id == -1) {
      std::reverse(loop.branches.begin(), loop.branches.end());
      for (int& x : loop.branches) x = -x;
      break;
    }
  }
  // Start the walk at the lowest branch id for readability.
  auto first = std::min_element(loop.branches.begin(), loop.branches.end(),
                                [](int a, int b) { return std::abs(a) < std::abs(b); });
  std::rotate(loop.branches.begin(), first, loop.branches.end());
  return {loop};
}

std::vector<int> coupled_branches(const DeviceConfig& config, std::size_t g) {
  const auto& gate = config.gates.at(g);
  if (!gate.coupled_branches.empty()) return gate.coupled_branches;
  std::vector<int> ids;
  for (const auto& b : config.branches) {
    if (b.from_node == gate.node || b.to_node == gate.node) ids.push_back(b.index);
  }
  return ids;
}

NormalizedProblem to_normalized(const DeviceConfig& config, const Drive& drive) {
  if (config.units == UnitsMode::Normalized) return {config, drive, UnitScales{}};
  if (config.branches.empty()) throw InputError("cannot normalize a config without branches");

  UnitScales scales;
  scales.current = config.branches.front().critical_current;
  scales.flux = config.phi0;
  scales.resistance = config.gates.empty() ? 1.0 : config.gates.front().r_gate;

  NormalizedProblem p{config, drive, scales};
  for (auto& b : p.config.branches) {
    b.inductance /= scales.inductance();
    b.critical_current /= scales.current;
  }
  for (auto& g : p.config.gates) {
    g.r_gate /= scales.resistance;
    g.r_out /= scales.resistance;
    g.gate_threshold /= scales.current;
  }
  p.config.phi0 = 1.0;
  p.config.units = UnitsMode::Normalized;

  p.drive.i_in /= scales.current;
  for (double& v : p.drive.v_gate) v /= scales.voltage();
  p.drive.phi_ext /= scales.flux;
  return p;
}

std::pair<DeviceConfig, Drive> from_normalized(const DeviceConfig& config, const Drive& drive,
                                               const UnitScales& scales) {
  DeviceConfig c = config;
  Drive d = drive;
  for (auto& b : c.branches) {
    b.inductance *= scales.inductance();
    b.critical_current *= scales.current;
  }
  for (auto& g : c.gates) {
    g.r_gate *= scales.resistance;
    g.r_out *= scales.resistance;
    g.gate_threshold *= scales.current;
  }
  c.phi0 = config.phi0 * scales.flux;
  c.units = UnitsMode::SI;
  d.i_in *= scales.current;
  for (double& v : d.v_gate) v *= scales.voltage();
  d.phi_ext *= scales.flux;
  return {c, d};
}

namespace {

DeviceConfig three_branch_ring(const std::array<double, 3>& inductance,
                               const std::array<double, 3>& critical_current, UnitsMode units,
                               std::optional<double> theta0) {
  DeviceConfig c;
  for (int i = 0; i < 3; ++i) {
    BranchSpec b;
    b.index = i + 1;
    b.inductance = inductance[static_cast<std::size_t>(i)];
    b.critical_current = critical_current[static_cast<std::size_t>(i)];
    b.from_node = i;
    b.to_node = (i + 1) % 3;
    c.branches.push_back(b);
  }
  c.input_node = 0;
  c.output_node = 2;
  c.theta0 = theta0;
  c.units = units;
  c.phi0 = units == UnitsMode::Normalized ? 1.0 : kFluxQuantum;
  return c;
}

}  // namespace

DeviceConfig make_gated_squid(const std::array<double, 3>& inductance,
                              const std::array<double, 3>& critical_current, const GateSpec& gate,
                              UnitsMode units, std::optional<double> theta0) {
  DeviceConfig c = three_branch_ring(inductance, critical_current, units, theta0);
  GateSpec g = gate;
  g.node = 1;
  c.gates.push_back(g);
  return c;
}

DeviceConfig make_ungated_squid(const std::array<double, 3>& inductance,
                                const std::array<double, 3>& critical_current, UnitsMode units,
                                std::optional<double> theta0) {
  return three_branch_ring(inductance, critical_current, units, theta0);
}

DeviceConfig make_double_gated_squid(const std::array<double, 5>& inductance,
                                     const std::array<double, 5>& critical_current,
                                     const GateSpec& gate1, const GateSpec& gate2, UnitsMode units) {
  DeviceConfig c;
  const std::array<std::pair<int, int>, 5> ends{{{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 2}}};
  for (std::size_t i = 0; i < 5; ++i) {
    BranchSpec b;
    b.index = static_cast<int>(i) + 1;
    b.inductance = inductance[i];
    b.critical_current = critical_current[i];
    b.from_node = ends[i].first;
    b.to_node = ends[i].second;
    c.branches.push_back(b);
  }
  GateSpec g1 = gate1;
  g1.node = 1;
  GateSpec g2 = gate2;
  g2.node = 3;
  c.gates = {g1, g2};
  c.loops = {LoopSpec{{1, 2, 3}, 0.5, std::nullopt}, LoopSpec{{4, 5, 3}, 0.5, std::nullopt}};
  c.input_node = 0;
  c.output_node = 2;
  c.units = units;
  c.phi0 = units == UnitsMode::Normalized ? 1.0 : kFluxQuantum;
  return c;
}

}  // namespace gsquid
