#include "doctest.h"

#include <cmath>
#include <functional>
#include <string>

#include "gsquid/circuit.hpp"
#include "gsquid/constraints.hpp"
#include "gsquid/errors.hpp"
#include "gsquid/units.hpp"

using namespace gsquid;

namespace {

DeviceConfig unit_device() {
  GateSpec g;
  g.r_gate = 1.0;
  g.r_out = 0.57;
  g.gate_threshold = 10.0;
  return make_gated_squid({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, g, UnitsMode::Normalized);
}

DeviceConfig si_device() {
  GateSpec g;
  g.r_gate = 1000.0;
  g.r_out = 570.0;
  g.gate_threshold = 50e-6;
  g.coupling_alpha = 0.3;
  return make_gated_squid({100e-12, 120e-12, 230e-12}, {10e-6, 11e-6, 9e-6}, g);
}

bool has_violation(const DeviceConfig& c, const std::string& field, const std::string& text) {
  for (const auto& v : validate_device(c)) {
    if (v.field == field && v.message.find(text) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("unit device validates") {
  CHECK(validate_device(unit_device()).empty());
  CHECK_NOTHROW(require_valid(unit_device()));
  CHECK(unit_device().single_gate_three_branch());
  CHECK(unit_device().node_count() == 3);
}

TEST_CASE("zero inductance is rejected with the field named") {
  auto c = unit_device();
  c.branches[1].inductance = 0.0;
  CHECK(has_violation(c, "branches[1].inductance", "inductance must be positive"));
  CHECK_THROWS_AS(require_valid(c), InputError);
}

TEST_CASE("gate on a missing node is a dangling attachment") {
  auto c = unit_device();
  c.gates[0].node = 7;
  CHECK(has_violation(c, "gates[0].node", "dangling attachment"));
}

TEST_CASE("single-field perturbations each produce a violation") {
  using Mutation = std::function<void(DeviceConfig&)>;
  const std::pair<const char*, Mutation> cases[] = {
      {"branches[0].inductance", [](DeviceConfig& c) { c.branches[0].inductance = -1.0; }},
      {"branches[2].inductance", [](DeviceConfig& c) { c.branches[2].inductance = NAN; }},
      {"branches[0].critical_current", [](DeviceConfig& c) { c.branches[0].critical_current = 0.0; }},
      {"branches[1].critical_current",
       [](DeviceConfig& c) { c.branches[1].critical_current = INFINITY; }},
      {"gates[0].r_gate", [](DeviceConfig& c) { c.gates[0].r_gate = 0.0; }},
      {"gates[0].r_out", [](DeviceConfig& c) { c.gates[0].r_out = -2.0; }},
      {"gates[0].gate_threshold", [](DeviceConfig& c) { c.gates[0].gate_threshold = 0.0; }},
      {"gates[0].coupling_alpha", [](DeviceConfig& c) { c.gates[0].coupling_alpha = -0.1; }},
      {"input_node", [](DeviceConfig& c) { c.input_node = 9; }},
      {"output_node", [](DeviceConfig& c) { c.output_node = -1; }},
      {"phi0", [](DeviceConfig& c) { c.phi0 = 2.0; }},
      {"theta0", [](DeviceConfig& c) { c.theta0 = INFINITY; }},
  };
  for (const auto& [field, mutate] : cases) {
    CAPTURE(field);
    auto c = unit_device();
    mutate(c);
    const auto v = validate_device(c);
    REQUIRE(!v.empty());
    bool named = false;
    for (const auto& x : v) named = named || x.field == field;
    CHECK(named);
  }
}

TEST_CASE("beta_l") {
  BranchSpec b;
  b.inductance = 1e-9;
  b.critical_current = 6.5824e-7;
  CHECK(beta_l(b, 2.067834e-15) == doctest::Approx(2.000).epsilon(1e-4));
  b.inductance = 0.5e-9;
  CHECK(beta_l(b, 2.067834e-15) == doctest::Approx(1.000).epsilon(1e-4));

  BranchSpec u;
  u.inductance = 1.0;
  u.critical_current = 1.0;
  CHECK(beta_l(u, 1.0) == doctest::Approx(2.0 * M_PI).epsilon(1e-15));

  // Strictly monotone in both factors.
  BranchSpec more = u;
  more.inductance = 1.0 + 1e-9;
  CHECK(beta_l(more, 1.0) > beta_l(u, 1.0));
  more = u;
  more.critical_current = 1.0 + 1e-9;
  CHECK(beta_l(more, 1.0) > beta_l(u, 1.0));
}

TEST_CASE("auto-detected loop of the ring") {
  const auto loops = resolved_loops(unit_device());
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].branches.size() == 3);
  CHECK(coupled_branches(unit_device(), 0) == std::vector<int>{1, 2});
}

TEST_CASE("double-gated topology has two loops") {
  GateSpec g;
  g.r_gate = 1.0;
  g.r_out = 0.5;
  g.gate_threshold = 5.0;
  const auto c = make_double_gated_squid({1, 1, 1, 1, 1}, {1, 1, 1, 1, 1}, g, g,
                                         UnitsMode::Normalized);
  CHECK(validate_device(c).empty());
  CHECK(resolved_loops(c).size() == 2);
}

TEST_CASE("SI to normalized round trip") {
  const auto c = si_device();
  Drive d;
  d.i_in = 3.2e-6;
  d.v_gate = {4e-3};
  d.phi_ext = 0.37 * kFluxQuantum;
  const auto norm = to_normalized(c, d);
  CHECK(norm.config.units == UnitsMode::Normalized);
  CHECK(norm.config.phi0 == 1.0);
  const auto [back, drive] = from_normalized(norm.config, norm.drive, norm.scales);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rel(back.branches[i].inductance, c.branches[i].inductance) <= 1e-14);
    CHECK(rel(back.branches[i].critical_current, c.branches[i].critical_current) <= 1e-14);
  }
  CHECK(rel(back.gates[0].r_gate, c.gates[0].r_gate) <= 1e-14);
  CHECK(rel(back.gates[0].r_out, c.gates[0].r_out) <= 1e-14);
  CHECK(rel(back.gates[0].gate_threshold, c.gates[0].gate_threshold) <= 1e-14);
  CHECK(back.gates[0].coupling_alpha == c.gates[0].coupling_alpha);
  CHECK(rel(back.phi0, c.phi0) <= 1e-14);
  CHECK(rel(drive.i_in, d.i_in) <= 1e-14);
  CHECK(rel(drive.v_gate[0], d.v_gate[0]) <= 1e-14);
  CHECK(rel(drive.phi_ext, d.phi_ext) <= 1e-14);
}

TEST_CASE("normalized config is a fixed point") {
  const auto c = unit_device();
  const auto n = to_normalized(c, Drive{0.5, {0.1}, 0.2, std::nullopt});
  CHECK(n.scales.current == 1.0);
  CHECK(n.scales.flux == 1.0);
  CHECK(n.scales.resistance == 1.0);
  CHECK(n.config.branches[2].inductance == c.branches[2].inductance);
  CHECK(n.drive.i_in == 0.5);
}

TEST_CASE("critical current is covariant under the unit change") {
  const auto c = si_device();
  const double vg = 2e-3;
  const auto n = to_normalized(c, Drive{0.0, {vg}, 0.0, std::nullopt});
  for (double frac : {0.0, 0.13, 0.5, 0.81}) {
    CAPTURE(frac);
    const double si = critical_current(c, frac * kFluxQuantum, vg).i_c;
    const double nz = critical_current(n.config, frac, n.drive.v_gate[0]).i_c;
    CHECK(std::abs(si - nz * n.scales.current) <= 1e-12 * std::abs(si));
  }
}

TEST_CASE("quantity grammar") {
  CHECK(parse_quantity("10mV", Dimension::Voltage) == doctest::Approx(10e-3).epsilon(1e-15));
  CHECK(parse_quantity("1nH", Dimension::Inductance) == doctest::Approx(1e-9).epsilon(1e-15));
  CHECK(parse_quantity("570", Dimension::Resistance) == 570.0);
  CHECK(parse_quantity("1.5 kOhm", Dimension::Resistance) == doctest::Approx(1500.0));
  CHECK(parse_quantity("-2.5e-3 A", Dimension::Current) == doctest::Approx(-2.5e-3));
  CHECK(parse_quantity("3uA", Dimension::Current) == doctest::Approx(3e-6));
  CHECK_THROWS_AS(parse_quantity("10mA", Dimension::Voltage), InputError);
  CHECK_THROWS_AS(parse_quantity("abc", Dimension::Voltage), InputError);
  CHECK_THROWS_AS(parse_quantity("", Dimension::Voltage), InputError);
}
