#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "gsquid/analysis.hpp"
#include "gsquid/circuit.hpp"
#include "gsquid/constraints.hpp"
#include "gsquid/errors.hpp"
#include "gsquid/pattern.hpp"
#include "gsquid/units.hpp"

using namespace gsquid;

namespace {

DeviceConfig gated(std::array<double, 3> l, double alpha, double r = 0.57,
                   std::optional<double> theta0 = std::nullopt, double ig_star = 100.0) {
  GateSpec g;
  g.r_gate = 1.0;
  g.r_out = r;
  g.gate_threshold = ig_star;
  g.coupling_alpha = alpha;
  return make_gated_squid(l, {1.0, 1.0, 1.0}, g, UnitsMode::Normalized, theta0);
}

}  // namespace

TEST_CASE("predicted phase shift") {
  GateSpec g;
  g.r_gate = 1000.0;
  g.r_out = 570.0;
  g.gate_threshold = 1e-3;
  const auto c = make_gated_squid({10e-12, 10e-12, 20e-12}, {1e-5, 1e-5, 1e-5}, g);
  CHECK(phase_shift_predicted(c, 0.0).flux == 0.0);
  const auto s = phase_shift_predicted(c, 1e-3);
  CHECK(std::abs(s.flux) == doctest::Approx(6.369e-18).epsilon(1e-3));
  CHECK(std::abs(s.flux) / kFluxQuantum == doctest::Approx(3.08e-3).epsilon(2e-3));
  CHECK(s.flux < 0.0);
  CHECK(s.radians == doctest::Approx(kTwoPi * s.flux / kFluxQuantum).epsilon(1e-14));
  CHECK(phase_shift_predicted(c, 2e-3).flux == doctest::Approx(2.0 * s.flux).epsilon(1e-14));
}

TEST_CASE("measured phase shift") {
  const auto a_cfg = gated({1, 1.3, 2}, 0.0, 0.57, 0.4);
  const auto a = sweep_pattern(a_cfg, 0.0, 2.0, 401, 0.2);

  SUBCASE("identical patterns") { CHECK(std::abs(phase_shift_measured(a, a).flux) <= 1e-6); }

  SUBCASE("synthetic translations are recovered") {
    // Raising Θ₀ by 2πδ moves the whole envelope by +δ.
    for (double delta : {0.25, -0.31, 0.05, 0.49, -0.12}) {
      CAPTURE(delta);
      auto b_cfg = a_cfg;
      b_cfg.theta0 = *a_cfg.theta0 + kTwoPi * delta;
      const auto b = sweep_pattern(b_cfg, 0.0, 2.0, 401, 0.2);
      const auto m = phase_shift_measured(a, b);
      CHECK(std::abs(m.flux - delta) <= 1e-3);
      CHECK(m.radians == doctest::Approx(kTwoPi * m.flux));
    }
  }

  SUBCASE("model patterns follow the predicted shift") {
    const double vg = 0.35;
    const auto b = sweep_pattern(a_cfg, 0.0, 2.0, 401, 0.2 + vg);
    const double expect = phase_shift_predicted(a_cfg, vg).flux;
    CHECK(std::abs(phase_shift_measured(a, b).flux - expect) <= 1e-3);
  }

  SUBCASE("periods must agree") {
    auto c = a_cfg;
    c.loops = resolved_loops(a_cfg);
    c.loops[0].flux_fraction = 0.5;
    const auto b = sweep_pattern(c, 0.0, 4.0, 401, 0.2);
    CHECK_THROWS_AS(phase_shift_measured(a, b), InputError);
  }
}

TEST_CASE("amplitude shift") {
  GateSpec g;
  g.r_gate = 1000.0;
  g.r_out = 570.0;
  g.gate_threshold = 1e-3;
  g.coupling_alpha = 0.8;
  auto c = make_gated_squid({1e-10, 1e-10, 2e-10}, {1e-5, 1e-5, 1e-5}, g);
  CHECK(amplitude_shift_predicted(c, 1e-3) == doctest::Approx(1e-6 * 1.8 / 0.544).epsilon(1e-12));
  CHECK(amplitude_shift_predicted(c, 1e-3) == doctest::Approx(3.309e-6).epsilon(1e-4));
  c.gates[0].coupling_alpha = 0.0;
  CHECK(amplitude_shift_predicted(c, 1e-3) == doctest::Approx(1e-6).epsilon(1e-14));
  c.gates[0].coupling_alpha = 1000.0 / 570.0;
  CHECK_THROWS_AS(amplitude_shift_predicted(c, 1e-3), NumericalError);
}

TEST_CASE("amplitude shift equals the change of the envelope maximum") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    double alpha, r;
    do {
      alpha = 2.0 * u(rng);
      r = 0.1 + 2.0 * u(rng);
    } while (alpha * r >= 0.99);
    const auto c = gated({0.5 + u(rng), 0.5 + u(rng), 0.5 + 2 * u(rng)}, alpha, r);
    const double vg = 3.0 * u(rng);
    const double diff = envelope_max_closed(c, 0.0) - envelope_max_closed(c, vg);
    const double pred = amplitude_shift_predicted(c, vg);
    CHECK(std::abs(diff - pred) <= 1e-12 * std::abs(pred) + 1e-15);
  }
}

TEST_CASE("alpha star") {
  const auto c = gated({1, 1, 2}, 0.0);
  const auto a = alpha_star(c);
  CHECK(std::abs(a.value - (2.0 / 0.57 - 1.0) / 4.0) <= 1e-12);
  CHECK(std::abs(a.value - 0.6271929825) <= 1e-9);
  CHECK(std::round(a.value * 1e4) / 1e4 == doctest::Approx(0.6272).epsilon(1e-12));
  CHECK(a.physical);
  CHECK(std::abs(zero_inductance_residual(c, a.value)) <= 1e-12 * 2.0);

  SUBCASE("large ratio clamps") {
    const auto big = alpha_star(gated({1, 1, 2}, 0.0, 1e9));
    CHECK(big.value == 0.0);
    CHECK(big.clamped);
    CHECK_FALSE(big.physical);
    CHECK(big.raw == doctest::Approx(-0.25).epsilon(1e-6));
  }
  SUBCASE("zero boundary") {
    const auto z = alpha_star(gated({1, 1, 0.57}, 0.0));
    CHECK(std::abs(z.value) <= 1e-15);
  }
}

TEST_CASE("effective inductance") {
  SUBCASE("ungated falling segment") {
    const auto c = make_ungated_squid({1.0, 1.0, 2.0}, {1.0, 1.0, 1.0}, UnitsMode::Normalized);
    const auto p = sweep_pattern(c, 0.0, 2.0, 101, std::span<const double>{});
    // Finite-difference reciprocal slope as the reference.
    for (double phi = 0.03; phi < 2.0; phi += 0.11) {
      const double h = 1e-6;
      const double fd = 2 * h / (critical_current(c, phi + h, 0.0).i_c - critical_current(c, phi - h, 0.0).i_c);
      const auto e = effective_inductance(p, phi);
      if (e.at_vertex) continue;
      CHECK(e.left == doctest::Approx(fd).epsilon(1e-6));
      CHECK(std::abs(e.left) == doctest::Approx(2.0).epsilon(1e-12));
      CHECK_FALSE(e.zero_inductance);
    }
  }
  SUBCASE("vertical step at the critical coupling") {
    auto c = gated({1, 1, 2}, 0.0);
    c.gates[0].coupling_alpha = alpha_star(c).value;
    const auto p = sweep_pattern(c, 0.0, 2.0, 101, 1.0);
    bool flagged = false;
    for (const auto& s : p.segments) {
      if (!s.zero_inductance) continue;
      const auto e = effective_inductance(p, s.phi_lo);
      flagged = flagged || e.zero_inductance;
    }
    CHECK(flagged);
  }
  SUBCASE("gate plateau") {
    const auto c = gated({1, 1, 2}, 0.0, 0.57, std::nullopt, 0.05);
    const auto p = sweep_pattern(c, 0.0, 1.0, 11, 0.0);
    const auto e = effective_inductance(p, 0.37);
    CHECK(std::isinf(e.left));
    CHECK(std::isinf(e.right));
    CHECK_FALSE(e.zero_inductance);
  }
}
