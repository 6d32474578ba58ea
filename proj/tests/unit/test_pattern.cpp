#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "gsquid/analysis.hpp"
#include "gsquid/circuit.hpp"
#include "gsquid/constraints.hpp"
#include "gsquid/errors.hpp"
#include "gsquid/pattern.hpp"

using namespace gsquid;

namespace {

DeviceConfig gated(std::array<double, 3> l, double alpha, double ig_star = 100.0) {
  GateSpec g;
  g.r_gate = 1.0;
  g.r_out = 0.57;
  g.gate_threshold = ig_star;
  g.coupling_alpha = alpha;
  return make_gated_squid(l, {1.0, 1.0, 1.0}, g, UnitsMode::Normalized);
}

DeviceConfig ungated_symmetric() {
  return make_ungated_squid({1.0, 1.0, 2.0}, {1.0, 1.0, 1.0}, UnitsMode::Normalized);
}

std::vector<double> like_vertices(const InterferencePattern& p, const std::string& left,
                                  const std::string& right) {
  std::vector<double> out;
  for (const auto& v : p.vertices) {
    if (!v.jump && v.left_label == left && v.right_label == right) out.push_back(v.phi_ext);
  }
  return out;
}

}  // namespace

TEST_CASE("samples sit on the analytic segments") {
  for (double alpha : {0.0, 0.3}) {
    const auto c = gated({1, 1.2, 2}, alpha);
    const auto p = sweep_pattern(c, -0.3, 1.9, 301, 0.9);
    REQUIRE(p.samples.size() == 301);
    for (std::size_t k = 1; k < p.samples.size(); ++k) {
      CHECK(p.samples[k].phi_ext > p.samples[k - 1].phi_ext);
    }
    for (const auto& s : p.samples) {
      CHECK(std::abs(p.evaluate(s.phi_ext) - s.i_c) <= 1e-9 * p.current_scale);
    }
    for (std::size_t k = 1; k < p.segments.size(); ++k) {
      const auto& a = p.segments[k - 1];
      const auto& b = p.segments[k];
      CHECK((a.label != b.label || a.m != b.m || a.zero_inductance != b.zero_inductance));
    }
  }
}

TEST_CASE("second differences vanish inside a segment") {
  const auto c = gated({1, 1, 2}, 0.3);
  const auto p = sweep_pattern(c, 0.0, 2.0, 801, 1.4);
  int checked = 0;
  for (std::size_t k = 1; k + 1 < p.samples.size(); ++k) {
    const auto& a = p.samples[k - 1];
    const auto& b = p.samples[k];
    const auto& d = p.samples[k + 1];
    if (a.label != d.label || a.m != d.m || b.label != a.label) continue;
    if (p.segment_at(a.phi_ext) != p.segment_at(d.phi_ext)) continue;
    CHECK(std::abs(a.i_c - 2 * b.i_c + d.i_c) <= 1e-9);
    ++checked;
  }
  CHECK(checked > 700);
}

TEST_CASE("like vertices of the ungated device repeat every flux quantum") {
  const auto p = sweep_pattern(ungated_symmetric(), 0.0, 4.0, 50, std::span<const double>{});
  const auto peaks = like_vertices(p, "1", "3");
  REQUIRE(peaks.size() >= 3);
  for (std::size_t k = 1; k < peaks.size(); ++k) CHECK(peaks[k] - peaks[k - 1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("wide-gate vertex sets translate with the gate voltage") {
  const auto c = gated({1, 1.5, 2}, 0.0);
  const double v1 = 0.2;
  const double v2 = 0.7;
  const double shift = 1.5 * (v2 - v1) / 1.57;
  const auto a = sweep_pattern(c, 0.0, 3.0, 20, v1);
  const auto b = sweep_pattern(c, 0.0, 3.0, 20, v2);
  const auto va = like_vertices(a, "1", "3");
  const auto vb = like_vertices(b, "1", "3");
  REQUIRE(va.size() >= 2);
  // b(Φ) = a(Φ + shift): every vertex of a has a partner in b at Φ − shift.
  for (double x : va) {
    const double target = x - shift;
    if (target < 0.0 || target > 3.0) continue;
    const auto it = std::min_element(vb.begin(), vb.end(), [&](double p, double q) {
      return std::abs(p - target) < std::abs(q - target);
    });
    REQUIRE(it != vb.end());
    CHECK(*it == doctest::Approx(target).epsilon(1e-12));
  }
}

TEST_CASE("envelope extrema follow the narrow-gate closed forms where branches 2 and 3 bind") {
  // Regimes located by scanning: the upper vertex joins the branch-2 and
  // branch-3 lines.
  struct Case {
    double alpha, vg;
  };
  for (const auto& k : {Case{0.0, 1.5}, Case{0.0, 2.25}, Case{0.3, 1.25}, Case{0.3, 1.5}}) {
    CAPTURE(k.alpha);
    CAPTURE(k.vg);
    const auto c = gated({1, 1, 2}, k.alpha);
    const auto st = envelope_stats(sweep_pattern(c, 0.0, 1.0, 11, k.vg));
    const double hi = envelope_max_closed(c, k.vg);
    const double lo = envelope_min_closed(c, k.vg);
    CHECK(std::abs(st.max_ic - hi) <= 1e-9 * std::abs(hi));
    CHECK(std::abs(st.min_ic - lo) <= 1e-9 * std::abs(lo));
    CHECK(st.modulation_depth == doctest::Approx(hi - lo).epsilon(1e-9));
  }
}

TEST_CASE("envelope maximum falls with the gate voltage below 1/r") {
  const auto c = gated({1, 1, 2}, 0.3);
  double prev = INFINITY;
  for (double vg = 1.2; vg <= 1.8; vg += 0.1) {
    const double hi = envelope_stats(sweep_pattern(c, 0.0, 1.0, 11, vg)).max_ic;
    CHECK(hi < prev);
    prev = hi;
  }
}

TEST_CASE("ungated envelope depth is the flux quantum over the total inductance") {
  const auto st = envelope_stats(sweep_pattern(ungated_symmetric(), 0.0, 1.0, 101, std::span<const double>{}));
  CHECK(st.modulation_depth == doctest::Approx(1.0 / 4.0).epsilon(1e-12));
  // Independent check from dense sampling.
  double lo = INFINITY, hi = -INFINITY;
  for (int k = 0; k <= 4000; ++k) {
    const double ic = critical_current(ungated_symmetric(), k / 4000.0, 0.0).i_c;
    lo = std::min(lo, ic);
    hi = std::max(hi, ic);
  }
  CHECK(hi - lo == doctest::Approx(st.modulation_depth).epsilon(1e-9));
}

TEST_CASE("envelope stats need a full period") {
  const auto p = sweep_pattern(gated({1, 1, 2}, 0.0), 0.0, 0.6, 11, 0.5);
  CHECK_THROWS_AS(envelope_stats(p), InputError);
}

TEST_CASE("zero-inductance step at the critical coupling") {
  auto c = gated({1, 1, 2}, 0.0);
  c.gates[0].coupling_alpha = alpha_star(c).value;
  const auto p = sweep_pattern(c, 0.0, 2.0, 101, 1.0);
  bool found = false;
  for (const auto& s : p.segments) found = found || (s.zero_inductance && s.label == "2");
  CHECK(found);
}

TEST_CASE("strong coupling is flagged re-entrant") {
  const auto c = gated({1, 1, 2}, 0.8);
  const auto p = sweep_pattern(c, 0.0, 1.0, 401, 1.25);
  const auto n = std::count_if(p.samples.begin(), p.samples.end(), [](const auto& s) { return s.reentrant; });
  CHECK(n > 0);
}

TEST_CASE("envelope separates superconducting and normal drives") {
  const auto c = gated({1, 1.2, 2}, 0.25);
  const double vg = 0.8;
  const auto p = sweep_pattern(c, 0.0, 1.0, 11, vg);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> phi_d(0.0, 1.0), i_d(-1.0, 3.0);
  const ConstraintSet cs(c, std::vector<double>{vg});
  int above = 0;
  for (int k = 0; k < 10000; ++k) {
    const double phi = phi_d(rng);
    const double i = i_d(rng);
    const double ic = p.evaluate(phi);
    const bool sc = cs.classify(i, phi).superconducting;
    if (sc) CHECK(i < ic);
    if (!sc && i < ic) {
      // Only below the lower envelope edge or in a re-entrant gap.
      CHECK((i < 0.0 || cs.critical_current(phi).reentrant));
    }
    above += i >= ic;
  }
  CHECK(above > 0);
}

TEST_CASE("region map") {
  const auto c = gated({1, 1, 2}, 0.0);
  const double vg = 0.5;
  std::vector<double> phi, cur;
  for (int k = 0; k < 41; ++k) phi.push_back(k / 40.0);
  for (int k = 0; k < 61; ++k) cur.push_back(-0.5 + 3.0 * k / 60.0);
  const std::vector<double> v{vg};
  const auto map = region_map(c, phi, cur, v, 12.5);

  SUBCASE("zero input is superconducting") {
    const std::vector<double> zero{0.0};
    const auto z = region_map(c, phi, zero, v);
    for (auto s : z.cells) CHECK(s == CellState::Superconducting);
  }
  SUBCASE("above the maximum is normal") {
    const std::vector<double> high{5.0};
    const auto h = region_map(c, phi, high, v);
    for (auto s : h.cells) CHECK(s == CellState::Normal);
  }
  SUBCASE("boundary follows the envelope within one cell") {
    const auto p = sweep_pattern(c, 0.0, 1.0, 41, vg);
    const double di = cur[1] - cur[0];
    for (std::size_t j = 0; j < phi.size(); ++j) {
      double top = -INFINITY;
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (map.at(i, j) == CellState::Superconducting) top = cur[i];
      }
      CHECK(std::abs(top - p.samples[j].i_c) <= di);
    }
  }
  SUBCASE("resistance display") {
    CHECK(map.resistance(60, 0).value() == 12.5);
    CHECK(map.resistance(20, 3).value() == 0.0);
    CHECK(cell_state_name(CellState::GateLimited) == "gate_limited");
  }
  SUBCASE("gate-limited cells") {
    auto tight = c;
    tight.gates[0].gate_threshold = 0.05;
    const auto g = region_map(tight, phi, cur, v);
    CHECK(std::count(g.cells.begin(), g.cells.end(), CellState::GateLimited) > 0);
  }
  SUBCASE("bad grids") {
    const std::vector<double> empty;
    const std::vector<double> down{1.0, 0.0};
    CHECK_THROWS_AS(region_map(c, empty, cur, v), InputError);
    CHECK_THROWS_AS(region_map(c, phi, down, v), InputError);
  }
}

TEST_CASE("config digest") {
  const auto a = gated({1, 1, 2}, 0.0);
  auto b = a;
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a).size() == 16);
  b.branches[1].inductance = 1.0000001;
  CHECK(config_digest(a) != config_digest(b));
}
