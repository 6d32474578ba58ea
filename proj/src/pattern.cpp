#include "gsquid/pattern.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsquid/errors.hpp"

namespace gsquid {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Piece {
  double lo, hi;
  double slope, intercept;
  int m;
  int plane;  // −1: flat fallback
  std::string label;
};

bool same_piece(const Piece& a, const Piece& b) {
  if (a.plane < 0 || b.plane < 0) {
    return a.plane == b.plane && a.label == b.label &&
           (a.intercept == b.intercept || (std::isnan(a.intercept) && std::isnan(b.intercept)));
  }
  return a.m == b.m && a.plane == b.plane;
}

}  // namespace

std::string config_digest(const DeviceConfig& config) {
  std::string text;
  auto add = [&text](double v) { text += fmt::format("{:.17g};", v); };
  text += config.units == UnitsMode::SI ? "si;" : "normalized;";
  add(config.phi0);
  text += config.theta0 ? fmt::format("{:.17g};", *config.theta0) : "auto;";
  text += fmt::format("{};{};", config.input_node, config.output_node);
  for (const auto& b : config.branches) {
    text += fmt::format("b{}:{}>{}:", b.index, b.from_node, b.to_node);
    add(b.inductance);
    add(b.critical_current);
  }
  for (const auto& g : config.gates) {
    text += fmt::format("g@{}:", g.node);
    for (double v : {g.r_gate, g.r_out, g.gate_threshold, g.coupling_alpha, g.width_ratio}) add(v);
    for (int id : g.coupled_branches) text += fmt::format("c{};", id);
  }
  for (const auto& l : config.loops) {
    text += "l:";
    for (int id : l.branches) text += fmt::format("{},", id);
    add(l.flux_fraction);
    if (l.theta0) add(*l.theta0);
  }
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

double InterferencePattern::evaluate(double phi) const {
  if (segments.empty()) return kNaN;
  return segments[segment_at(phi)].at(phi);
}

std::size_t InterferencePattern::segment_at(double phi) const {
  std::size_t best = 0;
  bool found = false;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& s = segments[k];
    if (s.zero_inductance) continue;
    if (!found || s.phi_lo <= phi) {
      best = k;
      found = true;
    }
    if (s.phi_lo <= phi && phi < s.phi_hi) return k;
  }
  return best;
}

InterferencePattern sweep_pattern(const DeviceConfig& config, double phi_lo, double phi_hi,
                                  int n_samples, std::span<const double> v_gate,
                                  const SweepOptions& options) {
  if (n_samples < 2) throw InputError("sweep needs at least 2 samples");
  if (!(phi_lo < phi_hi)) throw InputError("sweep range must have phi_lo < phi_hi");

  const ConstraintSet cs(config, v_gate, options.window);
  InterferencePattern pat;
  pat.config_digest = config_digest(config);
  pat.v_gate.assign(v_gate.begin(), v_gate.end());
  pat.phi0 = config.phi0;
  pat.period = config.phi0 / cs.flux_fraction();
  pat.current_scale = cs.current_scale();
  pat.phi_lo = phi_lo;
  pat.phi_hi = phi_hi;

  for (int k = 0; k < n_samples; ++k) {
    const double phi =
        k == n_samples - 1 ? phi_hi : phi_lo + (phi_hi - phi_lo) * k / (n_samples - 1);
    const CriticalPoint cp = cs.critical_current(phi);
    pat.samples.push_back({phi, cp.i_c, cp.label, cp.m, cp.reentrant});
  }

  // Every line of every fluxon number in reach, as i = slope·phi + intercept.
  const double f = cs.flux_fraction();
  const double th = cs.theta0() / kTwoPi;
  const int m_first = std::min(cs.m_range(phi_lo).first, cs.m_range(phi_hi).first);
  const int m_last = std::max(cs.m_range(phi_lo).second, cs.m_range(phi_hi).second);
  struct Line {
    double slope, intercept;
  };
  std::vector<Line> lines;
  std::vector<double> cuts{phi_lo, phi_hi};
  const auto& planes = cs.half_planes();
  for (int m = m_first; m <= m_last; ++m) {
    const double f0 = (m + th) * cs.phi0();
    for (const auto& p : planes) {
      if (p.vertical) {
        if (p.c != 0.0) cuts.push_back((f0 - p.d / p.c) / f);
        continue;
      }
      lines.push_back({p.c * f / p.a, (p.d - p.c * f0) / p.a});
    }
    // Window re-centering happens half-way between integer flux terms.
    cuts.push_back(((m + 0.5 + th) * cs.phi0()) / f);
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double ds = lines[i].slope - lines[j].slope;
      if (ds == 0.0) continue;
      cuts.push_back((lines[j].intercept - lines[i].intercept) / ds);
    }
  }
  std::erase_if(cuts, [&](double x) { return !(x >= phi_lo && x <= phi_hi); });
  std::sort(cuts.begin(), cuts.end());

  const double min_width = 1e-12 * pat.period;
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    if (b - a <= min_width) continue;
    const double mid = 0.5 * (a + b);
    const CriticalPoint cp = cs.critical_current(mid);
    Piece piece{a, b, 0.0, cp.i_c, cp.m, cp.plane, cp.label};
    if (cp.plane >= 0) {
      const auto& p = planes[static_cast<std::size_t>(cp.plane)];
      const double f0 = (cp.m + th) * cs.phi0();
      piece.slope = p.c * f / p.a;
      piece.intercept = (p.d - p.c * f0) / p.a;
    }
    if (!pieces.empty() && same_piece(pieces.back(), piece)) {
      pieces.back().hi = b;
    } else {
      if (!pieces.empty()) pieces.back().hi = a;
      pieces.push_back(piece);
    }
  }
  if (!pieces.empty()) {
    pieces.front().lo = phi_lo;
    pieces.back().hi = phi_hi;
  }

  const double tol = 1e-9 * pat.current_scale;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const Piece& p = pieces[k];
    PatternSegment seg;
    seg.phi_lo = p.lo;
    seg.phi_hi = p.hi;
    seg.slope = p.slope;
    seg.intercept = p.intercept;
    seg.label = p.label;
    seg.m = p.m;
    seg.i_lo = seg.at(p.lo);
    seg.i_hi = seg.at(p.hi);
    pat.segments.push_back(seg);
    if (k + 1 == pieces.size()) break;

    const Piece& q = pieces[k + 1];
    const double at = p.hi;
    const double left = p.slope * at + p.intercept;
    const double right = q.slope * at + q.intercept;
    if (std::abs(left - right) <= tol) {
      pat.vertices.push_back({at, 0.5 * (left + right), p.label, q.label, false});
      continue;
    }
    if (std::isfinite(left)) pat.vertices.push_back({at, left, p.label, q.label, true});
    if (std::isfinite(right)) pat.vertices.push_back({at, right, p.label, q.label, true});

    // Name the step after a vertical constraint sitting there, if any.
    std::string step_label = "step";
    for (int m = m_first; m <= m_last && step_label == "step"; ++m) {
      const double f0 = (m + th) * cs.phi0();
      for (const auto& hp : planes) {
        if (!hp.vertical || hp.c == 0.0) continue;
        if (std::abs((f0 - hp.d / hp.c) / f - at) <= 1e-9 * pat.period) {
          step_label = constraint_label(hp.constraint);
          break;
        }
      }
    }
    PatternSegment step;
    step.phi_lo = step.phi_hi = at;
    step.label = step_label;
    step.m = q.m;
    step.zero_inductance = true;
    step.i_lo = std::min(left, right);
    step.i_hi = std::max(left, right);
    step.intercept = kNaN;
    pat.segments.push_back(step);
  }
  return pat;
}

InterferencePattern sweep_pattern(const DeviceConfig& config, double phi_lo, double phi_hi,
                                  int n_samples, double v_gate, const SweepOptions& options) {
  const double v[1] = {v_gate};
  return sweep_pattern(config, phi_lo, phi_hi, n_samples,
                       std::span<const double>(v, config.gates.empty() ? 0 : 1), options);
}

std::string cell_state_name(CellState s) {
  switch (s) {
    case CellState::Superconducting:
      return "superconducting";
    case CellState::Normal:
      return "normal";
    case CellState::GateLimited:
      return "gate_limited";
  }
  return "normal";
}

std::optional<double> RegionMap::resistance(std::size_t i_row, std::size_t phi_col) const {
  if (!normal_resistance) return std::nullopt;
  return at(i_row, phi_col) == CellState::Superconducting ? 0.0 : *normal_resistance;
}

RegionMap region_map(const DeviceConfig& config, std::span<const double> phi_grid,
                     std::span<const double> i_in_grid, std::span<const double> v_gate,
                     std::optional<double> normal_resistance, int window) {
  if (phi_grid.empty() || i_in_grid.empty()) throw InputError("region map grids must be nonempty");
  if (!std::is_sorted(phi_grid.begin(), phi_grid.end()) ||
      !std::is_sorted(i_in_grid.begin(), i_in_grid.end())) {
    throw InputError("region map grids must be monotone increasing");
  }
  const ConstraintSet cs(config, v_gate, window);
  RegionMap map;
  map.phi_ext.assign(phi_grid.begin(), phi_grid.end());
  map.i_in.assign(i_in_grid.begin(), i_in_grid.end());
  map.normal_resistance = normal_resistance;
  map.v_gate.assign(v_gate.begin(), v_gate.end());
  map.cells.reserve(phi_grid.size() * i_in_grid.size());
  for (double i : i_in_grid) {
    for (double phi : phi_grid) {
      const Membership mem = cs.classify(i, phi);
      map.cells.push_back(mem.superconducting ? CellState::Superconducting
                          : mem.gate_violated ? CellState::GateLimited
                                              : CellState::Normal);
    }
  }
  for (double phi : phi_grid) map.reentrant_column.push_back(cs.critical_current(phi).reentrant);
  return map;
}

EnvelopeStats envelope_stats(const InterferencePattern& pattern) {
  const double end = pattern.phi_lo + pattern.period;
  if (pattern.phi_hi < end - 1e-12 * pattern.period) {
    throw InputError("pattern spans less than one flux period");
  }
  EnvelopeStats st;
  st.max_ic = -std::numeric_limits<double>::infinity();
  st.min_ic = std::numeric_limits<double>::infinity();
  auto take = [&st](double v) {
    if (std::isnan(v)) return;
    st.max_ic = std::max(st.max_ic, v);
    st.min_ic = std::min(st.min_ic, v);
  };
  for (const auto& s : pattern.segments) {
    if (s.phi_lo > end || s.phi_hi < pattern.phi_lo) continue;
    if (s.zero_inductance) {
      take(s.i_lo);
      take(s.i_hi);
      continue;
    }
    take(s.at(std::max(s.phi_lo, pattern.phi_lo)));
    take(s.at(std::min(s.phi_hi, end)));
  }
  if (!std::isfinite(st.max_ic)) throw NumericalError("pattern has no finite critical current");
  st.modulation_depth = st.max_ic - st.min_ic;
  return st;
}

}  // namespace gsquid
