#include "gsquid/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsquid/errors.hpp"

namespace gsquid {

std::string constraint_label(int constraint) {
  if (constraint > 0) return std::to_string(constraint);
  if (constraint < 0) return "gate";
  return "none";
}

ConstraintSet::ConstraintSet(const DeviceConfig& config, std::span<const double> v_gate, int window)
    : window_(window) {
  if (window < 0) throw InputError("m search window must be non-negative");
  const auto loops = resolved_loops(config);
  if (loops.size() != 1) {
    throw InputError("critical-current analysis needs a single-loop network, config has " +
                     std::to_string(loops.size()) + " loops");
  }
  theta0_ = resolve_theta0(config);
  phi0_ = config.phi0;
  fraction_ = loops[0].flux_fraction;
  has_gates_ = !config.gates.empty();

  const AffineCurrents aff = affine_currents(config, v_gate);
  for (int id : loops[0].branches) {
    const auto& b = config.branches[static_cast<std::size_t>(std::abs(id) - 1)];
    flux_reach_ += b.inductance * b.critical_current;
  }

  struct Coupling {
    double alpha, g_in, g_base;
  };
  scale_ = 0.0;
  for (std::size_t i = 0; i < config.branches.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    const double threshold = config.branches[i].critical_current;
    scale_ = std::max(scale_, threshold);

    std::vector<Coupling> coupled;
    for (std::size_t g = 0; g < config.gates.size(); ++g) {
      const double alpha = config.gates[g].coupling_alpha;
      if (alpha <= 0.0) continue;
      const auto ids = coupled_branches(config, g);
      if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
        coupled.push_back({alpha, aff.gate_in[g], aff.gate_base[g]});
      }
    }

    // s·Iᵢ + Σ α_k t_k I_gk < Iᵢ* for every choice of signs s, t_k.
    const std::size_t combos = std::size_t{1} << coupled.size();
    for (double s : {1.0, -1.0}) {
      for (std::size_t mask = 0; mask < combos; ++mask) {
        HalfPlane p;
        p.constraint = id;
        p.a = s * aff.branch_in[i];
        p.c = s * aff.branch_flux[i];
        p.d = threshold - s * aff.branch_base[i];
        double magnitude = std::abs(aff.branch_in[i]);
        for (std::size_t k = 0; k < coupled.size(); ++k) {
          const double t = (mask >> k) & 1U ? -1.0 : 1.0;
          p.a += coupled[k].alpha * t * coupled[k].g_in;
          p.d -= coupled[k].alpha * t * coupled[k].g_base;
          magnitude += coupled[k].alpha * std::abs(coupled[k].g_in);
        }
        p.vertical = std::abs(p.a) <= 1e-12 * magnitude;
        if (p.vertical) p.a = 0.0;
        planes_.push_back(p);
      }
    }
  }

  for (std::size_t g = 0; g < config.gates.size(); ++g) {
    const double limit = config.gates[g].gate_threshold;
    const int id = -static_cast<int>(g) - 1;
    planes_.push_back({aff.gate_in[g], 0.0, limit - aff.gate_base[g], id, aff.gate_in[g] == 0.0});
    planes_.push_back({-aff.gate_in[g], 0.0, limit + aff.gate_base[g], id, aff.gate_in[g] == 0.0});
  }
  if (scale_ <= 0.0) scale_ = 1.0;
}

double ConstraintSet::flux_term(double phi_ext, int m) const {
  return (m + theta0_ / kTwoPi) * phi0_ - fraction_ * phi_ext;
}

int ConstraintSet::window_center(double phi_ext) const {
  return static_cast<int>(std::lround(fraction_ * phi_ext / phi0_ - theta0_ / kTwoPi));
}

std::pair<int, int> ConstraintSet::m_range(double phi_ext) const {
  const int m0 = window_center(phi_ext);
  const double centre = fraction_ * phi_ext / phi0_ - theta0_ / kTwoPi;
  const double reach = flux_reach_ / phi0_;
  const int lo = static_cast<int>(std::floor(centre - reach));
  const int hi = static_cast<int>(std::ceil(centre + reach));
  return {std::min(m0 - window_, lo), std::max(m0 + window_, hi)};
}

FeasibleInterval ConstraintSet::interval(double flux) const { return interval_impl(flux, true); }

FeasibleInterval ConstraintSet::branch_interval(double flux) const { return interval_impl(flux, false); }

FeasibleInterval ConstraintSet::interval_impl(double flux, bool with_gates) const {
  FeasibleInterval iv;
  iv.lo = -std::numeric_limits<double>::infinity();
  iv.hi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < planes_.size(); ++k) {
    const HalfPlane& p = planes_[k];
    if (!with_gates && p.constraint < 0) continue;
    const double rhs = p.d - p.c * flux;
    if (p.vertical) {
      if (!(0.0 < rhs)) {
        iv.empty = true;
        iv.lo_plane = iv.hi_plane = static_cast<int>(k);
        return iv;
      }
      continue;
    }
    const double bound = rhs / p.a;
    if (p.a > 0.0) {
      if (bound < iv.hi) {
        iv.hi = bound;
        iv.hi_plane = static_cast<int>(k);
      }
    } else if (bound > iv.lo) {
      iv.lo = bound;
      iv.lo_plane = static_cast<int>(k);
    }
  }
  iv.empty = !(iv.lo < iv.hi);
  return iv;
}

Interval ConstraintSet::gate_window() const {
  Interval w{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto& p : planes_) {
    if (p.constraint >= 0 || p.vertical) continue;
    const double bound = p.d / p.a;
    if (p.a > 0.0) {
      w.hi = std::min(w.hi, bound);
    } else {
      w.lo = std::max(w.lo, bound);
    }
  }
  return w;
}

CriticalPoint ConstraintSet::critical_current(double phi_ext) const {
  const auto [m_lo, m_hi] = m_range(phi_ext);
  CriticalPoint best;
  bool found = false;
  std::vector<std::pair<double, double>> pieces;
  for (int m = m_lo; m <= m_hi; ++m) {
    const FeasibleInterval iv = interval(flux_term(phi_ext, m));
    if (iv.empty) continue;
    pieces.emplace_back(iv.lo, iv.hi);
    if (!found || iv.hi > best.i_c) {
      found = true;
      best.i_c = iv.hi;
      best.m = m;
      best.plane = iv.hi_plane;
      best.constraint = iv.hi_plane >= 0 ? planes_[static_cast<std::size_t>(iv.hi_plane)].constraint : 0;
      best.label = constraint_label(best.constraint);
    }
  }
  if (!found) {
    // Nothing is superconducting. Blame the gate when the branches alone
    // would allow a state; otherwise there is no critical current at all.
    best.m = window_center(phi_ext);
    best.i_c = std::numeric_limits<double>::quiet_NaN();
    best.label = "none";
    if (has_gates_) {
      for (int m = m_lo; m <= m_hi; ++m) {
        if (!branch_interval(flux_term(phi_ext, m)).empty) {
          best.i_c = gate_window().hi;
          best.constraint = -1;
          best.label = "gate";
          break;
        }
      }
    }
    return best;
  }

  std::sort(pieces.begin(), pieces.end());
  const double tol = kTieTolerance * scale_;
  double reach = pieces.front().second;
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    if (pieces[k].first > reach + tol && pieces[k].first > 0.0) {
      best.reentrant = true;
      break;
    }
    reach = std::max(reach, pieces[k].second);
  }
  return best;
}

Membership ConstraintSet::classify(double i_in, double phi_ext) const {
  Membership out;
  const double tol = kTieTolerance * scale_;
  for (const auto& p : planes_) {
    if (p.constraint < 0 && !(p.a * i_in < p.d - tol)) out.gate_violated = true;
  }
  if (out.gate_violated) return out;
  const auto [m_lo, m_hi] = m_range(phi_ext);
  for (int m = m_lo; m <= m_hi; ++m) {
    const double flux = flux_term(phi_ext, m);
    const bool ok = std::all_of(planes_.begin(), planes_.end(), [&](const HalfPlane& p) {
      return p.a * i_in + p.c * flux < p.d - tol;
    });
    if (ok) {
      out.superconducting = true;
      out.m = m;
      return out;
    }
  }
  return out;
}

CriticalPoint critical_current(const DeviceConfig& config, double phi_ext,
                               std::span<const double> v_gate, int window) {
  return ConstraintSet(config, v_gate, window).critical_current(phi_ext);
}

CriticalPoint critical_current(const DeviceConfig& config, double phi_ext, double v_gate,
                               int window) {
  const double v[1] = {v_gate};
  return critical_current(config, phi_ext, std::span<const double>(v, config.gates.empty() ? 0 : 1),
                          window);
}

Membership is_superconducting(const DeviceConfig& config, const Drive& drive, int window) {
  return ConstraintSet(config, drive.v_gate, window).classify(drive.i_in, drive.phi_ext);
}

}  // namespace gsquid
