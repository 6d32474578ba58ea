#include "gsquid/analysis.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gsquid/errors.hpp"

namespace gsquid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const GateSpec& require_single_gate_device(const DeviceConfig& config, const char* what) {
  if (!config.single_gate_three_branch()) {
    throw InputError(std::string(what) + " needs the single-gate three-branch device");
  }
  return config.gates.front();
}

double total_inductance(const DeviceConfig& config) {
  double lt = 0.0;
  for (const auto& b : config.branches) lt += b.inductance;
  return lt;
}

// One period of a sampled curve, wrapped periodically for interpolation.
class PeriodicCurve {
 public:
  PeriodicCurve(const InterferencePattern& p) : start_(p.phi_lo), period_(p.period) {
    for (const auto& s : p.samples) {
      if (std::isnan(s.i_c)) continue;
      if (s.phi_ext < start_ || s.phi_ext > start_ + period_) continue;
      x_.push_back(s.phi_ext);
      y_.push_back(s.i_c);
    }
    if (x_.size() < 2) throw NumericalError("pattern has fewer than two finite samples in its first period");
  }

  double operator()(double phi) const {
    double u = std::fmod(phi - start_, period_);
    if (u < 0.0) u += period_;
    const double x = start_ + u;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    if (it == x_.begin()) return y_.front();
    if (it == x_.end()) {
      // Between the last sample and the first one of the next period.
      const double x0 = x_.back();
      const double x1 = x_.front() + period_;
      const double t = (x - x0) / (x1 - x0);
      return y_.back() + t * (y_.front() - y_.back());
    }
    const auto k = static_cast<std::size_t>(it - x_.begin());
    const double t = (x - x_[k - 1]) / (x_[k] - x_[k - 1]);
    return y_[k - 1] + t * (y_[k] - y_[k - 1]);
  }

 private:
  double start_, period_;
  std::vector<double> x_, y_;
};

}  // namespace

FluxShift phase_shift_predicted(const DeviceConfig& config, double v_gate) {
  const GateSpec& g = require_single_gate_device(config, "phase shift prediction");
  const double flux = -config.branches[1].inductance * v_gate / (g.r_gate + g.r_out);
  return {flux, kTwoPi / config.phi0 * flux};
}

FluxShift phase_shift_measured(const InterferencePattern& a, const InterferencePattern& b) {
  if (std::abs(a.period - b.period) > 1e-9 * std::abs(a.period)) {
    throw InputError("patterns have different flux periods");
  }
  const double period = a.period;
  for (const auto* p : {&a, &b}) {
    if (p->phi_hi - p->phi_lo < period * (1.0 - 1e-12)) {
      throw InputError("pattern spans less than one flux period");
    }
  }
  const PeriodicCurve ref(a);
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : b.samples) {
    if (std::isnan(s.i_c) || s.phi_ext >= b.phi_lo + period) continue;
    pts.emplace_back(s.phi_ext, s.i_c);
  }
  if (pts.size() < 2) throw NumericalError("pattern has fewer than two finite samples in its first period");
  auto cost = [&](double delta) {
    double sum = 0.0;
    for (const auto& [phi, ic] : pts) {
      const double d = ic - ref(phi - delta);
      sum += d * d;
    }
    return sum / static_cast<double>(pts.size());
  };

  const int steps = 400;
  const double h = period / steps;
  double best = -0.5 * period;
  double best_cost = kInf;
  for (int k = 0; k < steps; ++k) {
    const double delta = -0.5 * period + k * h;
    const double c = cost(delta);
    if (c < best_cost) {
      best_cost = c;
      best = delta;
    }
  }
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(cost, best - h, best + h, 52, iters);
  double delta = r.second <= best_cost ? r.first : best;
  delta -= period * std::round(delta / period);
  if (delta <= -0.5 * period) delta += period;
  return {delta, kTwoPi / a.phi0 * delta};
}

double amplitude_shift_predicted(const DeviceConfig& config, double v_gate) {
  const GateSpec& g = require_single_gate_device(config, "amplitude shift prediction");
  const double alpha = g.coupling_alpha;
  const double ar = alpha * g.resistance_ratio();
  if (std::abs(1.0 - ar) <= 1e-12) {
    throw NumericalError("amplitude shift is singular at alpha * r = 1");
  }
  return (v_gate / g.r_gate) * (1.0 + alpha) / (1.0 - ar);
}

double envelope_max_closed(const DeviceConfig& config, double v_gate) {
  const GateSpec& g = require_single_gate_device(config, "envelope maximum");
  const double alpha = g.coupling_alpha;
  const double rs = g.r_gate + g.r_out;
  const double den = alpha * g.r_out - g.r_gate;
  if (den == 0.0) throw NumericalError("envelope maximum is singular at alpha * r = 1");
  return ((1.0 + alpha) * v_gate - 2.0 * rs * config.branches[0].critical_current) / den;
}

double envelope_min_closed(const DeviceConfig& config, double v_gate) {
  const GateSpec& g = require_single_gate_device(config, "envelope minimum");
  const double rs = g.r_gate + g.r_out;
  const double den = total_inductance(config) * (g.r_gate - g.coupling_alpha * g.r_out);
  return envelope_max_closed(config, v_gate) - rs * config.phi0 / den;
}

EffectiveInductance effective_inductance(const InterferencePattern& pattern, double phi,
                                         double epsilon) {
  if (pattern.segments.empty()) throw InputError("pattern has no segments");
  const double steep = pattern.current_scale / (epsilon * pattern.phi0);
  const double tol = 1e-12 * pattern.period;
  auto inverse = [](double slope) { return slope == 0.0 ? kInf : 1.0 / slope; };

  EffectiveInductance out;
  const PatternSegment* left = nullptr;
  const PatternSegment* right = nullptr;
  for (const auto& s : pattern.segments) {
    if (s.zero_inductance) {
      if (std::abs(s.phi_lo - phi) <= tol) {
        out.at_vertex = true;
        out.zero_inductance = true;
      }
      continue;
    }
    if (s.phi_lo - tol <= phi && phi <= s.phi_hi + tol) {
      if (std::abs(s.phi_hi - phi) <= tol && phi > s.phi_lo + tol) {
        left = &s;
      } else if (std::abs(s.phi_lo - phi) <= tol && phi < s.phi_hi - tol) {
        right = &s;
      } else {
        left = right = &s;
      }
    }
  }
  if (!left && !right) throw InputError("flux value lies outside the pattern");
  if (!left) left = right;
  if (!right) right = left;
  if (left != right) out.at_vertex = true;
  out.left = inverse(left->slope);
  out.right = inverse(right->slope);
  if (std::abs(left->slope) > steep || std::abs(right->slope) > steep) out.zero_inductance = true;
  if (out.zero_inductance) {
    if (std::abs(left->slope) > steep) out.left = 0.0;
    if (std::abs(right->slope) > steep) out.right = 0.0;
  }
  return out;
}

AlphaStar alpha_star(const DeviceConfig& config) {
  const GateSpec& g = require_single_gate_device(config, "zero-inductance coupling");
  const double r = g.resistance_ratio();
  const double lt = total_inductance(config);
  if (!(r > 0.0) || !(lt > 0.0)) throw InputError("zero-inductance coupling needs r > 0 and L_tot > 0");
  AlphaStar a;
  a.raw = (config.branches[2].inductance / r - config.branches[0].inductance) / lt;
  a.value = a.raw;
  if (a.raw < 0.0) {
    a.value = 0.0;
    a.clamped = true;
    a.physical = false;
  }
  return a;
}

double zero_inductance_residual(const DeviceConfig& config, double alpha) {
  const GateSpec& g = require_single_gate_device(config, "zero-inductance residual");
  const double l1 = config.branches[0].inductance;
  const double l3 = config.branches[2].inductance;
  return l3 - (l1 + alpha * total_inductance(config)) * g.resistance_ratio();
}

}  // namespace gsquid
