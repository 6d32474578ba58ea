#include "gsquid/oracle.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "gsquid/constraints.hpp"
#include "gsquid/errors.hpp"

namespace gsquid {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Half-width of the branch of θ + b·sin θ that is increasing around zero.
double central_half_width(double b) { return b > 1.0 ? std::acos(-1.0 / b) : kPi; }

class LobeSolver {
 public:
  LobeSolver(const TwoJunctionLoop& loop, int m, double phi_ext)
      : loop_(loop),
        m_(m),
        b1_(loop.beta1()),
        b2_(loop.beta2()),
        a1_(central_half_width(b1_)),
        a2_(central_half_width(b2_)),
        shift_(kTwoPi * (phi_ext / loop.phi0 - m)),
        g_(loop.phi0 / kTwoPi / (loop.l1 + loop.l2)) {}

  double a1() const { return a1_; }

  // θ₂ on its central branch satisfying the loop condition, if any.
  std::optional<double> theta2(double t1) const {
    const double r = t1 + b1_ * std::sin(t1) + shift_;
    auto g2 = [this, r](double t) { return t + b2_ * std::sin(t) - r; };
    const double lo = -a2_;
    const double hi = a2_;
    const double flo = g2(lo);
    const double fhi = g2(hi);
    if (!(flo < 0.0 && fhi > 0.0)) return std::nullopt;
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(
        g2, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
    if (iters >= 200) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "loop condition root not bracketed to precision at theta1 = " << t1 << ", m = " << m_;
      throw NonConvergenceError(msg.str());
    }
    return 0.5 * (root.first + root.second);
  }

  double current(double t1, double t2) const {
    return loop_.ic1 * std::sin(t1) + loop_.ic2 * std::sin(t2);
  }

  // Positive-definite Hessian of the loop energy at fixed bias current.
  bool stable(double t1, double t2) const {
    const double c1 = loop_.ic1 * std::cos(t1);
    const double c2 = loop_.ic2 * std::cos(t2);
    const double det = c1 * c2 + g_ * (c1 + c2);
    return c1 + g_ > 0.0 && det >= -1e-12 * (loop_.ic1 * loop_.ic2 + g_ * g_);
  }

  double residual(double t1, double t2) const {
    return std::abs(t1 - t2 + b1_ * std::sin(t1) - b2_ * std::sin(t2) + shift_);
  }

 private:
  const TwoJunctionLoop& loop_;
  int m_;
  double b1_, b2_, a1_, a2_, shift_, g_;
};

}  // namespace

double TwoJunctionLoop::beta1() const { return kTwoPi / phi0 * l1 * ic1; }
double TwoJunctionLoop::beta2() const { return kTwoPi / phi0 * l2 * ic2; }

TwoJunctionLoop TwoJunctionLoop::symmetric(double beta_l) {
  TwoJunctionLoop loop;
  loop.l1 = loop.l2 = beta_l / kTwoPi;
  return loop;
}

void require_valid(const TwoJunctionLoop& loop) {
  for (double v : {loop.l1, loop.l2, loop.ic1, loop.ic2, loop.phi0}) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw InputError("two-junction loop parameters must be positive and finite");
    }
  }
}

std::optional<LobeExtent> lobe_extent(const TwoJunctionLoop& loop, int m, double phi_ext,
                                      const OracleOptions& options) {
  require_valid(loop);
  if (options.grid < 3) throw InputError("oracle grid needs at least 3 points");
  const LobeSolver solver(loop, m, phi_ext);
  const int n = options.grid;
  const double a1 = solver.a1();
  auto theta1_at = [&](int k) { return -a1 + 2.0 * a1 * (k + 1) / (n + 1); };

  int k_max = -1;
  int k_min = -1;
  double i_max = -std::numeric_limits<double>::infinity();
  double i_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double t1 = theta1_at(k);
    const auto t2 = solver.theta2(t1);
    if (!t2 || !solver.stable(t1, *t2)) continue;
    const double i = solver.current(t1, *t2);
    if (i > i_max) {
      i_max = i;
      k_max = k;
    }
    if (i < i_min) {
      i_min = i;
      k_min = k;
    }
  }
  if (k_max < 0) return std::nullopt;

  // The extrema along the constraint curve sit where the Hessian turns
  // singular; polish them between neighbouring grid points.
  auto polish = [&](int k, double sign) {
    const double lo = theta1_at(std::max(k - 1, 0));
    const double hi = theta1_at(std::min(k + 1, n - 1));
    auto objective = [&](double t1) {
      const auto t2 = solver.theta2(t1);
      if (!t2) return std::numeric_limits<double>::max();
      return -sign * solver.current(t1, *t2);
    };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::brent_find_minima(objective, lo, hi, 52, iters);
    return r.first;
  };

  LobeExtent ext;
  double t1 = theta1_at(k_max);
  double t2 = *solver.theta2(t1);
  const double t1p = polish(k_max, 1.0);
  if (const auto t2p = solver.theta2(t1p); t2p && solver.current(t1p, *t2p) > i_max) {
    t1 = t1p;
    t2 = *t2p;
  }
  ext.upper = solver.current(t1, t2);
  ext.theta1_upper = t1;
  ext.theta2_upper = t2;
  ext.residual = solver.residual(t1, t2);

  ext.lower = i_min;
  const double s1 = polish(k_min, -1.0);
  if (const auto s2 = solver.theta2(s1)) ext.lower = std::min(ext.lower, solver.current(s1, *s2));
  return ext;
}

ExactResult exact_critical_current(const TwoJunctionLoop& loop, double phi_ext,
                                   const OracleOptions& options) {
  // Stable states need |θₖ| < π, so 2π|m − Φ/Φ₀| ≤ 2π + β₁ + β₂.
  const double centre = phi_ext / loop.phi0;
  const double reach = 1.0 + (loop.beta1() + loop.beta2()) / kTwoPi;
  const int m0 = static_cast<int>(std::lround(centre));
  const int m_lo = std::min(m0 - options.window, static_cast<int>(std::floor(centre - reach)));
  const int m_hi = std::max(m0 + options.window, static_cast<int>(std::ceil(centre + reach)));
  ExactResult best;
  bool found = false;
  for (int m = m_lo; m <= m_hi; ++m) {
    const auto ext = lobe_extent(loop, m, phi_ext, options);
    if (!ext) continue;
    if (!found || ext->upper > best.i_c) {
      found = true;
      best = {ext->upper, ext->theta1_upper, ext->theta2_upper, m, ext->residual};
    }
  }
  if (!found) {
    throw NumericalError("no stable phase configuration in the fluxon window at phi_ext = " +
                         std::to_string(phi_ext));
  }
  return best;
}

StabilityRegion stability_region(const TwoJunctionLoop& loop, int m, double phi_lo,
                                 double phi_hi, int n, const OracleOptions& options) {
  if (n < 2) throw InputError("stability region needs at least 2 flux samples");
  StabilityRegion region;
  region.m = m;
  for (int k = 0; k < n; ++k) {
    const double phi = k == n - 1 ? phi_hi : phi_lo + (phi_hi - phi_lo) * k / (n - 1);
    const auto ext = lobe_extent(loop, m, phi, options);
    region.phi_ext.push_back(phi);
    region.upper.push_back(ext ? ext->upper : kNaN);
    region.lower.push_back(ext ? ext->lower : kNaN);
  }
  return region;
}

DeviceConfig linearized_equivalent(const TwoJunctionLoop& loop) {
  require_valid(loop);
  DeviceConfig c;
  c.branches = {BranchSpec{1, loop.l1, loop.ic1, Cpr::Sinusoidal, 0, 1},
                BranchSpec{2, loop.l2, loop.ic2, Cpr::Sinusoidal, 1, 0}};
  c.input_node = 0;
  c.output_node = 1;
  c.theta0 = 0.0;
  c.phi0 = loop.phi0;
  c.units = loop.phi0 == 1.0 ? UnitsMode::Normalized : UnitsMode::SI;
  return c;
}

ComparisonReport compare_linearized(const TwoJunctionLoop& loop, std::span<const double> phi_ext,
                                    const OracleOptions& options) {
  const DeviceConfig lin = linearized_equivalent(loop);
  const ConstraintSet cs(lin, {}, options.window);
  ComparisonReport rep;
  double sum = 0.0;
  for (double phi : phi_ext) {
    const double exact = exact_critical_current(loop, phi, options).i_c;
    const double linear = cs.critical_current(phi).i_c;
    const double err = std::abs(exact - linear) / loop.ic1;
    rep.phi_ext.push_back(phi);
    rep.exact.push_back(exact);
    rep.linear.push_back(linear);
    rep.error.push_back(err);
    rep.max_error = std::max(rep.max_error, err);
    sum += err;
  }
  if (!phi_ext.empty()) rep.mean_error = sum / static_cast<double>(phi_ext.size());
  return rep;
}

}  // namespace gsquid
