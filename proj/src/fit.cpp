#include "gsquid/fit.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "gsquid/constraints.hpp"
#include "gsquid/errors.hpp"
#include "gsquid/linear_solver.hpp"

namespace gsquid {

namespace {

constexpr double kPenalty = 1e300;

GateSpec& first_gate(DeviceConfig& config, FitParam p) {
  if (config.gates.empty()) {
    throw InputError("fit parameter " + fit_param_name(p) + " needs a gate");
  }
  return config.gates.front();
}

BranchSpec& branch(DeviceConfig& config, std::size_t i, FitParam p) {
  if (config.branches.size() <= i) {
    throw InputError("fit parameter " + fit_param_name(p) + " refers to a missing branch");
  }
  return config.branches[i];
}

// Maps any real to [0, 1] by reflection, so the simplex can roam freely
// while the physical parameters stay inside their box.
double fold(double u) {
  const double y = std::fmod(std::abs(u), 2.0);
  return y > 1.0 ? 2.0 - y : y;
}

struct Problem {
  const std::vector<FitCurve>* data;
  const DeviceConfig* base;
  const std::vector<FreeParam>* free;
  int window;
  std::atomic<int>* evaluations;

  DeviceConfig config_at(const gsl_vector* u) const {
    DeviceConfig c = *base;
    for (std::size_t k = 0; k < free->size(); ++k) {
      const auto& fp = (*free)[k];
      set_param(c, fp.param, fp.lower + fold(gsl_vector_get(u, k)) * (fp.upper - fp.lower));
    }
    return c;
  }
};

double objective(const gsl_vector* u, void* params) {
  const auto* p = static_cast<const Problem*>(params);
  p->evaluations->fetch_add(1, std::memory_order_relaxed);
  try {
    const double r = fit_rms(p->config_at(u), *p->data, p->window);
    return std::isfinite(r) ? r : kPenalty;
  } catch (const std::exception&) {
    return kPenalty;
  }
}

struct StartOutcome {
  std::vector<double> u;
  double rms = kPenalty;
  double size = kPenalty;
  int iterations = 0;
  std::vector<double> trace;
};

StartOutcome run_start(const Problem& problem, const std::vector<double>& u0,
                       const FitOptions& options) {
  const std::size_t n = u0.size();
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t k = 0; k < n; ++k) {
    gsl_vector_set(x, k, u0[k]);
    gsl_vector_set(step, k, options.initial_step);
  }
  gsl_multimin_function fn{&objective, n, const_cast<Problem*>(&problem)};
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, step);

  StartOutcome out;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    out.iterations = it + 1;
    out.trace.push_back(gsl_multimin_fminimizer_minimum(s));
    out.size = gsl_multimin_fminimizer_size(s);
    if (out.size < options.size_tolerance) break;
  }
  out.rms = gsl_multimin_fminimizer_minimum(s);
  out.size = gsl_multimin_fminimizer_size(s);
  const gsl_vector* best = gsl_multimin_fminimizer_x(s);
  for (std::size_t k = 0; k < n; ++k) out.u.push_back(fold(gsl_vector_get(best, k)));

  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return out;
}

double flux_period(const DeviceConfig& config) {
  return config.phi0 / resolved_loops(config).front().flux_fraction;
}

void check_data(const std::vector<FitCurve>& data, const DeviceConfig& config) {
  if (data.empty()) throw InputError("fit needs at least one data curve");
  const double period = flux_period(config);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : data) {
    if (c.phi_ext.size() != c.i_c.size() || c.phi_ext.size() < 2) {
      throw InputError("each fit curve needs matching phi_ext/i_c columns with at least 2 rows");
    }
    const auto [pmin, pmax] = std::minmax_element(c.phi_ext.begin(), c.phi_ext.end());
    if (*pmax - *pmin < 2.0 * period * (1.0 - 1e-6)) {
      throw InputError("each fit curve must span at least two flux periods");
    }
    for (double v : c.i_c) {
      if (!std::isfinite(v)) throw InputError("fit data contains a non-finite current");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo <= 1e-12 * std::max(std::abs(hi), std::abs(lo))) {
    throw InputError("unidentifiable: the critical-current data is constant");
  }
}

}  // namespace

std::string fit_param_name(FitParam p) {
  switch (p) {
    case FitParam::L1: return "L1";
    case FitParam::L2: return "L2";
    case FitParam::L3: return "L3";
    case FitParam::Istar1: return "I1_star";
    case FitParam::Istar2: return "I2_star";
    case FitParam::Istar3: return "I3_star";
    case FitParam::Alpha: return "alpha";
    case FitParam::RGate: return "r_gate";
    case FitParam::ROut: return "r_out";
    case FitParam::Theta0: return "theta0";
    case FitParam::IgStar: return "ig_star";
  }
  return "?";
}

FitParam parse_fit_param(const std::string& name) {
  for (FitParam p : {FitParam::L1, FitParam::L2, FitParam::L3, FitParam::Istar1, FitParam::Istar2,
                     FitParam::Istar3, FitParam::Alpha, FitParam::RGate, FitParam::ROut,
                     FitParam::Theta0, FitParam::IgStar}) {
    if (fit_param_name(p) == name) return p;
  }
  throw InputError("unknown fit parameter '" + name + "'");
}

double get_param(const DeviceConfig& config, FitParam p) {
  DeviceConfig c = config;
  switch (p) {
    case FitParam::L1: return branch(c, 0, p).inductance;
    case FitParam::L2: return branch(c, 1, p).inductance;
    case FitParam::L3: return branch(c, 2, p).inductance;
    case FitParam::Istar1: return branch(c, 0, p).critical_current;
    case FitParam::Istar2: return branch(c, 1, p).critical_current;
    case FitParam::Istar3: return branch(c, 2, p).critical_current;
    case FitParam::Alpha: return first_gate(c, p).coupling_alpha;
    case FitParam::RGate: return first_gate(c, p).r_gate;
    case FitParam::ROut: return first_gate(c, p).r_out;
    case FitParam::IgStar: return first_gate(c, p).gate_threshold;
    case FitParam::Theta0: return resolve_theta0(config);
  }
  return 0.0;
}

void set_param(DeviceConfig& config, FitParam p, double value) {
  switch (p) {
    case FitParam::L1: branch(config, 0, p).inductance = value; break;
    case FitParam::L2: branch(config, 1, p).inductance = value; break;
    case FitParam::L3: branch(config, 2, p).inductance = value; break;
    case FitParam::Istar1: branch(config, 0, p).critical_current = value; break;
    case FitParam::Istar2: branch(config, 1, p).critical_current = value; break;
    case FitParam::Istar3: branch(config, 2, p).critical_current = value; break;
    case FitParam::Alpha: first_gate(config, p).coupling_alpha = value; break;
    case FitParam::RGate: first_gate(config, p).r_gate = value; break;
    case FitParam::ROut:
      first_gate(config, p);
      for (auto& g : config.gates) g.r_out = value;
      break;
    case FitParam::IgStar: first_gate(config, p).gate_threshold = value; break;
    case FitParam::Theta0: config.theta0 = value; break;
  }
}

double fit_rms(const DeviceConfig& config, const std::vector<FitCurve>& data, int window,
               int* points_used) {
  double sum = 0.0;
  int used = 0;
  for (const auto& curve : data) {
    const ConstraintSet cs(config, curve.v_gate, window);
    for (std::size_t k = 0; k < curve.phi_ext.size(); ++k) {
      const CriticalPoint cp = cs.critical_current(curve.phi_ext[k]);
      if (cp.reentrant) continue;
      const double model = std::isnan(cp.i_c) ? 0.0 : cp.i_c;
      const double d = model - curve.i_c[k];
      sum += d * d;
      ++used;
    }
  }
  if (points_used) *points_used = used;
  if (used == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(sum / used);
}

FitResult fit_parameters(const std::vector<FitCurve>& data, const DeviceConfig& config_template,
                         const std::vector<FreeParam>& free, const FitOptions& options) {
  require_valid(config_template);
  check_data(data, config_template);
  if (free.empty()) throw InputError("fit needs at least one free parameter");
  if (options.starts < 1) throw InputError("fit needs at least one start");
  for (const auto& fp : free) {
    if (!(std::isfinite(fp.lower) && std::isfinite(fp.upper) && fp.lower < fp.upper)) {
      throw InputError("bounds of " + fit_param_name(fp.param) + " must be finite with lower < upper");
    }
  }
  gsl_set_error_handler_off();

  // All start points are drawn up front so the result does not depend on
  // thread scheduling.
  std::vector<std::vector<double>> starts;
  std::vector<double> first;
  for (const auto& fp : free) {
    const double v = std::clamp(get_param(config_template, fp.param), fp.lower, fp.upper);
    first.push_back((v - fp.lower) / (fp.upper - fp.lower));
  }
  starts.push_back(first);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 1; s < options.starts; ++s) {
    std::vector<double> u;
    for (std::size_t k = 0; k < free.size(); ++k) u.push_back(unit(rng));
    starts.push_back(u);
  }

  std::atomic<int> evaluations{0};
  const Problem problem{&data, &config_template, &free, options.window, &evaluations};
  std::vector<StartOutcome> outcomes(starts.size());
  if (options.parallel && starts.size() > 1) {
    std::vector<std::thread> workers;
    for (std::size_t s = 0; s < starts.size(); ++s) {
      workers.emplace_back([&, s] { outcomes[s] = run_start(problem, starts[s], options); });
    }
    for (auto& w : workers) w.join();
  } else {
    for (std::size_t s = 0; s < starts.size(); ++s) outcomes[s] = run_start(problem, starts[s], options);
  }

  std::size_t best = 0;
  for (std::size_t s = 1; s < outcomes.size(); ++s) {
    if (outcomes[s].rms < outcomes[best].rms) best = s;
  }
  const StartOutcome& win = outcomes[best];

  FitResult result;
  result.config = config_template;
  for (std::size_t k = 0; k < free.size(); ++k) {
    const auto& fp = free[k];
    const double v = fp.lower + win.u[k] * (fp.upper - fp.lower);
    set_param(result.config, fp.param, v);
    result.parameters.push_back({fit_param_name(fp.param), v, fp.lower, fp.upper});
  }
  result.rms = fit_rms(result.config, data, options.window, &result.points_used);
  result.iterations = win.iterations;
  result.evaluations = evaluations.load();
  result.converged = win.size < options.size_tolerance;
  result.best_start = static_cast<int>(best);
  result.trace = win.trace;
  return result;
}

}  // namespace gsquid
