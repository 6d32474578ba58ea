#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gsquid/circuit.hpp"

namespace gsquid {

enum class FitParam { L1, L2, L3, Istar1, Istar2, Istar3, Alpha, RGate, ROut, Theta0, IgStar };

std::string fit_param_name(FitParam p);
/// Inverse of fit_param_name; throws InputError on unknown names.
FitParam parse_fit_param(const std::string& name);

double get_param(const DeviceConfig& config, FitParam p);
void set_param(DeviceConfig& config, FitParam p, double value);

/// I_c(Φ_ext) measured at one set of gate voltages.
struct FitCurve {
  std::vector<double> v_gate;
  std::vector<double> phi_ext;
  std::vector<double> i_c;
};

struct FreeParam {
  FitParam param;
  double lower = 0.0;
  double upper = 0.0;
};

struct FitOptions {
  int starts = 8;
  std::uint64_t seed = 1;
  int max_iterations = 3000;
  double size_tolerance = 1e-6;  ///< simplex size in units of the bound box
  double initial_step = 0.1;     ///< in units of the bound box
  int window = 3;
  bool parallel = true;
};

struct FittedValue {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct FitResult {
  std::vector<FittedValue> parameters;
  DeviceConfig config;       ///< template with the fitted values applied
  double rms = 0.0;          ///< same unit as the data currents
  int iterations = 0;        ///< of the winning start
  int evaluations = 0;       ///< over all starts
  bool converged = false;
  int best_start = 0;
  int points_used = 0;       ///< data points not flagged re-entrant at the optimum
  std::vector<double> trace; ///< best objective after each iteration of the winning start
};

/// Root-mean-square model-minus-data residual at a given config. Points
/// where the model envelope is re-entrant are left out.
double fit_rms(const DeviceConfig& config, const std::vector<FitCurve>& data, int window = 3,
               int* points_used = nullptr);

/// Bounded derivative-free simplex fit with deterministic multi-start. Start
/// 0 is the template value clipped into the bounds, further starts are drawn
/// uniformly in the box from the seeded generator.
FitResult fit_parameters(const std::vector<FitCurve>& data, const DeviceConfig& config_template,
                         const std::vector<FreeParam>& free, const FitOptions& options = {});

}  // namespace gsquid
