#include "gsquid/cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gsquid/analysis.hpp"
#include "gsquid/config_io.hpp"
#include "gsquid/errors.hpp"
#include "gsquid/fit.hpp"
#include "gsquid/oracle.hpp"
#include "gsquid/pattern.hpp"
#include "gsquid/plot.hpp"

namespace gsquid {

namespace {

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

DeviceConfig load_valid_config(const RunSpec& spec) {
  if (spec.config_path.empty()) throw InputError("--config is required for '" + spec.command + "'");
  DeviceConfig c = read_config(spec.config_path);
  require_valid(c);
  return c;
}

std::vector<double> gate_voltages(const RunSpec& spec, const DeviceConfig& config) {
  if (spec.v_gate.size() > config.gates.size()) {
    throw InputError(fmt::format("{} gate voltages given for {} gates", spec.v_gate.size(), config.gates.size()));
  }
  std::vector<double> v(config.gates.size(), 0.0);
  for (std::size_t k = 0; k < spec.v_gate.size(); ++k) v[k] = parse_quantity(spec.v_gate[k], Dimension::Voltage);
  return v;
}

void check_axis(const RunSpec& spec) {
  if (spec.phi_count < 2) throw InputError("--phi-count must be at least 2");
  if (!(spec.phi_start < spec.phi_stop)) throw InputError("--phi-start must be below --phi-stop");
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(k == n - 1 ? b : a + (b - a) * k / (n - 1));
  return v;
}

int cmd_validate(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.config_path.empty()) throw InputError("--config is required for 'validate'");
  const DeviceConfig c = read_config(spec.config_path);
  const auto violations = validate_device(c);
  if (!violations.empty()) {
    for (const auto& v : violations) err << v.field << ": " << v.message << "\n";
    return kExitInput;
  }
  out << "valid " << config_digest(c) << "\n";
  return kExitOk;
}

int cmd_sweep(const RunSpec& spec, std::ostream& out) {
  check_axis(spec);
  const DeviceConfig c = load_valid_config(spec);
  const auto v = gate_voltages(spec, c);
  const auto pat = sweep_pattern(c, spec.phi_start * c.phi0, spec.phi_stop * c.phi0, spec.phi_count, v,
                                 SweepOptions{spec.window});
  emit(spec.out, pattern_csv(pat), out);
  if (!spec.vertices_out.empty()) write_text(spec.vertices_out, vertices_csv(pat));
  if (!spec.svg_out.empty()) write_text(spec.svg_out, pattern_svg(pat, "critical current"));
  return kExitOk;
}

int cmd_map(const RunSpec& spec, std::ostream& out) {
  check_axis(spec);
  if (spec.i_count < 2) throw InputError("--i-count must be at least 2");
  const DeviceConfig c = load_valid_config(spec);
  const auto v = gate_voltages(spec, c);
  const auto phi = linspace(spec.phi_start * c.phi0, spec.phi_stop * c.phi0, spec.phi_count);

  double i_lo = spec.i_start.empty() ? 0.0 : parse_quantity(spec.i_start, Dimension::Current);
  double i_hi = 0.0;
  if (spec.i_stop.empty()) {
    const ConstraintSet cs(c, v, spec.window);
    for (double p : phi) {
      const double ic = cs.critical_current(p).i_c;
      if (std::isfinite(ic)) i_hi = std::max(i_hi, ic);
    }
    i_hi = i_hi > 0.0 ? 1.2 * i_hi : 1.0;
  } else {
    i_hi = parse_quantity(spec.i_stop, Dimension::Current);
  }
  if (!(i_lo < i_hi)) throw InputError("--i-start must be below --i-stop");
  const auto currents = linspace(i_lo, i_hi, spec.i_count);
  std::optional<double> rn;
  if (!spec.normal_resistance.empty()) rn = parse_quantity(spec.normal_resistance, Dimension::Resistance);

  const RegionMap map = region_map(c, phi, currents, v, rn, spec.window);
  emit(spec.out, region_map_csv(map), out);
  if (!spec.svg_out.empty()) write_text(spec.svg_out, region_map_svg(map, c.phi0, "superconducting region"));
  return kExitOk;
}

int cmd_oracle(const RunSpec& spec, std::ostream& out) {
  check_axis(spec);
  TwoJunctionLoop loop = TwoJunctionLoop::symmetric(spec.beta);
  if (spec.l1) loop.l1 = *spec.l1;
  if (spec.l2) loop.l2 = *spec.l2;
  if (spec.ic1) loop.ic1 = *spec.ic1;
  if (spec.ic2) loop.ic2 = *spec.ic2;
  require_valid(loop);
  OracleOptions opts;
  opts.window = spec.window;

  const auto phi = linspace(spec.phi_start, spec.phi_stop, spec.phi_count);
  const ComparisonReport rep = compare_linearized(loop, phi, opts);
  emit(spec.out, comparison_csv(rep), out);

  if (!spec.lobes_out.empty() || !spec.svg_out.empty()) {
    std::vector<StabilityRegion> lobes;
    const int m_lo = static_cast<int>(std::floor(spec.phi_start)) - 1;
    const int m_hi = static_cast<int>(std::ceil(spec.phi_stop)) + 1;
    for (int m = m_lo; m <= m_hi; ++m) {
      lobes.push_back(stability_region(loop, m, spec.phi_start, spec.phi_stop, spec.phi_count, opts));
    }
    if (!spec.lobes_out.empty()) write_text(spec.lobes_out, lobes_csv(lobes));
    if (!spec.svg_out.empty()) {
      write_text(spec.svg_out, oracle_svg(rep, lobes, loop.phi0,
                                          fmt::format("exact vs linearized, beta_L = {:.3g}", loop.beta1())));
    }
  }
  if (!spec.report_out.empty()) write_text(spec.report_out, oracle_report_json(loop, rep));
  return kExitOk;
}

Dimension param_dimension(FitParam p) {
  switch (p) {
    case FitParam::L1:
    case FitParam::L2:
    case FitParam::L3: return Dimension::Inductance;
    case FitParam::Istar1:
    case FitParam::Istar2:
    case FitParam::Istar3:
    case FitParam::IgStar: return Dimension::Current;
    case FitParam::RGate:
    case FitParam::ROut: return Dimension::Resistance;
    case FitParam::Theta0: return Dimension::Angle;
    case FitParam::Alpha: return Dimension::Dimensionless;
  }
  return Dimension::Dimensionless;
}

int cmd_fit(const RunSpec& spec, std::ostream& out) {
  const DeviceConfig c = load_valid_config(spec);
  if (spec.data_path.empty()) throw InputError("--data is required for 'fit'");
  const auto data = read_fit_csv(spec.data_path);
  std::vector<FreeParam> free;
  for (const auto& item : spec.free) {
    const auto a = item.find(':');
    const auto b = item.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) {
      throw InputError("--free expects name:lower:upper, got '" + item + "'");
    }
    const FitParam p = parse_fit_param(item.substr(0, a));
    const Dimension d = param_dimension(p);
    free.push_back({p, parse_quantity(item.substr(a + 1, b - a - 1), d), parse_quantity(item.substr(b + 1), d)});
  }
  FitOptions opts;
  opts.starts = spec.starts;
  opts.seed = spec.seed;
  opts.window = spec.window;
  const FitResult r = fit_parameters(data, c, free, opts);
  emit(spec.out, fit_report_json(r), out);
  if (!spec.config_out.empty()) write_text(spec.config_out, config_to_json(r.config));
  return kExitOk;
}

int cmd_shift(const RunSpec& spec, std::ostream& out) {
  check_axis(spec);
  const DeviceConfig c = load_valid_config(spec);
  if (c.gates.size() != 1) throw InputError("'shift' needs a single-gate device");
  if (spec.v_gate.size() < 2) throw InputError("'shift' needs at least two --vg values");
  std::vector<double> volts;
  for (const auto& s : spec.v_gate) volts.push_back(parse_quantity(s, Dimension::Voltage));

  const double lo = spec.phi_start * c.phi0;
  const double hi = spec.phi_stop * c.phi0;
  const SweepOptions so{spec.window};
  const auto ref = sweep_pattern(c, lo, hi, spec.phi_count, volts.front(), so);
  const FluxShift ref_pred = phase_shift_predicted(c, volts.front());
  std::vector<ShiftRow> rows;
  for (std::size_t k = 1; k < volts.size(); ++k) {
    const auto pat = sweep_pattern(c, lo, hi, spec.phi_count, volts[k], so);
    const FluxShift p = phase_shift_predicted(c, volts[k]);
    rows.push_back({volts[k], {p.flux - ref_pred.flux, p.radians - ref_pred.radians}, phase_shift_measured(ref, pat)});
  }
  emit(spec.out, shift_report_json(c, volts.front(), rows), out);
  return kExitOk;
}

int cmd_alpha(const RunSpec& spec, std::ostream& out) {
  const DeviceConfig c = load_valid_config(spec);
  emit(spec.out, alpha_report_json(c, alpha_star(c)), out);
  return kExitOk;
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (spec.command == "validate") return cmd_validate(spec, out, err);
    if (spec.command == "sweep") return cmd_sweep(spec, out);
    if (spec.command == "map") return cmd_map(spec, out);
    if (spec.command == "oracle") return cmd_oracle(spec, out);
    if (spec.command == "fit") return cmd_fit(spec, out);
    if (spec.command == "shift") return cmd_shift(spec, out);
    if (spec.command == "alpha") return cmd_alpha(spec, out);
    err << "error: unknown command '" << spec.command << "'\n";
    return kExitInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Linearized model of gated multi-terminal DC-SQUIDs"};
  app.require_subcommand(1);
  RunSpec spec;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", spec.config_path, "device config (JSON)")->required();
  };
  auto add_phi = [&](CLI::App* sub) {
    sub->add_option("--phi-start", spec.phi_start, "first flux value, in units of Phi0");
    sub->add_option("--phi-stop", spec.phi_stop, "last flux value, in units of Phi0");
    sub->add_option("--phi-count", spec.phi_count, "number of flux samples");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-o,--out", spec.out, "output file (stdout when omitted)");
    sub->add_option("--window", spec.window, "fluxon search half-width");
  };

  auto* validate = app.add_subcommand("validate", "check a device config");
  add_config(validate);

  auto* sweep = app.add_subcommand("sweep", "critical current versus flux");
  add_config(sweep);
  add_phi(sweep);
  add_common(sweep);
  sweep->add_option("--vg", spec.v_gate, "gate voltage per gate, e.g. 5mV");
  sweep->add_option("--vertices", spec.vertices_out, "vertex CSV");
  sweep->add_option("--svg", spec.svg_out, "plot file");

  auto* map = app.add_subcommand("map", "superconducting/normal map over flux and input current");
  add_config(map);
  add_phi(map);
  add_common(map);
  map->add_option("--vg", spec.v_gate, "gate voltage per gate");
  map->add_option("--i-start", spec.i_start, "first input current");
  map->add_option("--i-stop", spec.i_stop, "last input current");
  map->add_option("--i-count", spec.i_count, "number of current samples");
  map->add_option("--rn", spec.normal_resistance, "normal-state display resistance");
  map->add_option("--svg", spec.svg_out, "plot file");

  auto* oracle = app.add_subcommand("oracle", "exact two-junction loop against the linearized model");
  add_phi(oracle);
  add_common(oracle);
  oracle->add_option("--beta", spec.beta, "beta_L of each arm of a symmetric loop");
  oracle->add_option("--l1", spec.l1, "normalized L1");
  oracle->add_option("--l2", spec.l2, "normalized L2");
  oracle->add_option("--ic1", spec.ic1, "normalized I1c");
  oracle->add_option("--ic2", spec.ic2, "normalized I2c");
  oracle->add_option("--lobes", spec.lobes_out, "per-m lobe CSV");
  oracle->add_option("--svg", spec.svg_out, "plot file");
  oracle->add_option("--report", spec.report_out, "JSON summary");

  auto* fit = app.add_subcommand("fit", "fit model parameters to I_c(phi) data");
  add_config(fit);
  add_common(fit);
  fit->add_option("--data", spec.data_path, "CSV with phi_ext,i_c[,v_g]")->required();
  fit->add_option("--free", spec.free, "free parameter as name:lower:upper")->required();
  fit->add_option("--starts", spec.starts, "number of simplex starts");
  fit->add_option("--seed", spec.seed, "seed for the start points");
  fit->add_option("--config-out", spec.config_out, "write the fitted config");

  auto* shift = app.add_subcommand("shift", "predicted and measured pattern shifts");
  add_config(shift);
  add_phi(shift);
  add_common(shift);
  shift->add_option("--vg", spec.v_gate, "gate voltages; the first is the reference")->required();

  auto* alpha = app.add_subcommand("alpha", "coupling at which the envelope turns vertical");
  add_config(alpha);
  add_common(alpha);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  for (auto* sub : app.get_subcommands()) spec.command = sub->get_name();
  return run(spec, std::cout, std::cerr);
}

}  // namespace gsquid
