#include "gsquid/config_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gsquid/errors.hpp"
#include "json.hpp"

namespace gsquid {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : obj.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) == keys.end()) {
      throw InputError(where + ": unknown key '" + k + "'");
    }
  }
}

double quantity(const json& v, const std::string& field, Dimension dim) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_quantity(v.get<std::string>(), dim);
    } catch (const InputError& e) {
      throw InputError(field + ": " + e.what());
    }
  }
  throw InputError(field + ": expected a number or a quantity string");
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw InputError(field + ": expected an integer");
  return v.get<int>();
}

const json& required(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + "." + key + ": missing required field");
  return *it;
}

std::optional<double> theta0_value(const json& v, const std::string& field) {
  if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
  return quantity(v, field, Dimension::Angle);
}

json theta0_json(const std::optional<double>& t) { return t ? json(*t) : json("auto"); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

DeviceConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed config JSON: ") + e.what());
  }
  if (!root.is_object()) throw InputError("config: top level must be an object");
  reject_unknown(root, "config",
                 {"units", "phi0", "theta0", "branches", "gates", "loops", "input_node", "output_node"});

  DeviceConfig c;
  if (const auto it = root.find("units"); it != root.end()) {
    const std::string u = it->is_string() ? it->get<std::string>() : "";
    if (u == "si" || u == "SI") {
      c.units = UnitsMode::SI;
    } else if (u == "normalized") {
      c.units = UnitsMode::Normalized;
    } else {
      throw InputError("units: expected \"si\" or \"normalized\"");
    }
  }
  c.phi0 = c.units == UnitsMode::Normalized ? 1.0 : kFluxQuantum;
  if (const auto it = root.find("phi0"); it != root.end()) {
    c.phi0 = quantity(*it, "phi0", Dimension::Flux);
  }
  if (const auto it = root.find("theta0"); it != root.end()) c.theta0 = theta0_value(*it, "theta0");

  const json& branches = required(root, "branches", "config");
  if (!branches.is_array()) throw InputError("branches: expected an array");
  const int n = static_cast<int>(branches.size());
  for (int i = 0; i < n; ++i) {
    const json& b = branches[static_cast<std::size_t>(i)];
    const std::string where = fmt::format("branches[{}]", i);
    if (!b.is_object()) throw InputError(where + ": expected an object");
    reject_unknown(b, where, {"L", "I_star", "from", "to", "cpr"});
    BranchSpec spec;
    spec.index = i + 1;
    spec.inductance = quantity(required(b, "L", where), where + ".L", Dimension::Inductance);
    spec.critical_current = quantity(required(b, "I_star", where), where + ".I_star", Dimension::Current);
    spec.from_node = b.contains("from") ? integer(b["from"], where + ".from") : i;
    spec.to_node = b.contains("to") ? integer(b["to"], where + ".to") : (n > 0 ? (i + 1) % n : 0);
    if (b.contains("cpr") && b["cpr"] != "sinusoidal") {
      throw InputError(where + ".cpr: only \"sinusoidal\" is supported");
    }
    c.branches.push_back(spec);
  }
  c.input_node = root.contains("input_node") ? integer(root["input_node"], "input_node") : 0;
  c.output_node =
      root.contains("output_node") ? integer(root["output_node"], "output_node") : std::max(n - 1, 0);

  if (const auto it = root.find("gates"); it != root.end()) {
    if (!it->is_array()) throw InputError("gates: expected an array");
    for (std::size_t g = 0; g < it->size(); ++g) {
      const json& j = (*it)[g];
      const std::string where = fmt::format("gates[{}]", g);
      if (!j.is_object()) throw InputError(where + ": expected an object");
      reject_unknown(j, where, {"node", "r_gate", "r_out", "ig_star", "alpha", "width_ratio", "couples"});
      GateSpec spec;
      spec.node = j.contains("node") ? integer(j["node"], where + ".node") : 1;
      spec.r_gate = quantity(required(j, "r_gate", where), where + ".r_gate", Dimension::Resistance);
      spec.r_out = quantity(required(j, "r_out", where), where + ".r_out", Dimension::Resistance);
      spec.gate_threshold = quantity(required(j, "ig_star", where), where + ".ig_star", Dimension::Current);
      if (j.contains("alpha")) spec.coupling_alpha = quantity(j["alpha"], where + ".alpha", Dimension::Dimensionless);
      if (j.contains("width_ratio")) {
        spec.width_ratio = quantity(j["width_ratio"], where + ".width_ratio", Dimension::Dimensionless);
      }
      if (j.contains("couples")) {
        if (!j["couples"].is_array()) throw InputError(where + ".couples: expected an array");
        for (const auto& id : j["couples"]) spec.coupled_branches.push_back(integer(id, where + ".couples"));
      }
      c.gates.push_back(spec);
    }
  }

  if (const auto it = root.find("loops"); it != root.end()) {
    if (!it->is_array()) throw InputError("loops: expected an array");
    for (std::size_t l = 0; l < it->size(); ++l) {
      const json& j = (*it)[l];
      const std::string where = fmt::format("loops[{}]", l);
      if (!j.is_object()) throw InputError(where + ": expected an object");
      reject_unknown(j, where, {"branches", "flux_fraction", "theta0"});
      LoopSpec spec;
      const json& ids = required(j, "branches", where);
      if (!ids.is_array()) throw InputError(where + ".branches: expected an array");
      for (const auto& id : ids) spec.branches.push_back(integer(id, where + ".branches"));
      if (j.contains("flux_fraction")) {
        spec.flux_fraction = quantity(j["flux_fraction"], where + ".flux_fraction", Dimension::Dimensionless);
      }
      if (j.contains("theta0")) spec.theta0 = theta0_value(j["theta0"], where + ".theta0");
      c.loops.push_back(spec);
    }
  }
  return c;
}

DeviceConfig read_config(const std::filesystem::path& path) { return parse_config(read_text(path)); }

std::string config_to_json(const DeviceConfig& c) {
  json root;
  root["units"] = c.units == UnitsMode::SI ? "si" : "normalized";
  root["phi0"] = c.phi0;
  root["theta0"] = theta0_json(c.theta0);
  root["input_node"] = c.input_node;
  root["output_node"] = c.output_node;
  root["branches"] = json::array();
  for (const auto& b : c.branches) {
    root["branches"].push_back({{"L", b.inductance},
                                {"I_star", b.critical_current},
                                {"from", b.from_node},
                                {"to", b.to_node},
                                {"cpr", "sinusoidal"}});
  }
  if (!c.gates.empty()) {
    root["gates"] = json::array();
    for (const auto& g : c.gates) {
      json j{{"node", g.node},          {"r_gate", g.r_gate}, {"r_out", g.r_out},
             {"ig_star", g.gate_threshold}, {"alpha", g.coupling_alpha}, {"width_ratio", g.width_ratio}};
      if (!g.coupled_branches.empty()) j["couples"] = g.coupled_branches;
      root["gates"].push_back(j);
    }
  }
  if (!c.loops.empty()) {
    root["loops"] = json::array();
    for (const auto& l : c.loops) {
      json j{{"branches", l.branches}, {"flux_fraction", l.flux_fraction}};
      if (l.theta0) j["theta0"] = *l.theta0;
      root["loops"].push_back(j);
    }
  }
  return root.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("cannot write " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string pattern_csv(const InterferencePattern& pattern) {
  std::string out = "phi_ext,i_c,branch,m\n";
  for (const auto& s : pattern.samples) {
    out += fmt::format("{},{},{},{}\n", format_number(s.phi_ext), format_number(s.i_c), s.label, s.m);
  }
  return out;
}

std::string vertices_csv(const InterferencePattern& pattern) {
  std::string out = "phi_ext,i_in,left,right,jump\n";
  for (const auto& v : pattern.vertices) {
    out += fmt::format("{},{},{},{},{}\n", format_number(v.phi_ext), format_number(v.i_in),
                       v.left_label, v.right_label, v.jump ? 1 : 0);
  }
  return out;
}

std::string region_map_csv(const RegionMap& map) {
  const bool with_r = map.normal_resistance.has_value();
  std::string out = with_r ? "phi_ext,i_in,state,resistance\n" : "phi_ext,i_in,state\n";
  for (std::size_t r = 0; r < map.i_in.size(); ++r) {
    for (std::size_t c = 0; c < map.phi_ext.size(); ++c) {
      out += fmt::format("{},{},{}", format_number(map.phi_ext[c]), format_number(map.i_in[r]),
                         cell_state_name(map.at(r, c)));
      if (with_r) out += "," + format_number(*map.resistance(r, c));
      out += "\n";
    }
  }
  return out;
}

std::string comparison_csv(const ComparisonReport& report) {
  std::string out = "phi_ext,i_c_exact,i_c_linear,error\n";
  for (std::size_t k = 0; k < report.phi_ext.size(); ++k) {
    out += fmt::format("{},{},{},{}\n", format_number(report.phi_ext[k]), format_number(report.exact[k]),
                       format_number(report.linear[k]), format_number(report.error[k]));
  }
  return out;
}

std::string lobes_csv(const std::vector<StabilityRegion>& lobes) {
  std::string out = "m,phi_ext,upper,lower\n";
  for (const auto& l : lobes) {
    for (std::size_t k = 0; k < l.phi_ext.size(); ++k) {
      if (std::isnan(l.upper[k])) continue;
      out += fmt::format("{},{},{},{}\n", l.m, format_number(l.phi_ext[k]), format_number(l.upper[k]),
                         format_number(l.lower[k]));
    }
  }
  return out;
}

std::vector<FitCurve> parse_fit_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_csv_line(line);
  }
  auto column = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int c_phi = column("phi_ext");
  const int c_ic = column("i_c");
  const int c_vg = column("v_g");
  if (c_phi < 0 || c_ic < 0) throw InputError("fit data: header must name phi_ext and i_c columns");

  std::vector<FitCurve> curves;
  std::map<double, std::size_t> by_vg;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    auto cell = [&](int col, Dimension dim) {
      if (col >= static_cast<int>(cells.size())) {
        throw InputError(fmt::format("fit data line {}: missing column {}", line_no, header[static_cast<std::size_t>(col)]));
      }
      try {
        return parse_quantity(cells[static_cast<std::size_t>(col)], dim);
      } catch (const InputError& e) {
        throw InputError(fmt::format("fit data line {}: {}", line_no, e.what()));
      }
    };
    const double phi = cell(c_phi, Dimension::Flux);
    const double ic = cell(c_ic, Dimension::Current);
    const double vg = c_vg >= 0 ? cell(c_vg, Dimension::Voltage) : 0.0;
    auto [it, inserted] = by_vg.try_emplace(vg, curves.size());
    if (inserted) {
      FitCurve curve;
      if (c_vg >= 0) curve.v_gate = {vg};
      curves.push_back(curve);
    }
    curves[it->second].phi_ext.push_back(phi);
    curves[it->second].i_c.push_back(ic);
  }
  if (curves.empty()) throw InputError("fit data: no rows");
  return curves;
}

std::vector<FitCurve> read_fit_csv(const std::filesystem::path& path) {
  return parse_fit_csv(read_text(path));
}

std::string fit_report_json(const FitResult& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["parameters"] = json::array();
  for (const auto& p : r.parameters) {
    j["parameters"].push_back({{"name", p.name}, {"value", p.value}, {"lower", p.lower}, {"upper", p.upper}});
  }
  j["rms"] = r.rms;
  j["iterations"] = r.iterations;
  j["evaluations"] = r.evaluations;
  j["converged"] = r.converged;
  j["best_start"] = r.best_start;
  j["points_used"] = r.points_used;
  j["config_digest"] = config_digest(r.config);
  return j.dump(2) + "\n";
}

std::string alpha_report_json(const DeviceConfig& config, const AlphaStar& a) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["alpha_star"] = a.value;
  j["alpha_star_raw"] = a.raw;
  j["clamped"] = a.clamped;
  j["physical"] = a.physical;
  j["resistance_ratio"] = config.gates.front().resistance_ratio();
  j["residual"] = zero_inductance_residual(config, a.value);
  j["config_digest"] = config_digest(config);
  return j.dump(2) + "\n";
}

std::string shift_report_json(const DeviceConfig& config, double v_reference,
                              const std::vector<ShiftRow>& rows) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config_digest"] = config_digest(config);
  j["v_reference"] = v_reference;
  j["shifts"] = json::array();
  for (const auto& r : rows) {
    const double diff = r.measured.flux - r.predicted.flux;
    j["shifts"].push_back({{"v_gate", r.v_gate},
                           {"predicted_flux", r.predicted.flux},
                           {"predicted_radians", r.predicted.radians},
                           {"measured_flux", r.measured.flux},
                           {"measured_radians", r.measured.radians},
                           {"difference_flux", diff},
                           {"difference_phi0", diff / config.phi0}});
  }
  return j.dump(2) + "\n";
}

std::string oracle_report_json(const TwoJunctionLoop& loop, const ComparisonReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["beta1"] = loop.beta1();
  j["beta2"] = loop.beta2();
  j["samples"] = report.phi_ext.size();
  j["max_error"] = report.max_error;
  j["mean_error"] = report.mean_error;
  return j.dump(2) + "\n";
}

}  // namespace gsquid
