#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "gsquid/circuit.hpp"
#include "gsquid/cli.hpp"
#include "gsquid/config_io.hpp"
#include "gsquid/constraints.hpp"
#include "gsquid/errors.hpp"
#include "gsquid/pattern.hpp"
#include "gsquid/plot.hpp"
#include "json.hpp"

using namespace gsquid;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = GSQUID_EXAMPLE_CONFIG_DIR;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gsquid_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_spec(const RunSpec& spec) {
  std::ostringstream out, err;
  const int code = run(spec, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("bundled configs parse and validate") {
  for (const auto& name : {"gated_si.json", "narrow_gate.json", "ungated.json", "double_gated.json"}) {
    CAPTURE(name);
    const auto c = read_config(kConfigs / name);
    CHECK(validate_device(c).empty());
  }
  const auto si = read_config(kConfigs / "gated_si.json");
  CHECK(si.units == UnitsMode::SI);
  CHECK(si.branches[1].inductance == doctest::Approx(150e-12).epsilon(1e-14));
  CHECK(si.gates[0].r_gate == doctest::Approx(1000.0).epsilon(1e-14));
  CHECK(!si.theta0.has_value());
}

TEST_CASE("config diagnostics name the field") {
  SUBCASE("unknown key") {
    try {
      parse_config(R"({"branches": [{"L": 1, "I_star": 1, "Lk": 2}, {"L": 1, "I_star": 1}]})");
      FAIL("expected an error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("branches[0]") != std::string::npos);
      CHECK(std::string(e.what()).find("Lk") != std::string::npos);
    }
  }
  SUBCASE("bad quantity") {
    try {
      parse_config(R"({"branches": [{"L": "1nA", "I_star": 1}, {"L": 1, "I_star": 1}]})");
      FAIL("expected an error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("branches[0].L") != std::string::npos);
    }
  }
  SUBCASE("malformed JSON reports the position") {
    try {
      parse_config("{\n  \"branches\": [\n  oops\n}");
      FAIL("expected an error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
}

TEST_CASE("written configs read back to the same device") {
  for (const auto& name : {"gated_si.json", "narrow_gate.json", "double_gated.json"}) {
    const auto c = read_config(kConfigs / name);
    const auto back = parse_config(config_to_json(c));
    CHECK(config_digest(back) == config_digest(c));
    CHECK(config_to_json(back) == config_to_json(c));
  }
  const auto c = read_config(kConfigs / "narrow_gate.json");
  const auto back = parse_config(config_to_json(c));
  for (double phi : {0.1, 0.6}) {
    CHECK(critical_current(back, phi, 1.3).i_c == critical_current(c, phi, 1.3).i_c);
  }
}

TEST_CASE("numbers round-trip through text") {
  for (double v : {0.1, 1.0 / 3.0, 2.067833848e-15, -4.5e-300, 123456789.0}) {
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("csv formats") {
  const auto c = read_config(kConfigs / "narrow_gate.json");
  const auto p = sweep_pattern(c, 0.0, 1.0, 5, 1.3);
  const std::string csv = pattern_csv(p);
  CHECK(csv.rfind("phi_ext,i_c,branch,m\n", 0) == 0);
  CHECK(count_lines(csv) == 6);
  CHECK(vertices_csv(p).rfind("phi_ext,i_in,left,right,jump\n", 0) == 0);

  const std::vector<double> phi{0.0, 0.5}, cur{0.0, 5.0};
  const std::vector<double> v{1.3};
  const auto map = region_map(c, phi, cur, v, 10.0);
  const std::string m = region_map_csv(map);
  CHECK(m.rfind("phi_ext,i_in,state,resistance\n", 0) == 0);
  CHECK(m.find("superconducting") != std::string::npos);
  CHECK(m.find("normal") != std::string::npos);
}

TEST_CASE("fit csv groups rows by gate voltage") {
  const auto curves = parse_fit_csv("i_c,phi_ext,v_g\n1.0,0.0,0\n1.1,0.5,0\n0.9,0.0,5mV\n0.8,0.5,5mV\n");
  REQUIRE(curves.size() == 2);
  CHECK(curves[0].phi_ext.size() == 2);
  CHECK(curves[1].v_gate[0] == doctest::Approx(5e-3));
  CHECK(curves[1].i_c[1] == 0.8);
  CHECK_THROWS_AS(parse_fit_csv("phi,i\n1,2\n"), InputError);
  CHECK_THROWS_AS(parse_fit_csv("phi_ext,i_c\n1\n"), InputError);
}

TEST_CASE("svg output") {
  const auto c = read_config(kConfigs / "narrow_gate.json");
  const auto p = sweep_pattern(c, 0.0, 2.0, 51, 1.3);
  const std::string svg = pattern_svg(p, "pattern");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg == pattern_svg(p, "pattern"));
}

TEST_CASE("run: sweep") {
  const auto dir = scratch_dir("sweep");
  RunSpec spec;
  spec.command = "sweep";
  spec.config_path = (kConfigs / "narrow_gate.json").string();
  spec.v_gate = {"1.3"};
  spec.phi_count = 37;
  spec.out = (dir / "a.csv").string();
  spec.vertices_out = (dir / "v.csv").string();
  spec.svg_out = (dir / "p.svg").string();
  REQUIRE(run_spec(spec).code == 0);
  const std::string a = read_text(spec.out);
  CHECK(a.rfind("phi_ext,i_c,branch,m\n", 0) == 0);
  CHECK(count_lines(a) == 38);
  CHECK(fs::exists(spec.vertices_out));
  CHECK(fs::exists(spec.svg_out));

  spec.out = (dir / "b.csv").string();
  REQUIRE(run_spec(spec).code == 0);
  CHECK(read_text(spec.out) == a);
}

TEST_CASE("run: error exits") {
  const auto dir = scratch_dir("errors");
  SUBCASE("negative inductance") {
    write_text(dir / "bad.json", R"({"branches": [{"L": -1, "I_star": 1}, {"L": 1, "I_star": 1}]})");
    RunSpec spec;
    spec.command = "validate";
    spec.config_path = (dir / "bad.json").string();
    const auto r = run_spec(spec);
    CHECK(r.code == 1);
    CHECK(r.err.find("branches[0].inductance") != std::string::npos);
  }
  SUBCASE("missing config file") {
    RunSpec spec;
    spec.command = "sweep";
    spec.config_path = (dir / "nope.json").string();
    CHECK(run_spec(spec).code == 1);
  }
  SUBCASE("numerical failure") {
    // Far beyond the gate threshold nothing is superconducting, so the
    // envelope has no finite point to compare.
    RunSpec spec;
    spec.command = "shift";
    spec.config_path = (kConfigs / "narrow_gate.json").string();
    spec.v_gate = {"0", "50"};
    const auto r = run_spec(spec);
    CHECK(r.code == 2);
    CHECK(!r.err.empty());
  }
  SUBCASE("unknown command") {
    RunSpec spec;
    spec.command = "frobnicate";
    CHECK(run_spec(spec).code == 1);
  }
}

TEST_CASE("run: shift report") {
  RunSpec spec;
  spec.command = "shift";
  spec.config_path = (kConfigs / "gated_si.json").string();
  spec.v_gate = {"0", "5mV"};
  const auto r = run_spec(spec);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["shifts"].size() == 1);
  const auto& row = j["shifts"][0];
  const double pred = row["predicted_flux"];
  const double meas = row["measured_flux"];
  CHECK(pred == doctest::Approx(-150e-12 * 5e-3 / 1570.0).epsilon(1e-12));
  CHECK(std::abs(meas - pred) <= 0.01 * kFluxQuantum);
  CHECK(double(row["difference_flux"]) == doctest::Approx(meas - pred));
}

TEST_CASE("run: alpha, map, oracle and fit") {
  const auto dir = scratch_dir("misc");
  RunSpec spec;
  spec.config_path = (kConfigs / "narrow_gate.json").string();

  spec.command = "alpha";
  auto r = run_spec(spec);
  REQUIRE(r.code == 0);
  const auto a = nlohmann::json::parse(r.out);
  CHECK(double(a["alpha_star"]) == doctest::Approx(0.6271929825).epsilon(1e-9));

  spec.command = "map";
  spec.v_gate = {"1.3"};
  spec.phi_count = 11;
  spec.i_count = 7;
  spec.out = (dir / "map.csv").string();
  spec.svg_out = (dir / "map.svg").string();
  REQUIRE(run_spec(spec).code == 0);
  CHECK(count_lines(read_text(spec.out)) == 1 + 11 * 7);

  spec = RunSpec{};
  spec.command = "oracle";
  spec.beta = 2.0;
  spec.phi_count = 21;
  spec.out = (dir / "cmp.csv").string();
  spec.lobes_out = (dir / "lobes.csv").string();
  spec.report_out = (dir / "report.json").string();
  spec.svg_out = (dir / "oracle.svg").string();
  REQUIRE(run_spec(spec).code == 0);
  CHECK(read_text(spec.out).rfind("phi_ext,i_c_exact,i_c_linear,error\n", 0) == 0);
  CHECK(read_text(spec.lobes_out).rfind("m,phi_ext,upper,lower\n", 0) == 0);
  CHECK(nlohmann::json::parse(read_text(spec.report_out)).contains("max_error"));

  // Fit the sweep output back onto the device that produced it.
  spec = RunSpec{};
  spec.command = "sweep";
  spec.config_path = (kConfigs / "ungated.json").string();
  spec.phi_count = 80;
  spec.out = (dir / "data.csv").string();
  REQUIRE(run_spec(spec).code == 0);
  spec.command = "fit";
  spec.data_path = spec.out;
  spec.out = (dir / "fit.json").string();
  spec.config_out = (dir / "fitted.json").string();
  spec.free = {"L3:1:3"};
  spec.starts = 2;
  REQUIRE(run_spec(spec).code == 0);
  const auto fit = nlohmann::json::parse(read_text(spec.out));
  CHECK(double(fit["parameters"][0]["value"]) == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(validate_device(read_config(spec.config_out)).empty());
}
