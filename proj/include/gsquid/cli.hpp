#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gsquid {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitNumerical = 2 };

struct RunSpec {
  std::string command;  ///< validate | sweep | map | oracle | fit | shift | alpha
  std::string config_path;

  // Flux axis, in units of Φ₀.
  double phi_start = 0.0;
  double phi_stop = 2.0;
  int phi_count = 401;

  // Current axis of the region map; empty means 0 .. 1.2·max I_c.
  std::string i_start;
  std::string i_stop;
  int i_count = 101;

  std::vector<std::string> v_gate;  ///< quantity strings, one per gate (shift: a list)
  std::string normal_resistance;    ///< optional display resistance for maps

  std::string out;           ///< main artifact; stdout when empty
  std::string vertices_out;  ///< sweep
  std::string svg_out;
  std::string lobes_out;     ///< oracle
  std::string report_out;    ///< oracle JSON summary
  std::string config_out;    ///< fit: template with fitted values

  // oracle: symmetric loop by β_L, or explicit normalized parameters.
  double beta = 2.0;
  std::optional<double> l1, l2, ic1, ic2;

  // fit
  std::string data_path;
  std::vector<std::string> free;  ///< "name:lower:upper"
  int starts = 8;
  std::uint64_t seed = 1;

  int window = 3;
};

/// Executes one command. Diagnostics go to `err`, text artifacts without an
/// output path to `out`.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// Parses argv and runs the command.
int cli_main(int argc, char** argv);

}  // namespace gsquid
