#pragma once

#include <string>
#include <string_view>

namespace gsquid {

/// h/2e, CODATA.
inline constexpr double kFluxQuantum = 2.067833848e-15;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class Dimension { Dimensionless, Current, Voltage, Inductance, Resistance, Flux, Angle };

std::string_view dimension_name(Dimension d);

// Quantity grammar (whitespace between number and suffix is allowed):
//
//   quantity := number [prefix] [unit]
//   prefix   := f | p | n | u | µ | m | k | M | G | T
//   unit     := A | V | H | Wb | Ohm | ohm | Ω | Phi0 | rad
//
// "Phi0" scales by the SI flux quantum. A unit, when present, must match the
// expected dimension. "10mV" -> 0.01, "1nH" -> 1e-9, "1.5kOhm" -> 1500.
double parse_quantity(std::string_view text, Dimension expected);

}  // namespace gsquid
