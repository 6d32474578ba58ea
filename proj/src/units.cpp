#include "gsquid/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <utility>

#include "gsquid/errors.hpp"

namespace gsquid {

namespace {

struct UnitSuffix {
  std::string_view text;
  Dimension dimension;
  double scale;
};

constexpr std::array<UnitSuffix, 9> kUnits{{
    {"Phi0", Dimension::Flux, kFluxQuantum},
    {"Ohm", Dimension::Resistance, 1.0},
    {"ohm", Dimension::Resistance, 1.0},
    {"Ω", Dimension::Resistance, 1.0},
    {"rad", Dimension::Angle, 1.0},
    {"Wb", Dimension::Flux, 1.0},
    {"A", Dimension::Current, 1.0},
    {"V", Dimension::Voltage, 1.0},
    {"H", Dimension::Inductance, 1.0},
}};

constexpr std::array<std::pair<std::string_view, double>, 11> kPrefixes{{
    {"f", 1e-15},
    {"p", 1e-12},
    {"n", 1e-9},
    {"u", 1e-6},
    {"µ", 1e-6},
    {"μ", 1e-6},
    {"m", 1e-3},
    {"k", 1e3},
    {"M", 1e6},
    {"G", 1e9},
    {"T", 1e12},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::Dimensionless: return "dimensionless";
    case Dimension::Current: return "current";
    case Dimension::Voltage: return "voltage";
    case Dimension::Inductance: return "inductance";
    case Dimension::Resistance: return "resistance";
    case Dimension::Flux: return "flux";
    case Dimension::Angle: return "angle";
  }
  return "unknown";
}

double parse_quantity(std::string_view text, Dimension expected) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr == s.data()) {
    throw InputError("cannot parse quantity '" + std::string(text) + "'");
  }
  std::string_view rest = trim(std::string_view(ptr, static_cast<size_t>(s.data() + s.size() - ptr)));

  double scale = 1.0;
  for (const auto& unit : kUnits) {
    if (rest.size() >= unit.text.size() && rest.substr(rest.size() - unit.text.size()) == unit.text) {
      if (unit.dimension != expected) {
        throw InputError("quantity '" + std::string(text) + "' has " +
                         std::string(dimension_name(unit.dimension)) + " units, expected " +
                         std::string(dimension_name(expected)));
      }
      scale = unit.scale;
      rest.remove_suffix(unit.text.size());
      break;
    }
  }
  if (!rest.empty()) {
    bool matched = false;
    for (const auto& [prefix, factor] : kPrefixes) {
      if (rest == prefix) {
        scale *= factor;
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw InputError("unknown unit suffix '" + std::string(rest) + "' in '" + std::string(text) + "'");
    }
  }
  const double result = value * scale;
  if (!std::isfinite(result)) {
    throw InputError("quantity '" + std::string(text) + "' is not finite");
  }
  return result;
}

}  // namespace gsquid
