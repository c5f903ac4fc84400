#pragma once

// Parsing of unit-annotated quantities such as "1 kN/mm" or "0.1 g" into SI.

#include <cctype>
#include <charconv>
#include <map>
#include <string>
#include <string_view>

#include "nldd/error.hpp"
#include "nldd/time_series.hpp"

namespace nldd::units {

enum class Dimension {
  dimensionless,
  mass,
  length,
  inverse_length,
  time,
  frequency,
  acceleration,
  force,
  stiffness,        // N/m
  cubic_stiffness,  // N/m^3
  damping,          // N s/m
};

inline std::string_view name(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "dimensionless (e.g. 0.1 or 10 %)";
    case Dimension::mass: return "mass (kg, t)";
    case Dimension::length: return "length (m, cm, mm)";
    case Dimension::inverse_length: return "inverse length (1/m, 1/mm)";
    case Dimension::time: return "time (s, ms)";
    case Dimension::frequency: return "frequency (Hz, kHz)";
    case Dimension::acceleration: return "acceleration (g, m/s^2)";
    case Dimension::force: return "force (N, kN)";
    case Dimension::stiffness: return "stiffness (N/m, kN/m, N/mm, kN/mm)";
    case Dimension::cubic_stiffness: return "cubic stiffness (N/m^3, kN/m^3, N/mm^3, kN/mm^3)";
    case Dimension::damping: return "damping (N*s/m, kN*s/m, N*s/mm, kN*s/mm)";
  }
  return "?";
}

struct Unit {
  Dimension dim;
  double factor;  // SI value of one unit
};

inline const std::map<std::string, Unit, std::less<>>& table() {
  static const std::map<std::string, Unit, std::less<>> t = {
      {"%", {Dimension::dimensionless, 0.01}},
      {"kg", {Dimension::mass, 1.0}},
      {"t", {Dimension::mass, 1000.0}},
      {"m", {Dimension::length, 1.0}},
      {"cm", {Dimension::length, 1e-2}},
      {"mm", {Dimension::length, 1e-3}},
      {"1/m", {Dimension::inverse_length, 1.0}},
      {"1/mm", {Dimension::inverse_length, 1e3}},
      {"s", {Dimension::time, 1.0}},
      {"ms", {Dimension::time, 1e-3}},
      {"Hz", {Dimension::frequency, 1.0}},
      {"kHz", {Dimension::frequency, 1e3}},
      {"g", {Dimension::acceleration, kGravity}},
      {"m/s^2", {Dimension::acceleration, 1.0}},
      {"N", {Dimension::force, 1.0}},
      {"kN", {Dimension::force, 1e3}},
      {"N/m", {Dimension::stiffness, 1.0}},
      {"kN/m", {Dimension::stiffness, 1e3}},
      {"N/mm", {Dimension::stiffness, 1e3}},
      {"kN/mm", {Dimension::stiffness, 1e6}},
      {"N/m^3", {Dimension::cubic_stiffness, 1.0}},
      {"kN/m^3", {Dimension::cubic_stiffness, 1e3}},
      {"N/mm^3", {Dimension::cubic_stiffness, 1e9}},
      {"kN/mm^3", {Dimension::cubic_stiffness, 1e12}},
      {"N*s/m", {Dimension::damping, 1.0}},
      {"kN*s/m", {Dimension::damping, 1e3}},
      {"N*s/mm", {Dimension::damping, 1e3}},
      {"kN*s/mm", {Dimension::damping, 1e6}},
  };
  return t;
}

/// Parses "<number> <unit>" (whitespace optional) into SI. Dimensionless
/// quantities may omit the unit; dimensional ones must carry one.
inline double parse(std::string_view text, Dimension dim, const std::string& field) {
  auto fail = [&](const std::string& why) {
    throw ConfigError(field + ": " + why + " in '" + std::string(text) + "'; expected " + std::string(name(dim)));
  };
  std::size_t b = 0;
  while (b < text.size() && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  double value = 0.0;
  const auto res = std::from_chars(text.data() + b, text.data() + text.size(), value);
  if (res.ec != std::errc()) fail("no leading number");
  std::string_view rest(res.ptr, static_cast<std::size_t>(text.data() + text.size() - res.ptr));
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) rest.remove_prefix(1);
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.remove_suffix(1);
  if (rest.empty()) {
    if (dim != Dimension::dimensionless) fail("missing unit");
    return value;
  }
  const auto it = table().find(rest);
  if (it == table().end()) fail("unknown unit '" + std::string(rest) + "'");
  if (it->second.dim != dim) fail("unit '" + std::string(rest) + "' has the wrong dimension");
  return value * it->second.factor;
}

}  // namespace nldd::units
