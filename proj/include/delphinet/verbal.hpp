#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "delphinet/error.hpp"

namespace delphinet::verbal {

/// ICD-203 verbal probability bands. Each interior band is lower-exclusive and
/// upper-inclusive; No Chance and Certain are the single points 0 and 1.
enum class Descriptor {
  NoChance,
  AlmostNoChance,
  VeryUnlikely,
  Unlikely,
  RoughlyEvenChance,
  Likely,
  VeryLikely,
  AlmostCertain,
  Certain,
};

inline constexpr std::array<Descriptor, 9> kAllDescriptors = {
    Descriptor::NoChance,          Descriptor::AlmostNoChance, Descriptor::VeryUnlikely,
    Descriptor::Unlikely,          Descriptor::RoughlyEvenChance, Descriptor::Likely,
    Descriptor::VeryLikely,        Descriptor::AlmostCertain,  Descriptor::Certain,
};

struct Band {
  Descriptor descriptor;
  std::string_view name;
  double lower;  // exclusive, except for the point bands
  double upper;  // inclusive, except for Almost Certain (< 1)
};

inline constexpr std::array<Band, 9> kBands = {{
    {Descriptor::NoChance, "No Chance", 0.0, 0.0},
    {Descriptor::AlmostNoChance, "Almost No Chance", 0.0, 0.05},
    {Descriptor::VeryUnlikely, "Very Unlikely", 0.05, 0.20},
    {Descriptor::Unlikely, "Unlikely", 0.20, 0.45},
    {Descriptor::RoughlyEvenChance, "Roughly Even Chance", 0.45, 0.55},
    {Descriptor::Likely, "Likely", 0.55, 0.80},
    {Descriptor::VeryLikely, "Very Likely", 0.80, 0.95},
    {Descriptor::AlmostCertain, "Almost Certain", 0.95, 1.0},
    {Descriptor::Certain, "Certain", 1.0, 1.0},
}};

inline const Band& band(Descriptor d) { return kBands[static_cast<std::size_t>(d)]; }

inline std::string_view name(Descriptor d) { return band(d).name; }

/// True when `p` lies in the band of `d`. Used by the partition property test
/// independently of to_descriptor's search.
inline bool contains(Descriptor d, double p) {
  const auto& b = band(d);
  switch (d) {
    case Descriptor::NoChance: return p == 0.0;
    case Descriptor::Certain: return p == 1.0;
    case Descriptor::AlmostCertain: return p > b.lower && p < 1.0;
    default: return p > b.lower && p <= b.upper;
  }
}

inline Descriptor to_descriptor(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "probability " + std::to_string(p) + " is outside [0, 1]");
  }
  if (p == 0.0) return Descriptor::NoChance;
  if (p == 1.0) return Descriptor::Certain;
  for (std::size_t i = 1; i + 1 < kBands.size(); ++i) {
    if (p <= kBands[i].upper) return kBands[i].descriptor;
  }
  return Descriptor::AlmostCertain;
}

/// Representative value: the band midpoint (0 and 1 for the point bands).
inline double from_descriptor(Descriptor d) {
  const auto& b = band(d);
  return (b.lower + b.upper) / 2.0;
}

inline std::optional<Descriptor> parse_descriptor(std::string_view text) {
  auto fold = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (!std::isspace(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    return out;
  };
  auto key = fold(text);
  for (const auto& b : kBands) {
    if (fold(b.name) == key) return b.descriptor;
  }
  return std::nullopt;
}

enum class InputMode { Percentage, Descriptor };

/// Parses one CPT cell as typed by an analyst. Percentages accept an optional
/// trailing '%'; descriptors match case- and whitespace-insensitively.
inline double parse_probability_input(std::string_view text, InputMode mode) {
  auto begin = text.find_first_not_of(" \t");
  auto end = text.find_last_not_of(" \t");
  if (begin == std::string_view::npos) {
    throw Error(ErrorCode::ParseError, "empty input at position 0", {"0"});
  }
  std::string_view body = text.substr(begin, end - begin + 1);
  if (mode == InputMode::Descriptor) {
    if (auto d = parse_descriptor(body)) return from_descriptor(*d);
    throw Error(ErrorCode::UnknownDescriptor, "'" + std::string(body) + "' is not a verbal descriptor");
  }
  if (!body.empty() && body.back() == '%') body.remove_suffix(1);
  double percent = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), percent);
  std::size_t consumed = static_cast<std::size_t>(ptr - body.data());
  if (ec != std::errc() || consumed != body.size() || body.empty()) {
    std::size_t position = begin + (ec == std::errc() ? consumed : 0);
    throw Error(ErrorCode::ParseError,
                "expected a decimal percentage at position " + std::to_string(position),
                {std::to_string(position)});
  }
  if (!(percent >= 0.0 && percent <= 100.0)) {
    throw Error(ErrorCode::OutOfRange, "percentage must lie in [0, 100]");
  }
  return percent / 100.0;
}

/// Computed probabilities can miss 0 or 1 by a few ulps; snap those so a
/// deterministic outcome reads "Certain" rather than "Almost Certain".
inline double snap(double p) {
  if (p < 1e-12) return 0.0;
  if (p > 1.0 - 1e-12) return 1.0;
  return p;
}

/// "32.41%" style, two decimals.
inline std::string percent(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", snap(p) * 100.0);
  return buf;
}

/// Dual rendering used everywhere a probability is shown to people:
/// "Almost No Chance (2.33%)".
inline std::string dual(double p) {
  p = snap(p);
  return std::string(name(to_descriptor(p))) + " (" + percent(p) + ")";
}

}  // namespace delphinet::verbal
