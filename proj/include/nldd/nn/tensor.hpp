#pragma once

#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nldd/error.hpp"

namespace nldd::nn {

/// Feature map of one sample: `frames` rows (layer depth) of `length` values,
/// stored frame-major.
struct FeatureMap {
  std::size_t frames = 0;
  std::size_t length = 0;
  std::vector<double> values;

  FeatureMap() = default;
  FeatureMap(std::size_t f, std::size_t l, double fill = 0.0) : frames(f), length(l), values(f * l, fill) {}
  FeatureMap(std::size_t f, std::size_t l, std::vector<double> v) : frames(f), length(l), values(std::move(v)) {
    if (values.size() != frames * length) throw ContractError("FeatureMap: value count does not match shape");
  }

  std::size_t size() const noexcept { return values.size(); }
  double& operator()(std::size_t f, std::size_t j) { return values[f * length + j]; }
  double operator()(std::size_t f, std::size_t j) const { return values[f * length + j]; }
  std::span<double> frame(std::size_t f) { return {values.data() + f * length, length}; }
  std::span<const double> frame(std::size_t f) const { return {values.data() + f * length, length}; }

  bool operator==(const FeatureMap&) const = default;
};

using Batch = std::vector<FeatureMap>;

struct Shape {
  std::size_t frames = 1;
  std::size_t length = 1;

  std::size_t size() const noexcept { return frames * length; }
  bool operator==(const Shape&) const = default;
};

inline std::string to_string(const Shape& s) {
  std::ostringstream os;
  os << s.frames << "x" << s.length;
  return os.str();
}

inline Shape shape_of(const FeatureMap& m) { return {m.frames, m.length}; }

}  // namespace nldd::nn
