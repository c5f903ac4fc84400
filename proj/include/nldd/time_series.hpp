#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "nldd/error.hpp"

namespace nldd {

/// Standard gravity used to convert "g" multiples.
inline constexpr double kGravity = 9.81;

/// Uniformly sampled real signal.
struct TimeSeries {
  std::vector<double> samples;
  double dt = 1.0;

  std::size_t size() const noexcept { return samples.size(); }
  double duration() const noexcept { return static_cast<double>(samples.size()) * dt; }
  double rate() const noexcept { return 1.0 / dt; }
};

inline void validate(const TimeSeries& s) {
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw DomainError("time series dt must be positive");
  for (double v : s.samples) {
    if (!std::isfinite(v)) throw NumericError("time series contains a non-finite sample");
  }
}

inline double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

inline double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Derives an independent 64-bit seed from a base seed and a list of stream
/// coordinates (level index, window index, purpose tag, ...). Uses
/// std::seed_seq so the mapping is fixed by the standard.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * coords.size());
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(base);
  for (auto c : coords) push(c);
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

/// Stream purposes used with derive_seed.
enum class SeedTag : std::uint64_t {
  amplitude = 1,
  excitation = 2,
  measurement_noise = 3,
  split = 4,
  init = 5,
  shuffle = 6,
  latent = 7,
  dropout = 8,
};

inline std::uint64_t derive_seed(std::uint64_t base, SeedTag tag, std::uint64_t a = 0, std::uint64_t b = 0) {
  return derive_seed(base, {static_cast<std::uint64_t>(tag), a, b});
}

}  // namespace nldd
