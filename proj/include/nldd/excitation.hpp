#pragma once

// Random and harmonic excitation, band-pass filtering and measurement noise.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <vector>

#include "nldd/error.hpp"
#include "nldd/time_series.hpp"

namespace nldd::excitation {

/// Peak acceleration range in multiples of g.
struct AmplitudeRange {
  double lo = 0.01;
  double hi = 0.1;

  void validate() const {
    if (!(lo > 0.0 && lo <= hi)) throw DomainError("amplitude range must satisfy 0 < lo <= hi");
  }
};

/// n independent standard-normal samples.
inline TimeSeries white_noise(std::size_t n, double dt, std::uint64_t seed) {
  if (n == 0) throw DomainError("white_noise: n must be > 0");
  if (!(dt > 0.0)) throw DomainError("white_noise: dt must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  TimeSeries out{std::vector<double>(n), dt};
  for (auto& v : out.samples) v = normal(rng);
  return out;
}

/// Rescales so that max |sample| equals `peak` exactly.
inline TimeSeries scale_to_peak(const TimeSeries& series, double peak) {
  if (!(peak > 0.0)) throw DomainError("scale_to_peak: peak must be > 0");
  const double current = max_abs(series.samples);
  if (current == 0.0) throw DomainError("scale_to_peak: series is identically zero");
  TimeSeries out = series;
  if (current == peak) return out;
  const double factor = peak / current;
  for (auto& v : out.samples) v *= factor;
  // Force the extreme sample onto the peak so the postcondition is exact.
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    if (std::abs(series.samples[i]) == current) out.samples[i] = series.samples[i] > 0.0 ? peak : -peak;
  }
  return out;
}

/// Uniform draw in [lo g, hi g] (m/s^2).
inline double draw_amplitude(const AmplitudeRange& range, std::uint64_t seed) {
  range.validate();
  std::mt19937_64 rng(seed);
  const double u = std::generate_canonical<double, 53>(rng);
  return (range.lo + (range.hi - range.lo) * u) * kGravity;
}

/// Harmonic base-excitation force F(k dt) = -A M cos(Omega k dt), A in m/s^2.
inline TimeSeries harmonic(double amplitude, double omega, double duration, double dt, double mass) {
  if (!(amplitude > 0.0 && omega > 0.0 && duration > 0.0 && dt > 0.0 && mass > 0.0))
    throw DomainError("harmonic: amplitude, omega, duration, dt and mass must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  TimeSeries out{std::vector<double>(n), dt};
  for (std::size_t k = 0; k < n; ++k)
    out.samples[k] = -amplitude * mass * std::cos(omega * static_cast<double>(k) * dt);
  return out;
}

// ---------------------------------------------------------------------------
// Butterworth band-pass

struct Biquad {
  double b0, b1, b2, a1, a2;  // normalized by a0

  void run(std::vector<double>& x) const {
    double s1 = 0.0, s2 = 0.0;  // transposed direct form II
    for (auto& v : x) {
      const double in = v;
      const double y = b0 * in + s1;
      s1 = b1 * in - a1 * y + s2;
      s2 = b2 * in - a2 * y;
      v = y;
    }
  }
};

namespace detail {

inline Biquad make_biquad(bool highpass, double fc, double fs, double q) {
  const double w0 = 2.0 * M_PI * fc / fs;
  const double c = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  double b0, b1;
  if (highpass) {
    b0 = (1.0 + c) / 2.0;
    b1 = -(1.0 + c);
  } else {
    b0 = (1.0 - c) / 2.0;
    b1 = 1.0 - c;
  }
  return {b0 / a0, b1 / a0, b0 / a0, -2.0 * c / a0, (1.0 - alpha) / a0};
}

}  // namespace detail

/// 4th-order Butterworth high-pass at f_lo cascaded with a 4th-order
/// Butterworth low-pass at f_hi, each as two biquad sections.
inline std::vector<Biquad> butterworth_bandpass(double f_lo, double f_hi, double fs) {
  const double nyquist = 0.5 * fs;
  if (!(f_lo > 0.0 && f_lo < f_hi && f_hi < nyquist)) {
    std::ostringstream os;
    os << "bandpass: need 0 < f_lo < f_hi < Nyquist (" << nyquist << " Hz), got " << f_lo << ".." << f_hi;
    throw DomainError(os.str());
  }
  // Pole-pair quality factors of a 4th-order Butterworth prototype.
  const std::array<double, 2> qs{1.0 / (2.0 * std::cos(M_PI / 8.0)), 1.0 / (2.0 * std::cos(3.0 * M_PI / 8.0))};
  std::vector<Biquad> sections;
  for (double q : qs) sections.push_back(detail::make_biquad(true, f_lo, fs, q));
  for (double q : qs) sections.push_back(detail::make_biquad(false, f_hi, fs, q));
  return sections;
}

/// Zero-phase (forward-backward) band-pass. The series is padded at both ends
/// with its odd reflection to damp start-up transients.
inline TimeSeries bandpass(const TimeSeries& series, double f_lo, double f_hi) {
  const auto sections = butterworth_bandpass(f_lo, f_hi, series.rate());
  const std::size_t n = series.samples.size();
  if (n == 0) return series;
  const std::size_t pad = std::min<std::size_t>(n - 1, 3 * static_cast<std::size_t>(std::ceil(series.rate() / f_lo)));
  const auto& x = series.samples;
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

  for (const auto& s : sections) s.run(ext);
  std::reverse(ext.begin(), ext.end());
  for (const auto& s : sections) s.run(ext);
  std::reverse(ext.begin(), ext.end());

  TimeSeries out{std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                                     ext.begin() + static_cast<std::ptrdiff_t>(pad + n)),
                 series.dt};
  return out;
}

/// Adds white Gaussian noise with RMS = level * RMS(series). The noise is
/// rescaled to hit the requested RMS exactly.
inline TimeSeries add_measurement_noise(const TimeSeries& series, double level, std::uint64_t seed) {
  if (!(level >= 0.0)) throw DomainError("add_measurement_noise: level must be >= 0");
  const double signal_rms = rms(series.samples);
  if (level == 0.0 || signal_rms == 0.0 || series.samples.empty()) return series;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w(series.samples.size());
  for (auto& v : w) v = normal(rng);
  const double w_rms = rms(w);
  const double factor = w_rms > 0.0 ? level * signal_rms / w_rms : 0.0;
  TimeSeries out = series;
  for (std::size_t i = 0; i < w.size(); ++i) out.samples[i] += factor * w[i];
  return out;
}

}  // namespace nldd::excitation
