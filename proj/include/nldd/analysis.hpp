#pragma once

// Frequency response curves by stepped-sine sweeps, Morlet scalograms and a
// plain DFT peak finder.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "nldd/dynamics.hpp"
#include "nldd/error.hpp"
#include "nldd/time_series.hpp"

namespace nldd::analysis {

enum class Direction { up, down };

inline std::string to_string(Direction d) { return d == Direction::up ? "up" : "down"; }

struct FRCPoint {
  double frequency = 0.0;  // Hz
  double amplitude_g = 0.0;
  double amplitude = 0.0;  // steady-state max |x|, m
  Direction direction = Direction::up;
  std::size_t dof = 0;
};

struct SweepOptions {
  std::size_t settle_cycles = 100;
  std::size_t measure_cycles = 20;
  std::size_t steps_per_cycle = 200;  // raised at low frequency so that dt <= max_dt
  double max_dt = 1e-3;
  std::size_t first_settle_factor = 5;  // the first point starts from rest and settles longer
  double blowup_bound = 1e3;
};

/// Evenly spaced grid from lo to hi inclusive.
inline std::vector<double> frequency_grid(double lo, double hi, double step) {
  if (!(lo > 0.0) || !(hi >= lo) || !(step > 0.0)) throw DomainError("frequency_grid: need 0 < lo <= hi and step > 0");
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

/// Stepped-sine sweep under base acceleration A g cos(Omega t), i.e. force
/// -A g M cos(Omega t) on the first mass. Each frequency starts from the
/// previous one's final state; grid is visited ascending for `up` and
/// descending for `down`. One point per DOF per frequency.
template <class M>
std::vector<FRCPoint> frc_sweep(const M& model, double amplitude_g, std::vector<double> freqs, Direction direction,
                                double damage = 0.0, const SweepOptions& opt = {}) {
  model.validate();
  if (freqs.empty()) throw DomainError("frc_sweep: empty frequency grid");
  if (!std::is_sorted(freqs.begin(), freqs.end())) throw DomainError("frc_sweep: frequency grid must be ascending");
  if (!(freqs.front() > 0.0)) throw DomainError("frc_sweep: frequencies must be > 0");
  if (!(amplitude_g >= 0.0)) throw DomainError("frc_sweep: amplitude must be >= 0");
  if (opt.settle_cycles == 0 || opt.measure_cycles == 0 || opt.steps_per_cycle == 0)
    throw DomainError("frc_sweep: settle, measure and steps per cycle must be >= 1");
  if (!(opt.max_dt > 0.0)) throw DomainError("frc_sweep: max_dt must be > 0");
  if (direction == Direction::down) std::reverse(freqs.begin(), freqs.end());

  const M m = dynamics::apply_damage(model, damage);
  const double force_amp = amplitude_g * kGravity * m.excitation_mass();
  dynamics::State<M> s{};
  std::vector<FRCPoint> out;
  bool first = true;
  for (double f : freqs) {
    const double w = 2.0 * M_PI * f;
    const std::size_t per_cycle =
        std::max(opt.steps_per_cycle, static_cast<std::size_t>(std::ceil(1.0 / (f * opt.max_dt))));
    const double dt = 1.0 / (f * static_cast<double>(per_cycle));
    auto force = [&](double t) { return -force_amp * std::cos(w * t); };
    std::vector<double> peak(M::kDofs, 0.0);
    const std::size_t settle = opt.settle_cycles * (first ? std::max<std::size_t>(1, opt.first_settle_factor) : 1);
    first = false;
    const std::size_t total = (settle + opt.measure_cycles) * per_cycle;
    const std::size_t measure_from = settle * per_cycle;
    for (std::size_t i = 0; i < total; ++i) {
      // Phase restarts every cycle, so t stays small and exact.
      const double t = static_cast<double>(i % per_cycle) * dt;
      s = dynamics::step_rk4(m, s, t, dt, force);
      if (i + 1 > measure_from)
        for (std::size_t d = 0; d < M::kDofs; ++d)
          peak[d] = std::max(peak[d], std::abs(dynamics::displacement(m, s, d)));
    }
    dynamics::detail::check_blowup(m, s, opt.blowup_bound, dt, 0.0);
    for (std::size_t d = 0; d < M::kDofs; ++d) out.push_back({f, amplitude_g, peak[d], direction, d});
  }
  return out;
}

inline std::vector<FRCPoint> frc_sweep(const dynamics::SystemModel& model, double amplitude_g,
                                       const std::vector<double>& freqs, Direction direction, double damage = 0.0,
                                       const SweepOptions& opt = {}) {
  return std::visit([&](const auto& m) { return frc_sweep(m, amplitude_g, freqs, direction, damage, opt); }, model);
}

/// Frequency of the largest amplitude for one DOF.
inline double peak_frequency(const std::vector<FRCPoint>& pts, std::size_t dof = 0) {
  const FRCPoint* best = nullptr;
  for (const auto& p : pts)
    if (p.dof == dof && (best == nullptr || p.amplitude > best->amplitude)) best = &p;
  if (best == nullptr) throw DomainError("peak_frequency: no points for this DOF");
  return best->frequency;
}

// ---------------------------------------------------------------------------

inline constexpr double kMorletOmega0 = 6.0;

struct Scalogram {
  std::vector<double> frequencies;  // Hz
  std::vector<double> times;        // s
  std::vector<std::vector<std::complex<double>>> coefficients;  // [frequency][time]

  std::vector<std::vector<double>> magnitude() const {
    std::vector<std::vector<double>> m(coefficients.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      for (const auto& c : coefficients[i]) m[i].push_back(std::abs(c));
    return m;
  }
};

/// Morlet CWT by direct convolution. Scale s = omega0 / (2 pi f);
/// W(s, b) = (1/s) sum_t x(t) conj(psi((t - b)/s)) dt, with
/// psi(u) = pi^(-1/4) exp(i omega0 u) exp(-u^2/2) truncated at |u| <= 5.
inline Scalogram cwt_scalogram(const TimeSeries& x, const std::vector<double>& freqs) {
  validate(x);
  const double nyquist = 0.5 / x.dt;
  for (double f : freqs)
    if (!(f > 0.0 && f < nyquist)) throw DomainError("cwt_scalogram: frequency outside (0, Nyquist)");
  Scalogram sc;
  sc.frequencies = freqs;
  const std::size_t n = x.samples.size();
  for (std::size_t i = 0; i < n; ++i) sc.times.push_back(static_cast<double>(i) * x.dt);
  const double norm = std::pow(M_PI, -0.25);
  for (double f : freqs) {
    const double s = kMorletOmega0 / (2.0 * M_PI * f);
    const auto half = static_cast<long>(std::ceil(5.0 * s / x.dt));
    std::vector<std::complex<double>> kernel(static_cast<std::size_t>(2 * half + 1));
    for (long k = -half; k <= half; ++k) {
      const double u = static_cast<double>(k) * x.dt / s;
      kernel[static_cast<std::size_t>(k + half)] =
          std::conj(norm * std::exp(-0.5 * u * u) * std::polar(1.0, kMorletOmega0 * u)) * (x.dt / s);
    }
    std::vector<std::complex<double>> row(n);
    for (std::size_t b = 0; b < n; ++b) {
      std::complex<double> acc = 0.0;
      const long lo = std::max<long>(-half, -static_cast<long>(b));
      const long hi = std::min<long>(half, static_cast<long>(n - 1 - b));
      for (long k = lo; k <= hi; ++k)
        acc += x.samples[static_cast<std::size_t>(static_cast<long>(b) + k)] * kernel[static_cast<std::size_t>(k + half)];
      row[b] = acc;
    }
    sc.coefficients.push_back(std::move(row));
  }
  return sc;
}

// ---------------------------------------------------------------------------

/// One-sided DFT amplitude at bins 0..n/2, with the matching frequencies.
struct Spectrum {
  std::vector<double> frequencies;
  std::vector<double> amplitudes;
};

inline Spectrum amplitude_spectrum(const std::vector<double>& x, double dt) {
  const std::size_t n = x.size();
  if (n == 0) throw DomainError("amplitude_spectrum: empty series");
  const double m = mean(x);
  Spectrum sp;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += (x[i] - m) * std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * i % n) / static_cast<double>(n));
    sp.frequencies.push_back(static_cast<double>(k) / (static_cast<double>(n) * dt));
    sp.amplitudes.push_back(2.0 * std::abs(acc) / static_cast<double>(n));
  }
  return sp;
}

/// Frequency of the largest non-DC spectral line.
inline double dominant_frequency(const std::vector<double>& x, double dt) {
  const auto sp = amplitude_spectrum(x, dt);
  if (sp.amplitudes.size() < 2) throw DomainError("dominant_frequency: series too short");
  const auto it = std::max_element(sp.amplitudes.begin() + 1, sp.amplitudes.end());
  return sp.frequencies[static_cast<std::size_t>(it - sp.amplitudes.begin())];
}

}  // namespace nldd::analysis
