#pragma once

// Benchmark nonlinear oscillators, fixed-step RK4 integration and base-excited
// simulation with damage applied as stiffness reduction.

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nldd/error.hpp"
#include "nldd/time_series.hpp"

namespace nldd::dynamics {

/// sign with sign(0) = 0.
inline double sgn(double v) noexcept { return static_cast<double>((v > 0.0) - (v < 0.0)); }

/// M x'' + C x' + K1 x + K3 x^3 = F.  State layout: [x, v].
struct Duffing1Params {
  static constexpr std::size_t kDofs = 1;
  static constexpr std::size_t kStateSize = 2;
  static constexpr std::string_view kName = "duffing1";

  double mass = 412.0;
  double damping = 405.95;
  double k1 = 1.0e6;
  double k3 = 1.0e9;

  void validate() const {
    if (!(mass > 0.0)) throw DomainError("duffing1: mass must be > 0");
    if (!(damping >= 0.0)) throw DomainError("duffing1: damping must be >= 0");
    if (!(k1 > 0.0)) throw DomainError("duffing1: k1 must be > 0");
    if (!(k3 >= 0.0)) throw DomainError("duffing1: k3 must be >= 0");
  }
  double excitation_mass() const noexcept { return mass; }
};

/// Two masses in series, each spring with linear and cubic terms. The base
/// force acts on the first mass only. State layout: [x1, x2, v1, v2].
struct Duffing2Params {
  static constexpr std::size_t kDofs = 2;
  static constexpr std::size_t kStateSize = 4;
  static constexpr std::string_view kName = "duffing2";

  double m1 = 400.0, m2 = 400.0;
  double c1 = 400.0, c2 = 400.0;
  double k11 = 1.0e6, k21 = 1.0e6;
  double k13 = 1.0e9, k23 = 1.0e9;

  void validate() const {
    if (!(m1 > 0.0 && m2 > 0.0)) throw DomainError("duffing2: masses must be > 0");
    if (!(c1 >= 0.0 && c2 >= 0.0)) throw DomainError("duffing2: dampings must be >= 0");
    if (!(k11 > 0.0 && k21 > 0.0 && k13 > 0.0 && k23 > 0.0))
      throw DomainError("duffing2: stiffnesses must be > 0");
  }
  double excitation_mass() const noexcept { return m1; }
};

/// Seismic isolator: Bouc-Wen elastomeric force + negative stiffness mechanism
/// + superelastic (SMA) force. State layout: [x, v, z, fs].
///
/// The superelastic constants (yield_force, ks, km, sma_alpha, sma_ys,
/// sma_a_tilde) have no published values; the defaults below are placeholders.
struct IsolatorParams {
  static constexpr std::size_t kDofs = 1;
  static constexpr std::size_t kStateSize = 4;
  static constexpr std::string_view kName = "isolator";

  double mass = 400.0;
  double damping = 0.4767;
  double ki = 1.1e6;
  double kn = 0.5e6;
  double k3 = 1.0e7;
  double xu = 0.1;
  double xm = 0.07;
  double xf = 0.07;
  // Bouc-Wen
  double bw_alpha = 0.2;
  double bw_beta = 0.7;    // 1/m^n
  double bw_gamma = 0.01;  // 1/m^n
  double bw_n = 1.0;
  // superelastic
  double ks = 2.0e6;
  double km = 0.2e6;
  double yield_force = 1.0e4;
  double sma_alpha = 0.1;
  double sma_ys = 0.5;
  double sma_a_tilde = 1.0;
  double sma_cs = 10.0;  // 1/m
  double sma_ns = 3.0;

  void validate() const {
    if (!(mass > 0.0)) throw DomainError("isolator: mass must be > 0");
    if (!(damping >= 0.0)) throw DomainError("isolator: damping must be >= 0");
    if (!(ki > 0.0)) throw DomainError("isolator: ki must be > 0");
    if (!(kn >= 0.0)) throw DomainError("isolator: kn must be >= 0");
    if (!(k3 >= 0.0)) throw DomainError("isolator: k3 must be >= 0");
    if (!(bw_alpha > 0.0 && bw_alpha < 1.0)) throw DomainError("isolator: bw_alpha must be in (0,1)");
    if (!(bw_n >= 1.0)) throw DomainError("isolator: bw_n must be >= 1");
    if (!(sma_ns >= 1.0)) throw DomainError("isolator: sma_ns must be >= 1");
    if (!(yield_force > 0.0)) throw DomainError("isolator: yield_force must be > 0");
    if (!(ks > km && km > 0.0)) throw DomainError("isolator: need ks > km > 0");
    if (!(sma_ys >= 0.0 && sma_ys < 2.0)) throw DomainError("isolator: sma_ys must be in [0,2)");
  }
  double excitation_mass() const noexcept { return mass; }
};

template <class M>
using State = std::array<double, M::kStateSize>;

template <class M>
concept OscillatorModel = requires(const M& m) {
  { M::kDofs } -> std::convertible_to<std::size_t>;
  { M::kStateSize } -> std::convertible_to<std::size_t>;
  { m.excitation_mass() } -> std::convertible_to<double>;
  m.validate();
};

using SystemModel = std::variant<Duffing1Params, Duffing2Params, IsolatorParams>;

// ---------------------------------------------------------------------------
// Damage

inline void check_damage(double d) {
  if (!(d >= 0.0 && d < 1.0)) {
    std::ostringstream os;
    os << "damage fraction must be in [0,1), got " << d;
    throw DomainError(os.str());
  }
}

inline Duffing1Params apply_damage(Duffing1Params p, double d) {
  check_damage(d);
  p.k1 *= 1.0 - d;
  p.k3 *= 1.0 - d;
  return p;
}

inline Duffing2Params apply_damage(Duffing2Params p, double d) {
  check_damage(d);
  const double f = 1.0 - d;
  p.k11 *= f;
  p.k21 *= f;
  p.k13 *= f;
  p.k23 *= f;
  return p;
}

inline IsolatorParams apply_damage(IsolatorParams p, double d) {
  check_damage(d);
  p.ki *= 1.0 - d;
  p.kn *= 1.0 - d;
  return p;
}

inline SystemModel apply_damage(const SystemModel& m, double d) {
  return std::visit([d](const auto& p) -> SystemModel { return apply_damage(p, d); }, m);
}

// ---------------------------------------------------------------------------
// Governing equations. `force` is the external load on the first mass (N).

template <std::size_t N>
inline void check_finite(const std::array<double, N>& s) {
  for (double v : s) {
    if (!std::isfinite(v)) throw NumericError("state contains a non-finite entry");
  }
}

inline State<Duffing1Params> derivs(const Duffing1Params& p, const State<Duffing1Params>& s, double force) {
  check_finite(s);
  const double x = s[0], v = s[1];
  return {v, (force - p.damping * v - p.k1 * x - p.k3 * x * x * x) / p.mass};
}

inline State<Duffing2Params> derivs(const Duffing2Params& p, const State<Duffing2Params>& s, double force) {
  check_finite(s);
  const double x1 = s[0], x2 = s[1], v1 = s[2], v2 = s[3];
  const double dx = x2 - x1, dv = v2 - v1;
  const double coupling = p.c2 * dv + p.k21 * dx + p.k23 * dx * dx * dx;
  const double a1 = (force - p.c1 * v1 - p.k11 * x1 - p.k13 * x1 * x1 * x1 + coupling) / p.m1;
  const double a2 = -coupling / p.m2;
  return {v1, v2, a1, a2};
}

/// Bouc-Wen flow dz/dt = v * (1 - (gamma + beta*sign(z v)) |z|^n).
inline double bouc_wen_rate(const IsolatorParams& p, double z, double v) noexcept {
  const double az = std::abs(z);
  const double zn = p.bw_n == 1.0 ? az : std::pow(az, p.bw_n);
  return v * (1.0 - (p.bw_gamma + p.bw_beta * sgn(z * v)) * zn);
}

/// Elastomeric (viscous + Bouc-Wen) force.
inline double elastomeric_force(const IsolatorParams& p, double x, double v, double z) noexcept {
  return p.damping * v + p.bw_alpha * p.ki * x + (1.0 - p.bw_alpha) * p.ki * z;
}

/// Negative stiffness force, active only for |x| <= xf (halved at |x| = xf).
inline double negative_stiffness_force(const IsolatorParams& p, double x) noexcept {
  return (-p.kn * x + p.k3 * x * x * x) * (1.0 + sgn(p.xf - std::abs(x))) * 0.5;
}

/// Superelastic force rate dfs/dt.
inline double superelastic_rate(const IsolatorParams& p, double x, double v, double fs) noexcept {
  const double y = p.yield_force;
  const double s = 0.5 * (std::tanh(p.sma_cs * (std::abs(x) - p.xm)) + 1.0);
  const double ft = (2.0 * y - p.sma_ys * y) / (p.sma_alpha * p.ks);
  const double as = std::atan(p.sma_a_tilde * p.ks) / (y - p.sma_ys * y);
  const double beta_s =
      p.ks * p.sma_alpha * (x - fs / p.ks + ft * std::tanh(as * x) * 0.5 * (1.0 + sgn(-x * v)));
  const double diff = fs - beta_s;
  const double ratio = std::abs(diff) / y;
  const double powed = p.sma_ns == 3.0 ? ratio * ratio * ratio : std::pow(ratio, p.sma_ns);
  return (1.0 - s) * p.ks * (v - std::abs(v) * sgn(diff) * powed) + s * p.km * v;
}

struct IsolatorForces {
  double elastomeric = 0.0;
  double negative = 0.0;
  double superelastic = 0.0;
  double total() const noexcept { return elastomeric + negative + superelastic; }
};

inline IsolatorForces isolator_forces(const IsolatorParams& p, const State<IsolatorParams>& s) noexcept {
  return {elastomeric_force(p, s[0], s[1], s[2]), negative_stiffness_force(p, s[0]), s[3]};
}

inline State<IsolatorParams> derivs(const IsolatorParams& p, const State<IsolatorParams>& s, double force) {
  check_finite(s);
  const double x = s[0], v = s[1], z = s[2], fs = s[3];
  const double restoring = elastomeric_force(p, x, v, z) + negative_stiffness_force(p, x) + fs;
  return {v, (force - restoring) / p.mass, bouc_wen_rate(p, z, v), superelastic_rate(p, x, v, fs)};
}

template <class M>
inline double displacement(const M&, const State<M>& s, std::size_t dof) {
  if (dof >= M::kDofs) throw ContractError("dof index out of range");
  if constexpr (std::is_same_v<M, Duffing2Params>) {
    return s[dof];
  } else {
    return s[0];
  }
}

template <class M>
inline double velocity(const M&, const State<M>& s, std::size_t dof) {
  if (dof >= M::kDofs) throw ContractError("dof index out of range");
  if constexpr (std::is_same_v<M, Duffing2Params>) {
    return s[2 + dof];
  } else {
    return s[1];
  }
}

// ---------------------------------------------------------------------------
// Integration

/// Classical RK4 step with the forcing given at t, t + dt/2 and t + dt.
template <class M>
inline State<M> step_rk4(const M& m, const State<M>& s, double dt, double f0, double f_mid, double f1) {
  constexpr std::size_t n = M::kStateSize;
  const State<M> k1 = derivs(m, s, f0);
  State<M> tmp;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
  const State<M> k2 = derivs(m, tmp, f_mid);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
  const State<M> k3 = derivs(m, tmp, f_mid);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + dt * k3[i];
  const State<M> k4 = derivs(m, tmp, f1);
  State<M> out;
  for (std::size_t i = 0; i < n; ++i) out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

/// RK4 step with the forcing sampled from a callable force(t).
template <class M, class ForceFn>
  requires std::invocable<ForceFn&, double>
inline State<M> step_rk4(const M& m, const State<M>& s, double t, double dt, ForceFn&& force) {
  if (!(dt > 0.0)) throw DomainError("step_rk4: dt must be > 0");
  const double f0 = force(t);
  const double f_mid = force(t + 0.5 * dt);
  const double f1 = force(t + dt);
  return step_rk4(m, s, dt, f0, f_mid, f1);
}

struct SimulationOptions {
  double dt_int = 1.0e-4;
  double output_rate = 250.0;
  /// Any |displacement| or |velocity| beyond this aborts the run.
  double blowup_bound = 1.0e3;
};

namespace detail {

inline std::size_t integer_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const double rr = std::round(r);
  if (rr < 1.0 || std::abs(r - rr) > 1e-9 * std::max(1.0, rr)) {
    std::ostringstream os;
    os << what << " (ratio " << r << " is not a positive integer)";
    throw DomainError(os.str());
  }
  return static_cast<std::size_t>(rr);
}

template <class M>
inline void check_blowup(const M& m, const State<M>& s, double bound, double dt, double t) {
  for (std::size_t d = 0; d < M::kDofs; ++d) {
    const double x = displacement(m, s, d), v = velocity(m, s, d);
    if (!std::isfinite(x) || !std::isfinite(v) || std::abs(x) > bound || std::abs(v) > bound) {
      std::ostringstream os;
      os << M::kName << " simulation unstable at t=" << t << " s with dt_int=" << dt
         << " s (response exceeded " << bound << ")";
      throw InstabilityError(os.str(), dt);
    }
  }
}

}  // namespace detail

/// Integrates the damaged model from rest under base acceleration `base_accel`
/// (force on the first mass = -mass * accel) and returns the displacement of
/// every DOF sampled at `output_rate`. Sample k is taken at t = (k+1)/rate.
///
/// Excitation sampled at dt_int is held constant over each step; a coarser
/// excitation (an integer multiple of dt_int) is interpolated linearly.
template <class M>
  requires OscillatorModel<M>
std::vector<TimeSeries> simulate(const M& model, const TimeSeries& base_accel, double damage,
                                 const SimulationOptions& opt = {}) {
  model.validate();
  validate(base_accel);
  if (base_accel.samples.empty()) throw DomainError("simulate: empty excitation");
  if (!(opt.dt_int > 0.0)) throw DomainError("simulate: dt_int must be > 0");
  if (!(opt.output_rate > 0.0)) throw DomainError("simulate: output_rate must be > 0");
  const std::size_t exc_ratio = detail::integer_ratio(base_accel.dt, opt.dt_int,
                                                      "excitation dt must be an integer multiple of dt_int");
  const std::size_t decim = detail::integer_ratio(1.0 / opt.output_rate, opt.dt_int,
                                                  "output_rate must divide 1/dt_int");
  const M m = apply_damage(model, damage);
  const double mass = m.excitation_mass();
  const double duration = base_accel.duration();
  const auto n_out = static_cast<std::size_t>(std::floor(duration * opt.output_rate + 1e-9));

  const auto& a = base_accel.samples;
  const std::size_t n_exc = a.size();
  // Base acceleration at internal step i + frac (frac in [0,1]).
  auto accel = [&](std::size_t i, double frac) -> double {
    if (exc_ratio == 1) return a[std::min(i, n_exc - 1)];
    const double pos = (static_cast<double>(i) + frac) / static_cast<double>(exc_ratio);
    const auto j = static_cast<std::size_t>(pos);
    if (j + 1 >= n_exc) return a[n_exc - 1];
    const double w = pos - static_cast<double>(j);
    return (1.0 - w) * a[j] + w * a[j + 1];
  };

  std::vector<TimeSeries> out(M::kDofs);
  for (auto& ts : out) {
    ts.dt = 1.0 / opt.output_rate;
    ts.samples.reserve(n_out);
  }
  State<M> s{};
  const double dt = opt.dt_int;
  std::size_t step = 0;
  for (std::size_t k = 0; k < n_out; ++k) {
    for (std::size_t j = 0; j < decim; ++j, ++step) {
      const double f0 = -mass * accel(step, 0.0);
      const double fm = exc_ratio == 1 ? f0 : -mass * accel(step, 0.5);
      const double f1 = exc_ratio == 1 ? f0 : -mass * accel(step, 1.0);
      s = step_rk4(m, s, dt, f0, fm, f1);
    }
    detail::check_blowup(m, s, opt.blowup_bound, dt, static_cast<double>(step) * dt);
    for (std::size_t d = 0; d < M::kDofs; ++d) out[d].samples.push_back(displacement(m, s, d));
  }
  return out;
}

inline std::vector<TimeSeries> simulate(const SystemModel& model, const TimeSeries& base_accel, double damage,
                                        const SimulationOptions& opt = {}) {
  return std::visit([&](const auto& m) { return simulate(m, base_accel, damage, opt); }, model);
}

inline std::size_t dof_count(const SystemModel& m) {
  return std::visit([](const auto& p) { return std::decay_t<decltype(p)>::kDofs; }, m);
}

inline std::string_view model_name(const SystemModel& m) {
  return std::visit([](const auto& p) { return std::decay_t<decltype(p)>::kName; }, m);
}

inline double excitation_mass(const SystemModel& m) {
  return std::visit([](const auto& p) { return p.excitation_mass(); }, m);
}

inline void validate(const SystemModel& m) {
  std::visit([](const auto& p) { p.validate(); }, m);
}

// ---------------------------------------------------------------------------
// Kinematic Bouc-Wen cycling

struct HysteresisLoop {
  std::vector<double> time;
  std::vector<double> x;
  std::vector<double> z;
  std::vector<double> force;  // elastomeric force
};

/// Drives the Bouc-Wen element with x(t) = amplitude * sin(2 pi f t) from
/// z = 0 and records the elastomeric force. RK4 on z with the kinematics
/// evaluated exactly at the stage times.
inline HysteresisLoop bouc_wen_cycle(const IsolatorParams& p, double amplitude, double frequency,
                                     std::size_t cycles, std::size_t steps_per_cycle = 2000) {
  if (!(amplitude > 0.0 && frequency > 0.0) || cycles == 0 || steps_per_cycle == 0)
    throw DomainError("bouc_wen_cycle: amplitude, frequency, cycles and steps must be positive");
  const double w = 2.0 * M_PI * frequency;
  const double dt = 1.0 / (frequency * static_cast<double>(steps_per_cycle));
  auto xk = [&](double t) { return amplitude * std::sin(w * t); };
  auto vk = [&](double t) { return amplitude * w * std::cos(w * t); };
  HysteresisLoop loop;
  const std::size_t n = cycles * steps_per_cycle;
  loop.time.reserve(n + 1);
  double z = 0.0;
  auto record = [&](double t) {
    loop.time.push_back(t);
    loop.x.push_back(xk(t));
    loop.z.push_back(z);
    loop.force.push_back(elastomeric_force(p, xk(t), vk(t), z));
  };
  record(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double k1 = bouc_wen_rate(p, z, vk(t));
    const double k2 = bouc_wen_rate(p, z + 0.5 * dt * k1, vk(t + 0.5 * dt));
    const double k3 = bouc_wen_rate(p, z + 0.5 * dt * k2, vk(t + 0.5 * dt));
    const double k4 = bouc_wen_rate(p, z + dt * k3, vk(t + dt));
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(static_cast<double>(i + 1) * dt);
  }
  return loop;
}

// ---------------------------------------------------------------------------
// Reference parameter sets in SI.

inline Duffing1Params default_duffing1() { return {}; }
inline Duffing2Params default_duffing2() { return {}; }
inline IsolatorParams default_isolator() { return {}; }

}  // namespace nldd::dynamics
