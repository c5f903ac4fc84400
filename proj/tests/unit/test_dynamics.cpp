#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nldd/dynamics.hpp"

using namespace nldd;
using namespace nldd::dynamics;

namespace {

TimeSeries constant_accel(double value, double duration, double dt) {
  return {std::vector<double>(static_cast<std::size_t>(std::llround(duration / dt)), value), dt};
}

TimeSeries cosine_accel(double amp, double freq_hz, double duration, double dt) {
  TimeSeries ts{std::vector<double>(static_cast<std::size_t>(std::llround(duration / dt))), dt};
  for (std::size_t i = 0; i < ts.samples.size(); ++i)
    ts.samples[i] = amp * std::cos(2.0 * M_PI * freq_hz * static_cast<double>(i) * dt);
  return ts;
}

double energy(const Duffing1Params& p, const State<Duffing1Params>& s) {
  const double x = s[0], v = s[1];
  return 0.5 * p.mass * v * v + 0.5 * p.k1 * x * x + 0.25 * p.k3 * x * x * x * x;
}

// Error after one period of the undamped linear oscillator x'' = -w^2 x.
double period_error(std::size_t steps) {
  Duffing1Params p;
  p.damping = 0.0;
  p.k3 = 0.0;
  const double w = std::sqrt(p.k1 / p.mass);
  const double period = 2.0 * M_PI / w;
  const double dt = period / static_cast<double>(steps);
  State<Duffing1Params> s{1.0, 0.0};
  for (std::size_t i = 0; i < steps; ++i) s = step_rk4(p, s, dt, 0.0, 0.0, 0.0);
  return std::hypot(s[0] - 1.0, s[1] / w);
}

}  // namespace

TEST(ApplyDamage, ZeroIsIdentity) {
  const auto p = default_duffing1();
  const auto q = apply_damage(p, 0.0);
  EXPECT_EQ(q.k1, p.k1);
  EXPECT_EQ(q.k3, p.k3);
  EXPECT_EQ(q.mass, p.mass);
  EXPECT_EQ(q.damping, p.damping);
}

TEST(ApplyDamage, Duffing1ScalesBothStiffnesses) {
  const auto p = default_duffing1();
  const auto q = apply_damage(p, 0.1);
  EXPECT_DOUBLE_EQ(q.k1, 0.9e6);
  EXPECT_DOUBLE_EQ(q.k3, 0.9e9);
  EXPECT_EQ(q.mass, 412.0);
  EXPECT_EQ(q.damping, 405.95);
}

TEST(ApplyDamage, Duffing2ScalesAllFourStiffnesses) {
  const auto q = apply_damage(default_duffing2(), 0.25);
  EXPECT_DOUBLE_EQ(q.k11, 0.75e6);
  EXPECT_DOUBLE_EQ(q.k21, 0.75e6);
  EXPECT_DOUBLE_EQ(q.k13, 0.75e9);
  EXPECT_DOUBLE_EQ(q.k23, 0.75e9);
  EXPECT_EQ(q.m1, 400.0);
  EXPECT_EQ(q.c2, 400.0);
}

TEST(ApplyDamage, IsolatorScalesKiAndKn) {
  const auto p = default_isolator();
  const auto q = apply_damage(p, 0.2);
  EXPECT_DOUBLE_EQ(q.ki, 0.8 * 1.1e6);
  EXPECT_DOUBLE_EQ(q.kn, 0.8 * 0.5e6);
  EXPECT_EQ(q.k3, p.k3);
  EXPECT_EQ(q.mass, p.mass);
  EXPECT_EQ(q.damping, p.damping);
  EXPECT_EQ(q.ks, p.ks);
}

TEST(ApplyDamage, OutOfRangeThrows) {
  EXPECT_THROW(apply_damage(default_duffing1(), -0.01), DomainError);
  EXPECT_THROW(apply_damage(default_duffing1(), 1.0), DomainError);
  EXPECT_THROW(apply_damage(SystemModel{default_isolator()}, 1.5), DomainError);
}

TEST(ApplyDamage, SingleScalingMatchesDirectProduct) {
  const auto p = default_duffing1();
  for (double d : {0.05, 0.15, 0.3}) {
    const auto q = apply_damage(p, d);
    EXPECT_EQ(q.k1, p.k1 * (1.0 - d));
    EXPECT_EQ(q.k3, p.k3 * (1.0 - d));
  }
}

TEST(Derivs, EquilibriumIsFixedPoint) {
  const auto d = derivs(default_duffing1(), {0.0, 0.0}, 0.0);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[1], 0.0);
}

TEST(Derivs, Duffing1DirectSubstitution) {
  const auto p = default_duffing1();
  const double x = 1e-3;
  const double expected = -(p.k1 * x + p.k3 * x * x * x) / p.mass;
  const auto d = derivs(p, {x, 0.0}, 0.0);
  EXPECT_NEAR(d[1], expected, 1e-12);
  EXPECT_NEAR(d[1], -2.4296, 1e-4);
}

TEST(Derivs, Duffing2EqualDisplacementsLeaveSecondMassUnloaded) {
  const auto d = derivs(default_duffing2(), {0.004, 0.004, 0.0, 0.0}, 0.0);
  EXPECT_EQ(d[3], 0.0);
  EXPECT_LT(d[2], 0.0);
}

TEST(Derivs, Duffing2ForceActsOnFirstMassOnly) {
  const auto p = default_duffing2();
  const auto d = derivs(p, {0.0, 0.0, 0.0, 0.0}, 800.0);
  EXPECT_DOUBLE_EQ(d[2], 800.0 / p.m1);
  EXPECT_EQ(d[3], 0.0);
}

TEST(Derivs, NonFiniteStateThrows) {
  EXPECT_THROW(derivs(default_duffing1(), {NAN, 0.0}, 0.0), NumericError);
  EXPECT_THROW(derivs(default_isolator(), {0.0, INFINITY, 0.0, 0.0}, 0.0), NumericError);
}

TEST(Derivs, SignOfZeroIsZero) {
  EXPECT_EQ(sgn(0.0), 0.0);
  EXPECT_EQ(sgn(-0.0), 0.0);
  EXPECT_EQ(sgn(-3.0), -1.0);
  EXPECT_EQ(sgn(2.0), 1.0);
}

TEST(Derivs, BoucWenGrowsFromRest) {
  // From z = 0 the flow reduces to z' = v.
  const auto p = default_isolator();
  EXPECT_DOUBLE_EQ(bouc_wen_rate(p, 0.0, 0.3), 0.3);
  const auto d = derivs(p, {0.0, 0.3, 0.0, 0.0}, 0.0);
  EXPECT_DOUBLE_EQ(d[2], 0.3);
}

TEST(StepRk4, EquilibriumUnchanged) {
  const auto p = default_duffing1();
  const State<Duffing1Params> s{0.0, 0.0};
  const auto n = step_rk4(p, s, 0.0, 1e-4, [](double) { return 0.0; });
  EXPECT_EQ(n, s);
}

TEST(StepRk4, RejectsNonPositiveStep) {
  EXPECT_THROW(step_rk4(default_duffing1(), State<Duffing1Params>{}, 0.0, 0.0, [](double) { return 0.0; }),
               DomainError);
}

TEST(StepRk4, LinearOscillatorReturnsAfterOnePeriod) { EXPECT_LT(period_error(1000), 1e-6); }

TEST(StepRk4, ObservedOrderIsFour) {
  const double e1 = period_error(100);
  const double e2 = period_error(200);
  EXPECT_GE(std::log2(e1 / e2), 3.9);
}

TEST(StepRk4, ForcingSampledAtStageTimes) {
  std::vector<double> seen;
  auto f = [&](double t) {
    seen.push_back(t);
    return 0.0;
  };
  step_rk4(default_duffing1(), State<Duffing1Params>{}, 2.0, 0.5, f);
  ASSERT_EQ(seen.size(), 3u);
  EXPECT_DOUBLE_EQ(seen[0], 2.0);
  EXPECT_DOUBLE_EQ(seen[1], 2.25);
  EXPECT_DOUBLE_EQ(seen[2], 2.5);
}

TEST(Energy, UndampedDuffingConservesEnergy) {
  auto p = default_duffing1();
  p.damping = 0.0;
  State<Duffing1Params> s{0.01, 0.0};
  const double e0 = energy(p, s);
  const double dt = 1e-4;
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    s = step_rk4(p, s, dt, 0.0, 0.0, 0.0);
    worst = std::max(worst, std::abs(energy(p, s) - e0) / e0);
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Simulate, ZeroExcitationGivesZeroOutput) {
  const auto out = simulate(SystemModel{default_duffing2()}, constant_accel(0.0, 2.0, 1e-4), 0.1);
  ASSERT_EQ(out.size(), 2u);
  for (const auto& ts : out)
    for (double v : ts.samples) EXPECT_EQ(v, 0.0);
}

TEST(Simulate, OutputLengthFollowsRate) {
  const auto out = simulate(default_duffing1(), constant_accel(0.1, 2.0, 1e-4), 0.0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].samples.size(), 500u);
  EXPECT_DOUBLE_EQ(out[0].dt, 1.0 / 250.0);
}

TEST(Simulate, StaticLoadSettlesToStaticDeflection) {
  // Constant base acceleration a: equilibrium solves K1 x + K3 x^3 = -M a.
  auto p = default_duffing1();
  p.k3 = 0.0;
  const double a = 0.05;
  const auto out = simulate(p, constant_accel(a, 30.0, 1e-4), 0.0);
  EXPECT_NEAR(out[0].samples.back(), -p.mass * a / p.k1, 1e-3 * p.mass * a / p.k1);
}

TEST(Simulate, HarmonicResponseMatchesLinearFrf) {
  const auto p = default_duffing1();
  const double amp = 0.003 * kGravity, f = 7.8, w = 2.0 * M_PI * f;
  SimulationOptions opt;
  opt.output_rate = 2500.0;
  const auto out = simulate(p, cosine_accel(amp, f, 40.0, 1e-4), 0.0, opt);
  const auto& x = out[0].samples;
  double peak = 0.0;
  for (std::size_t i = x.size() - 2500; i < x.size(); ++i) peak = std::max(peak, std::abs(x[i]));
  const double linear = p.mass * amp / std::hypot(p.k1 - p.mass * w * w, p.damping * w);
  EXPECT_NEAR(peak, linear, 0.02 * linear);
}

TEST(Simulate, CoarseExcitationIsInterpolated) {
  // A 1 kHz excitation is accepted (integer multiple of dt_int) and a
  // constant one gives the same result as at the internal rate.
  const auto fine = simulate(default_duffing1(), constant_accel(0.2, 1.0, 1e-4), 0.0);
  const auto coarse = simulate(default_duffing1(), constant_accel(0.2, 1.0, 1e-3), 0.0);
  ASSERT_EQ(fine[0].samples.size(), coarse[0].samples.size());
  for (std::size_t i = 0; i < fine[0].samples.size(); ++i)
    EXPECT_NEAR(fine[0].samples[i], coarse[0].samples[i], 1e-15);
}

TEST(Simulate, RejectsIncompatibleRates) {
  EXPECT_THROW(simulate(default_duffing1(), constant_accel(0.0, 1.0, 1.5e-4), 0.0), DomainError);
  SimulationOptions opt;
  opt.output_rate = 300.0;
  EXPECT_THROW(simulate(default_duffing1(), constant_accel(0.0, 1.0, 1e-4), 0.0, opt), DomainError);
}

TEST(Simulate, IsDeterministic) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  TimeSeries acc{std::vector<double>(20000), 1e-4};
  for (auto& v : acc.samples) v = n(rng);
  const auto a = simulate(SystemModel{default_isolator()}, acc, 0.1);
  const auto b = simulate(SystemModel{default_isolator()}, acc, 0.1);
  EXPECT_EQ(a[0].samples, b[0].samples);
}

TEST(Simulate, BlowupReportsInternalStep) {
  SimulationOptions opt;
  opt.blowup_bound = 1e-9;
  try {
    simulate(default_duffing1(), constant_accel(1.0, 1.0, 1e-4), 0.0, opt);
    FAIL() << "expected InstabilityError";
  } catch (const InstabilityError& e) {
    EXPECT_DOUBLE_EQ(e.dt(), 1e-4);
    EXPECT_NE(std::string(e.what()).find("dt_int=0.0001"), std::string::npos);
  }
}

TEST(Isolator, NegativeStiffnessVanishesBeyondXf) {
  const auto p = default_isolator();
  for (double x : {0.0701, 0.08, 0.5, -0.0701, -1.0}) EXPECT_EQ(negative_stiffness_force(p, x), 0.0);
  const double x = 0.03;
  EXPECT_DOUBLE_EQ(negative_stiffness_force(p, x), -p.kn * x + p.k3 * x * x * x);
}

TEST(Isolator, NegativeStiffnessContinuousInsideBand) {
  const auto p = default_isolator();
  for (double x = -0.069; x < 0.069; x += 0.001) {
    const double a = negative_stiffness_force(p, x), b = negative_stiffness_force(p, x + 1e-9);
    EXPECT_NEAR(a, b, 1e-2);
  }
}

TEST(BoucWen, StaysBelowSaturationBound) {
  auto p = default_isolator();
  p.bw_beta = 50.0;
  p.bw_gamma = 10.0;
  const double bound = 1.0 / (p.bw_beta + p.bw_gamma);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 2.0);
  double z = 0.0, worst = 0.0;
  const double dt = 1e-4;
  for (int i = 0; i < 200000; ++i) {
    const double v = 1.0 + 0.2 * n(rng);
    const double k1 = bouc_wen_rate(p, z, v);
    const double k2 = bouc_wen_rate(p, z + 0.5 * dt * k1, v);
    const double k3 = bouc_wen_rate(p, z + 0.5 * dt * k2, v);
    const double k4 = bouc_wen_rate(p, z + dt * k3, v);
    z += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    worst = std::max(worst, std::abs(z));
  }
  EXPECT_LE(worst, bound + 1e-9);
  EXPECT_GT(worst, 0.9 * bound);
}

TEST(BoucWen, KinematicLoopClosesAndDissipates) {
  auto p = default_isolator();
  p.bw_beta = 50.0;
  p.bw_gamma = 10.0;
  const std::size_t spc = 4000;
  const auto loop = bouc_wen_cycle(p, 0.05, 1.0, 3, spc);
  for (std::size_t c = 1; c < 3; ++c) {
    const std::size_t a = c * spc, b = (c + 1) * spc;
    double area = 0.0;
    for (std::size_t i = a; i < b; ++i)
      area += 0.5 * (loop.force[i] + loop.force[i + 1]) * (loop.x[i + 1] - loop.x[i]);
    EXPECT_GT(area, 0.0) << "cycle " << c;
    EXPECT_NEAR(loop.x[a], loop.x[b], 1e-12);
    EXPECT_NEAR(loop.force[a], loop.force[b], 1e-4 * std::abs(loop.force[a]));
  }
}

TEST(Validate, RejectsBadParameters) {
  Duffing1Params p;
  p.mass = 0.0;
  EXPECT_THROW(p.validate(), DomainError);
  IsolatorParams q;
  q.km = q.ks;
  EXPECT_THROW(q.validate(), DomainError);
  q = {};
  q.bw_alpha = 1.0;
  EXPECT_THROW(q.validate(), DomainError);
}
