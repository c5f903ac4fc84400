#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "nldd/excitation.hpp"

using namespace nldd;
using namespace nldd::excitation;

namespace {

TimeSeries sine(double amp, double f, double fs, std::size_t n) {
  TimeSeries ts{std::vector<double>(n), 1.0 / fs};
  for (std::size_t i = 0; i < n; ++i) ts.samples[i] = amp * std::sin(2.0 * M_PI * f * static_cast<double>(i) / fs);
  return ts;
}

// Single-bin DFT amplitude over [begin, end), frequency on an exact bin.
double tone_amplitude(const std::vector<double>& x, double f, double fs, std::size_t begin, std::size_t end) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = begin; i < end; ++i)
    acc += x[i] * std::polar(1.0, -2.0 * M_PI * f * static_cast<double>(i) / fs);
  return 2.0 * std::abs(acc) / static_cast<double>(end - begin);
}

}  // namespace

TEST(WhiteNoise, DeterministicPerSeed) {
  EXPECT_EQ(white_noise(500, 0.004, 7).samples, white_noise(500, 0.004, 7).samples);
  EXPECT_NE(white_noise(500, 0.004, 7).samples, white_noise(500, 0.004, 8).samples);
}

TEST(WhiteNoise, StandardNormalMoments) {
  const auto w = white_noise(100000, 0.004, 42);
  const double m = mean(w.samples);
  double var = 0.0;
  for (double v : w.samples) var += (v - m) * (v - m);
  const double sd = std::sqrt(var / static_cast<double>(w.samples.size() - 1));
  EXPECT_NEAR(m, 0.0, 0.02);
  EXPECT_GE(sd, 0.98);
  EXPECT_LE(sd, 1.02);
}

TEST(WhiteNoise, SingleSampleAndZeroCount) {
  const auto w = white_noise(1, 0.004, 1);
  ASSERT_EQ(w.samples.size(), 1u);
  EXPECT_TRUE(std::isfinite(w.samples[0]));
  EXPECT_THROW(white_noise(0, 0.004, 1), DomainError);
}

TEST(ScaleToPeak, ScalesByPeakOverMax) {
  const auto out = scale_to_peak({{1.0, -2.0}, 0.1}, 4.0);
  EXPECT_DOUBLE_EQ(out.samples[0], 2.0);
  EXPECT_DOUBLE_EQ(out.samples[1], -4.0);
}

TEST(ScaleToPeak, UnchangedAtCurrentPeak) {
  const TimeSeries s{{0.3, -0.7, 0.1}, 0.1};
  EXPECT_EQ(scale_to_peak(s, 0.7).samples, s.samples);
}

TEST(ScaleToPeak, ExactPeakOnRandomInput) {
  const double peak = 0.1 * kGravity;
  const auto out = scale_to_peak(white_noise(20000, 1e-4, 3), peak);
  EXPECT_EQ(max_abs(out.samples), peak);
}

TEST(ScaleToPeak, IdempotentAtFixedPeak) {
  const auto once = scale_to_peak(white_noise(1000, 1e-3, 9), 1.7);
  EXPECT_EQ(scale_to_peak(once, 1.7).samples, once.samples);
}

TEST(ScaleToPeak, RejectsZeroSeries) { EXPECT_THROW(scale_to_peak({{0.0, 0.0}, 0.1}, 1.0), DomainError); }

TEST(DrawAmplitude, WithinRange) {
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const double a = draw_amplitude({0.01, 0.1}, s);
    EXPECT_GE(a, 0.01 * kGravity);
    EXPECT_LE(a, 0.1 * kGravity);
  }
}

TEST(DrawAmplitude, DegenerateRangeIsConstant) {
  EXPECT_DOUBLE_EQ(draw_amplitude({0.3, 0.3}, 1), 0.3 * kGravity);
  EXPECT_DOUBLE_EQ(draw_amplitude({0.3, 0.3}, 99), 0.3 * kGravity);
}

TEST(DrawAmplitude, UniformMean) {
  double acc = 0.0;
  const int n = 10000;
  for (int s = 0; s < n; ++s) acc += draw_amplitude({0.1, 0.6}, derive_seed(5, {static_cast<std::uint64_t>(s)}));
  const double expected = 0.35 * kGravity;
  EXPECT_NEAR(acc / n, expected, 0.02 * expected);
}

TEST(DrawAmplitude, RejectsInvalidRange) {
  EXPECT_THROW(draw_amplitude({0.2, 0.1}, 1), DomainError);
  EXPECT_THROW(draw_amplitude({0.0, 0.1}, 1), DomainError);
}

TEST(Harmonic, StartsAtMinusAM) {
  const double A = 0.5, M = 412.0, w = 2.0 * M_PI * 8.0;
  const auto f = harmonic(A, w, 1.0, 1e-4, M);
  EXPECT_DOUBLE_EQ(f.samples[0], -A * M);
}

TEST(Harmonic, QuarterPeriodIsZero) {
  const double A = 0.5, M = 412.0;
  const double dt = 1e-3, w = M_PI / 2.0 / (250.0 * dt);  // w * 250 dt = pi/2
  const auto f = harmonic(A, w, 1.0, dt, M);
  EXPECT_NEAR(f.samples[250], 0.0, 1e-12 * A * M);
}

TEST(Harmonic, PeriodContainsPeak) {
  const double A = 0.5, M = 412.0, w = 2.0 * M_PI * 5.0;
  const auto f = harmonic(A, w, 0.2, 1e-4, M);
  EXPECT_NEAR(max_abs(f.samples), A * M, 1e-9 * A * M);
}

TEST(Bandpass, PassesInBandTone) {
  const double fs = 2000.0;
  const auto x = sine(1.0, 50.0, fs, 8000);
  const auto y = bandpass(x, 10.0, 420.0);
  EXPECT_NEAR(tone_amplitude(y.samples, 50.0, fs, 2000, 6000), 1.0, 0.02);
}

TEST(Bandpass, RejectsLowTone) {
  const double fs = 2000.0;
  const auto x = sine(1.0, 2.0, fs, 8000);
  const auto y = bandpass(x, 10.0, 420.0);
  EXPECT_LT(tone_amplitude(y.samples, 2.0, fs, 2000, 6000), 0.1);
}

TEST(Bandpass, FortyDecibelsOneOctaveOut) {
  const double fs = 4000.0;
  const auto lo = bandpass(sine(1.0, 5.0, fs, 16000), 10.0, 420.0);
  const auto hi = bandpass(sine(1.0, 840.0, fs, 16000), 10.0, 420.0);
  EXPECT_LT(tone_amplitude(lo.samples, 5.0, fs, 4000, 12000), 0.01);
  EXPECT_LT(tone_amplitude(hi.samples, 840.0, fs, 4000, 12000), 0.01);
}

TEST(Bandpass, ZeroInZeroOut) {
  const auto y = bandpass({std::vector<double>(1000, 0.0), 1e-3}, 10.0, 420.0);
  for (double v : y.samples) EXPECT_EQ(v, 0.0);
}

TEST(Bandpass, Linear) {
  const auto x = white_noise(3000, 1e-3, 1), z = white_noise(3000, 1e-3, 2);
  TimeSeries mix{std::vector<double>(3000), 1e-3};
  for (std::size_t i = 0; i < 3000; ++i) mix.samples[i] = 2.5 * x.samples[i] - 0.75 * z.samples[i];
  const auto fx = bandpass(x, 10.0, 420.0), fz = bandpass(z, 10.0, 420.0), fm = bandpass(mix, 10.0, 420.0);
  const double scale = max_abs(fm.samples);
  for (std::size_t i = 0; i < 3000; ++i)
    EXPECT_NEAR(fm.samples[i], 2.5 * fx.samples[i] - 0.75 * fz.samples[i], 1e-9 * scale);
}

TEST(Bandpass, RejectsBandAboveNyquist) {
  EXPECT_THROW(bandpass(white_noise(1000, 1e-3, 1), 10.0, 600.0), DomainError);
  EXPECT_THROW(bandpass(white_noise(1000, 1e-3, 1), 50.0, 20.0), DomainError);
}

TEST(MeasurementNoise, ZeroLevelIsIdentity) {
  const auto x = white_noise(1000, 1e-3, 4);
  EXPECT_EQ(add_measurement_noise(x, 0.0, 1).samples, x.samples);
}

TEST(MeasurementNoise, RmsRatioMatchesLevel) {
  const auto x = white_noise(100000, 1e-3, 4);
  const auto y = add_measurement_noise(x, 0.1, 77);
  std::vector<double> w(x.samples.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = y.samples[i] - x.samples[i];
  const double ratio = rms(w) / rms(x.samples);
  EXPECT_GE(ratio, 0.095);
  EXPECT_LE(ratio, 0.105);
}

TEST(MeasurementNoise, DeterministicAndShapePreserving) {
  const auto x = white_noise(500, 0.004, 4);
  const auto a = add_measurement_noise(x, 0.1, 12), b = add_measurement_noise(x, 0.1, 12);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.samples.size(), x.samples.size());
  EXPECT_EQ(a.dt, x.dt);
}

TEST(MeasurementNoise, UncorrelatedWithSignal) {
  const auto x = white_noise(100000, 1e-3, 4);
  const auto y = add_measurement_noise(x, 0.1, 5);
  double sxy = 0.0, sxx = 0.0, sww = 0.0;
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    const double w = y.samples[i] - x.samples[i];
    sxy += x.samples[i] * w;
    sxx += x.samples[i] * x.samples[i];
    sww += w * w;
  }
  EXPECT_LT(std::abs(sxy / std::sqrt(sxx * sww)), 0.05);
}

TEST(MeasurementNoise, EdgeCases) {
  EXPECT_THROW(add_measurement_noise(white_noise(10, 1e-3, 1), -0.1, 1), DomainError);
  const TimeSeries zero{std::vector<double>(10, 0.0), 1e-3};
  EXPECT_EQ(add_measurement_noise(zero, 0.1, 1).samples, zero.samples);
}

TEST(Seeds, DerivedStreamsDiffer) {
  EXPECT_EQ(derive_seed(1, SeedTag::excitation, 3), derive_seed(1, SeedTag::excitation, 3));
  EXPECT_NE(derive_seed(1, SeedTag::excitation, 3), derive_seed(1, SeedTag::amplitude, 3));
  EXPECT_NE(derive_seed(1, SeedTag::excitation, 3), derive_seed(2, SeedTag::excitation, 3));
}
