#include <gtest/gtest.h>

#include <cmath>

#include "nldd/analysis.hpp"

using namespace nldd;
using namespace nldd::analysis;

namespace {

TimeSeries tone(double f, double fs, std::size_t n, double amp = 1.0) {
  TimeSeries ts{std::vector<double>(n), 1.0 / fs};
  for (std::size_t i = 0; i < n; ++i) ts.samples[i] = amp * std::sin(2.0 * M_PI * f * static_cast<double>(i) / fs);
  return ts;
}

double linear_peak(double damage = 0.0) {
  return peak_frequency(frc_sweep(dynamics::default_duffing1(), 0.003, frequency_grid(6.0, 10.0, 0.02), Direction::up,
                                  damage));
}

}  // namespace

TEST(Frc, LinearResonance) {
  const double f = linear_peak();
  EXPECT_GE(f, 7.7);
  EXPECT_LE(f, 7.9);
  const auto p = dynamics::default_duffing1();
  EXPECT_NEAR(f, std::sqrt(p.k1 / p.mass) / (2.0 * M_PI), 0.02);
}

TEST(Frc, HardeningShiftUpSweep) {
  const double lin = linear_peak();
  const double f = peak_frequency(
      frc_sweep(dynamics::default_duffing1(), 0.1, frequency_grid(6.0, 12.0, 0.02), Direction::up));
  EXPECT_NEAR(f, 8.8, 0.05 * 8.8);
  EXPECT_NEAR(100.0 * (f / lin - 1.0), 12.8, 2.0);
}

TEST(Frc, DamageScalesPeakBySqrtStiffness) {
  EXPECT_NEAR(linear_peak(0.1) / linear_peak(), std::sqrt(0.9), 0.01 * std::sqrt(0.9));
}

TEST(Frc, NearStaticAmplitude) {
  const auto p = dynamics::default_duffing1();
  const double A = 0.001;
  const auto pts = frc_sweep(p, A, {0.05}, Direction::up, 0.0, {5, 5, 200});
  const double expected = A * kGravity * p.mass / p.k1;
  EXPECT_NEAR(pts[0].amplitude, expected, 0.02 * expected);
}

TEST(Frc, UpAndDownAgreeAwayFromFold) {
  const auto grid = frequency_grid(4.0, 14.0, 0.5);
  const auto up = frc_sweep(dynamics::default_duffing1(), 0.1, grid, Direction::up);
  const auto down = frc_sweep(dynamics::default_duffing1(), 0.1, grid, Direction::down);
  ASSERT_EQ(up.size(), down.size());
  for (const auto& u : up) {
    if (u.frequency > 7.0 && u.frequency < 11.0) continue;
    const auto d = std::find_if(down.begin(), down.end(), [&](const FRCPoint& p) { return p.frequency == u.frequency; });
    ASSERT_NE(d, down.end());
    EXPECT_NEAR(d->amplitude, u.amplitude, 0.02 * u.amplitude) << u.frequency;
  }
}

TEST(Frc, DeterministicAndShaped) {
  const auto a = frc_sweep(dynamics::default_duffing2(), 0.1, {5.0, 6.0}, Direction::down);
  const auto b = frc_sweep(dynamics::default_duffing2(), 0.1, {5.0, 6.0}, Direction::down);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].amplitude, b[i].amplitude);
  EXPECT_EQ(a[0].frequency, 6.0);
  EXPECT_EQ(a[1].dof, 1u);
}

TEST(Frc, InvalidInputs) {
  const auto p = dynamics::default_duffing1();
  EXPECT_THROW(frc_sweep(p, 0.1, {}, Direction::up), DomainError);
  EXPECT_THROW(frc_sweep(p, 0.1, {8.0, 7.0}, Direction::up), DomainError);
  EXPECT_THROW(frc_sweep(p, 0.1, {8.0}, Direction::up, 0.0, {0, 20, 200}), DomainError);
  EXPECT_THROW(frequency_grid(5.0, 4.0, 0.1), DomainError);
}

TEST(Frc, GridInclusive) {
  const auto g = frequency_grid(6.0, 10.0, 0.02);
  EXPECT_EQ(g.size(), 201u);
  EXPECT_NEAR(g.back(), 10.0, 1e-12);
}

TEST(Cwt, SingleToneRidge) {
  const double fs = 250.0;
  const auto x = tone(8.0, fs, 2000);
  const auto freqs = frequency_grid(2.0, 20.0, 0.25);
  const auto m = cwt_scalogram(x, freqs).magnitude();
  // Skip edges where the widest kernel runs off the series.
  const auto edge = static_cast<std::size_t>(std::ceil(5.0 * kMorletOmega0 / (2.0 * M_PI * 2.0) * fs));
  std::size_t hits = 0, total = 0;
  for (std::size_t t = edge; t + edge < x.samples.size(); ++t, ++total) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < freqs.size(); ++i)
      if (m[i][t] > m[best][t]) best = i;
    hits += std::abs(freqs[best] - 8.0) <= 0.25 + 1e-12;
  }
  ASSERT_GT(total, 0u);
  EXPECT_GE(static_cast<double>(hits), 0.95 * static_cast<double>(total));
}

TEST(Cwt, ZeroSeries) {
  const auto s = cwt_scalogram({std::vector<double>(300, 0.0), 0.004}, {5.0, 10.0});
  for (const auto& row : s.magnitude())
    for (double v : row) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.times.size(), 300u);
}

TEST(Cwt, Linear) {
  const auto x = tone(6.0, 250.0, 400);
  TimeSeries y = x;
  for (auto& v : y.samples) v *= -2.75;
  const std::vector<double> f = {3.0, 6.0, 12.0};
  const auto a = cwt_scalogram(x, f), b = cwt_scalogram(y, f);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t t = 0; t < 400; ++t) EXPECT_LT(std::abs(b.coefficients[i][t] + 2.75 * a.coefficients[i][t]), 1e-9);
}

TEST(Cwt, TimeReversalOfSymmetricInput) {
  TimeSeries x{std::vector<double>(301), 0.004};
  for (std::size_t i = 0; i < 301; ++i) {
    const double t = (static_cast<double>(i) - 150.0) * 0.004;
    x.samples[i] = std::exp(-t * t / 0.02) * std::cos(2.0 * M_PI * 9.0 * t);
  }
  const auto m = cwt_scalogram(x, {5.0, 9.0, 15.0}).magnitude();
  for (const auto& row : m)
    for (std::size_t t = 0; t < 301; ++t) EXPECT_NEAR(row[t], row[300 - t], 1e-12);
}

TEST(Cwt, OutOfBandThrows) {
  EXPECT_THROW(cwt_scalogram(tone(5.0, 250.0, 100), {130.0}), DomainError);
  EXPECT_THROW(cwt_scalogram(tone(5.0, 250.0, 100), {0.0}), DomainError);
}

TEST(Spectrum, DominantFrequencyOnBin) {
  EXPECT_NEAR(dominant_frequency(tone(8.0, 250.0, 500).samples, 0.004), 8.0, 1e-12);
  auto x = tone(12.5, 250.0, 500, 0.3).samples;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += 5.0;  // DC ignored
  EXPECT_NEAR(dominant_frequency(x, 0.004), 12.5, 1e-12);
}

TEST(Spectrum, AmplitudeOfTone) {
  const auto sp = amplitude_spectrum(tone(10.0, 250.0, 500, 0.7).samples, 0.004);
  EXPECT_NEAR(sp.amplitudes[20], 0.7, 1e-9);
}
