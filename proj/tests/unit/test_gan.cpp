#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "nldd/gan.hpp"

using namespace nldd;
using namespace nldd::gan;

namespace {

nn::Batch random_corpus(std::size_t n, std::uint64_t seed, std::size_t len = 500) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  nn::Batch b;
  for (std::size_t i = 0; i < n; ++i) {
    nn::FeatureMap m(1, len);
    for (auto& v : m.values) v = u(rng);
    b.push_back(m);
  }
  return b;
}

GANConfig tiny_config() {
  GANConfig c;
  c.name = "tiny";
  c.window_len = 64;
  c.latent = 8;
  c.stem_frames = 2;
  c.generator = {{4, 4, 2}, {4, 1, 2}};
  c.discriminator = {{8, 4, 2}, {4, 4, 2}};
  c.batch = 16;
  c.epochs = 3;
  return c;
}

std::vector<std::vector<double>> values(nn::Network& net) { return net.snapshot(); }

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

TEST(GanPreset, OneDofDiscriminatorLayers) {
  const auto c = preset("duffing1");
  ASSERT_EQ(c.discriminator.size(), 3u);
  for (const auto& s : c.discriminator) EXPECT_EQ(s, (Stage{6, 64, 2}));
}

TEST(GanPreset, AllPresetsBuild) {
  for (const char* name : {"duffing1", "duffing2", "isolator", "magnetoelastic"}) {
    auto g = build_gan(preset(name), 1);
    EXPECT_EQ(g.generator.output_shape(), (nn::Shape{1, 500})) << name;
    EXPECT_EQ(g.discriminator.output_shape(), (nn::Shape{1, 1})) << name;
  }
  EXPECT_THROW(preset("nope"), ConfigError);
}

TEST(BuildGan, DropoutOnlyInDiscriminator) {
  auto g = build_gan(preset("duffing1"), 1);
  auto count = [](const nn::Network& n) {
    std::size_t k = 0;
    for (const auto& s : n.specs()) k += std::holds_alternative<nn::DropoutSpec>(s);
    return k;
  };
  EXPECT_EQ(count(g.generator), 0u);
  EXPECT_EQ(count(g.discriminator), 3u);
}

TEST(BuildGan, BadGeneratorNamesLayer) {
  auto c = preset("duffing1");
  c.generator.back().filters = 2;
  try {
    build_gan(c, 1);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("generator layer 2"), std::string::npos) << e.what();
  }
}

TEST(BuildGan, GeneratorOutputInUnitInterval) {
  auto g = build_gan(preset("duffing1"), 2);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto w = generate(g, sample_latent(64, s));
    ASSERT_EQ(w.length, 500u);
    for (double v : w.values) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(BuildGan, DiscriminatorOutputIsProbability) {
  auto g = build_gan(preset("duffing1"), 2);
  for (double p : discriminate(g, random_corpus(20, 1))) {
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(Latent, DeterministicAndSized) {
  EXPECT_EQ(sample_latent(64, 3).z, sample_latent(64, 3).z);
  EXPECT_NE(sample_latent(64, 3).z, sample_latent(64, 4).z);
  EXPECT_EQ(sample_latent(64, 3).z.size(), 64u);
  EXPECT_THROW(sample_latent(0, 1), DomainError);
}

TEST(Latent, StandardNormalMoments) {
  const auto z = sample_latent(100000, 17).z;
  const double m = mean(z);
  double var = 0.0;
  for (double v : z) var += (v - m) * (v - m);
  const double sd = std::sqrt(var / static_cast<double>(z.size() - 1));
  EXPECT_NEAR(m, 0.0, 0.02);
  EXPECT_GE(sd, 0.98);
  EXPECT_LE(sd, 1.02);
}

TEST(Generate, SameLatentSameWindow) {
  auto g = build_gan(preset("duffing1"), 2);
  const auto z = sample_latent(64, 8);
  EXPECT_EQ(generate(g, z), generate(g, z));
  EXPECT_THROW(generate(g, sample_latent(10, 1)), ContractError);
}

TEST(Discriminate, InferenceIsRepeatable) {
  auto g = build_gan(preset("duffing1"), 2);
  const auto x = random_corpus(5, 3);
  EXPECT_EQ(discriminate(g, x), discriminate(g, x));
  EXPECT_THROW(discriminate(g, nn::FeatureMap(1, 499, 0.5)), ContractError);
}

TEST(TrainGan, GeneratorStepLeavesDiscriminatorUntouched) {
  auto g = build_gan(tiny_config(), 3);
  Trainer t(g, 3);
  t.discriminator_step(random_corpus(16, 1, 64));
  const auto d_before = values(g.discriminator), g_before = values(g.generator);
  t.generator_step(16);
  EXPECT_EQ(values(g.discriminator), d_before);
  EXPECT_NE(values(g.generator), g_before);
}

TEST(TrainGan, DiscriminatorStepLeavesGeneratorUntouched) {
  auto g = build_gan(tiny_config(), 3);
  Trainer t(g, 3);
  const auto d_before = values(g.discriminator), g_before = values(g.generator);
  t.discriminator_step(random_corpus(16, 1, 64));
  EXPECT_EQ(values(g.generator), g_before);
  EXPECT_NE(values(g.discriminator), d_before);
}

TEST(TrainGan, HistoryLengthAndAlternation) {
  auto c = tiny_config();
  c.epochs = 7;
  auto g = build_gan(c, 4);
  const auto h = train_gan(g, random_corpus(40, 2, 64), 4);
  EXPECT_EQ(h.d_loss.size(), 7u);
  EXPECT_EQ(h.g_loss.size(), 7u);
  EXPECT_EQ(h.d_steps, h.g_steps);
  EXPECT_EQ(h.d_steps, 7u * 3u);
  for (double v : h.d_loss) EXPECT_TRUE(std::isfinite(v));
}

TEST(TrainGan, EpochCallbackSeesGrowingHistory) {
  auto c = tiny_config();
  c.epochs = 3;
  auto g = build_gan(c, 4);
  std::vector<std::size_t> seen;
  train_gan(g, random_corpus(10, 2, 64), 4, [&](const History& h) { seen.push_back(h.d_loss.size()); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3}));
}

TEST(TrainGan, DeterministicPerSeed) {
  const auto x = random_corpus(20, 2, 64);
  auto a = build_gan(tiny_config(), 5), b = build_gan(tiny_config(), 5);
  EXPECT_EQ(train_gan(a, x, 5).d_loss, train_gan(b, x, 5).d_loss);
  EXPECT_EQ(values(a.generator), values(b.generator));
}

TEST(TrainGan, EmptySetThrows) {
  auto g = build_gan(tiny_config(), 1);
  EXPECT_THROW(train_gan(g, {}, 1), DomainError);
}

TEST(TrainGan, NonFiniteLossReportsModel) {
  auto g = build_gan(tiny_config(), 1);
  auto x = random_corpus(4, 1, 64);
  x[0].values[0] = std::numeric_limits<double>::quiet_NaN();
  try {
    train_gan(g, x, 1);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.epoch(), 1u);
    EXPECT_EQ(e.tag(), "discriminator");
  }
}

TEST(TrainGan, ConstantCorpusReachesEquilibriumBand) {
  auto c = tiny_config();
  c.epochs = 150;
  c.batch = 32;
  const nn::Batch corpus(64, nn::FeatureMap(1, 64, 0.4));
  int inside = 0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto g = build_gan(c, seed);
    train_gan(g, corpus, seed);
    nn::Batch fake;
    for (std::uint64_t i = 0; i < 200; ++i) fake.push_back(generate(g, sample_latent(c.latent, 1000 + i)));
    const double m = mean(discriminate(g, fake));
    inside += m >= 0.3 && m <= 0.7;
  }
  EXPECT_GE(inside, 2);
}

TEST(GanLoss, LabelSwapSymmetry) {
  const std::vector<double> real = {0.9, 0.7, 0.55}, fake = {0.2, 0.35};
  std::vector<double> r2, f2;
  for (double p : fake) r2.push_back(1.0 - p);
  for (double p : real) f2.push_back(1.0 - p);
  EXPECT_NEAR(nn::gan_losses(real, fake).discriminator, nn::gan_losses(r2, f2).discriminator, 1e-15);
}
