#include <gtest/gtest.h>

#include "nldd/config.hpp"

using namespace nldd;
using units::Dimension;

namespace {

const std::filesystem::path kPresets = NLDD_PRESET_DIR;

std::string error_of(const std::string& yaml) {
  try {
    config::parse(yaml);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Units, ConvertsToSi) {
  EXPECT_DOUBLE_EQ(units::parse("1 kN/mm", Dimension::stiffness, "f"), 1e6);
  EXPECT_DOUBLE_EQ(units::parse("1 N/mm^3", Dimension::cubic_stiffness, "f"), 1e9);
  EXPECT_DOUBLE_EQ(units::parse("0.00001 kN/mm^3", Dimension::cubic_stiffness, "f"), 1e7);
  EXPECT_DOUBLE_EQ(units::parse("0.1 g", Dimension::acceleration, "f"), 0.981);
  EXPECT_DOUBLE_EQ(units::parse("10 %", Dimension::dimensionless, "f"), 0.1);
  EXPECT_DOUBLE_EQ(units::parse("0.25", Dimension::dimensionless, "f"), 0.25);
  EXPECT_DOUBLE_EQ(units::parse("70mm", Dimension::length, "f"), 0.07);
  EXPECT_DOUBLE_EQ(units::parse("0.0007 1/mm", Dimension::inverse_length, "f"), 0.7);
  EXPECT_DOUBLE_EQ(units::parse("0.1 ms", Dimension::time, "f"), 1e-4);
}

TEST(Units, RejectsBadInput) {
  EXPECT_THROW(units::parse("1e6", Dimension::stiffness, "f"), ConfigError);
  EXPECT_THROW(units::parse("1 kg", Dimension::stiffness, "f"), ConfigError);
  EXPECT_THROW(units::parse("1 furlong", Dimension::length, "f"), ConfigError);
  EXPECT_THROW(units::parse("kN/mm", Dimension::stiffness, "f"), ConfigError);
  try {
    units::parse("3", Dimension::mass, "system.mass");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("system.mass"), std::string::npos);
  }
}

TEST(Config, Duffing1PresetMatchesModelDefaults) {
  const auto c = config::load(kPresets / "duffing1.yaml");
  ASSERT_TRUE(c.model);
  const auto& p = std::get<dynamics::Duffing1Params>(*c.model);
  const auto ref = dynamics::default_duffing1();
  EXPECT_DOUBLE_EQ(p.mass, ref.mass);
  EXPECT_DOUBLE_EQ(p.damping, ref.damping);
  EXPECT_DOUBLE_EQ(p.k1, ref.k1);
  EXPECT_DOUBLE_EQ(p.k3, ref.k3);
  EXPECT_EQ(c.benchmark.window_len, 500u);
  EXPECT_EQ(c.benchmark.windows_per_level, 2000u);
  EXPECT_DOUBLE_EQ(c.benchmark.noise_level, 0.1);
  EXPECT_DOUBLE_EQ(c.train_fraction, 0.8);
  EXPECT_EQ(c.benchmark.levels.size(), 7u);
  EXPECT_DOUBLE_EQ(c.benchmark.amplitude.lo, 0.01);
  EXPECT_DOUBLE_EQ(c.benchmark.amplitude.hi, 0.1);
  EXPECT_EQ(c.ae.encoder, ae::preset("duffing1").encoder);
  EXPECT_EQ(c.gan.epochs, 1000u);
}

TEST(Config, AllPresetsLoad) {
  for (const char* name : {"duffing1", "duffing2", "isolator", "magnetoelastic"}) {
    const auto c = config::load(kPresets / (std::string(name) + ".yaml"));
    EXPECT_EQ(c.name, name);
  }
}

TEST(Config, IsolatorUnitsConverted) {
  const auto c = config::load(kPresets / "isolator.yaml");
  const auto& p = std::get<dynamics::IsolatorParams>(*c.model);
  const auto ref = dynamics::default_isolator();
  EXPECT_DOUBLE_EQ(p.ki, ref.ki);
  EXPECT_DOUBLE_EQ(p.k3, ref.k3);
  EXPECT_DOUBLE_EQ(p.xu, ref.xu);
  EXPECT_NEAR(p.bw_beta, ref.bw_beta, 1e-12);
  EXPECT_NEAR(p.bw_gamma, ref.bw_gamma, 1e-15);
  EXPECT_NEAR(p.sma_cs, ref.sma_cs, 1e-12);
  EXPECT_DOUBLE_EQ(c.benchmark.amplitude.hi, 0.8);
}

TEST(Config, MagnetoelasticIsExternal) {
  const auto c = config::load(kPresets / "magnetoelastic.yaml");
  EXPECT_FALSE(c.model);
  ASSERT_TRUE(c.external);
  ASSERT_TRUE(c.external->band);
  EXPECT_DOUBLE_EQ(c.external->band->first, 10.0);
  EXPECT_DOUBLE_EQ(c.external->band->second, 420.0);
  EXPECT_EQ(c.external->files.size(), 4u);
  EXPECT_DOUBLE_EQ(c.external->files[3].damage, 0.06);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(error_of("system: {model: duffing1, k1: 1000000}").find("system.k1"), std::string::npos);
  EXPECT_NE(error_of("system: {model: duffing1, k9: \"1 N/m\"}").find("system.k9: unknown key"), std::string::npos);
  EXPECT_NE(error_of("system: {model: duffing1}\nae: {preset: nope}").find("ae.preset"), std::string::npos);
  EXPECT_NE(error_of("system: {model: duffing1}\ndataset: {levels: [\"5 %\", \"2 Hz\"]}").find("dataset.levels[1]"),
            std::string::npos);
  EXPECT_NE(error_of("system: {model: rocket}").find("system.model"), std::string::npos);
  EXPECT_NE(error_of("system: {model: duffing1, mass: \"-1 kg\"}").find("system"), std::string::npos);
  EXPECT_NE(error_of("name: x").find("system: required"), std::string::npos);
  EXPECT_NE(error_of("system: {model: duffing1}\nfrc: {f_min: \"9 Hz\", f_max: \"8 Hz\"}").find("frc.f_min"),
            std::string::npos);
  EXPECT_NE(error_of("system: {model: duffing1}\nextra: 1").find("extra: unknown key"), std::string::npos);
}

TEST(Config, InlineArchitectureValidated) {
  const std::string bad = "system: {model: duffing1}\nae:\n  decoder: [[25, 5, 2], [50, 10, 2], [100, 2, 1]]\n";
  const auto msg = error_of(bad);
  EXPECT_NE(msg.find("ae:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("decoder layer 2"), std::string::npos) << msg;
  const auto ok = config::parse("system: {model: duffing1}\nae: {latent: 16, batch: 8}\n");
  EXPECT_EQ(ok.ae.latent, 16u);
  EXPECT_EQ(ok.ae.batch, 8u);
}

TEST(Config, DefaultsFollowSystem) {
  const auto c = config::parse("system: {model: duffing2}\n");
  EXPECT_EQ(c.ae.encoder, ae::preset("duffing2").encoder);
  EXPECT_EQ(c.gan.generator, gan::preset("duffing2").generator);
  EXPECT_EQ(c.score_windows, c.benchmark.windows_per_level);
}

TEST(Config, MissingFileIsIoError) { EXPECT_THROW(config::load("/nonexistent/x.yaml"), IoError); }

TEST(Config, ChannelsAdjustPresetOutputLayer) {
  const auto c = config::parse("system: {model: duffing2}\nae: {channels: 2}\ngan: {channels: 2}\n");
  EXPECT_EQ(c.ae.decoder.back().filters, 2u);
  EXPECT_EQ(c.gan.generator.back().filters, 2u);
  EXPECT_EQ(c.ae.encoder, ae::preset("duffing2").encoder);
}
