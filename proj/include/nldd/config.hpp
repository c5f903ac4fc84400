#pragma once

// Experiment configuration: YAML files whose physical values carry units.
//
//   system:
//     model: duffing1
//     k1: "1 kN/mm"
//
// Every value is converted to SI at load. Unknown keys are rejected so that
// typos surface as errors naming the offending field.

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nldd/analysis.hpp"
#include "nldd/autoencoder.hpp"
#include "nldd/dataset.hpp"
#include "nldd/dynamics.hpp"
#include "nldd/error.hpp"
#include "nldd/gan.hpp"
#include "nldd/units.hpp"

namespace nldd::config {

using units::Dimension;

/// Measured records, one file per damage level.
struct ExternalFile {
  std::filesystem::path path;
  double damage = 0.0;
};

struct ExternalData {
  double rate = 0.0;
  std::optional<std::pair<double, double>> band;  // Hz
  std::vector<ExternalFile> files;
};

struct FrcConfig {
  std::vector<double> amplitudes_g{0.003, 0.1};
  std::vector<double> damages{0.0};
  double f_min = 6.0, f_max = 12.0, step = 0.02;
  std::vector<analysis::Direction> directions{analysis::Direction::up};
  analysis::SweepOptions sweep{};
};

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 1;
  std::optional<dynamics::SystemModel> model;  // empty for measured data
  std::optional<ExternalData> external;
  dataset::BenchmarkSpec benchmark;  // levels, windows, noise, window length, simulation
  std::size_t score_windows = 2000;  // records per damaged level
  double train_fraction = 0.8;
  ae::AEConfig ae;
  gan::GANConfig gan;
  FrcConfig frc;
  std::filesystem::path out_dir = "out";
  std::string source;                // the YAML text this was parsed from
  std::filesystem::path base_dir = ".";  // relative data paths resolve here

  std::string system_name() const { return model ? std::string(dynamics::model_name(*model)) : "external"; }
};

namespace detail {

/// A YAML mapping that remembers which keys were read.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_ + ": expected a mapping");
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  YAML::Node raw(const std::string& key) {
    used_.insert(key);
    return has(key) ? node_[key] : YAML::Node();
  }

  Section section(const std::string& key) { return Section(raw(key), field(key)); }

  std::string text(const std::string& key) {
    const auto n = raw(key);
    if (!n.IsScalar()) throw ConfigError(field(key) + ": expected a scalar");
    return n.Scalar();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : (used_.insert(key), fallback);
  }

  double quantity(const std::string& key, Dimension dim, double fallback) {
    return has(key) ? units::parse(text(key), dim, field(key)) : (used_.insert(key), fallback);
  }

  double required_quantity(const std::string& key, Dimension dim) {
    if (!has(key)) throw ConfigError(field(key) + ": required");
    return units::parse(text(key), dim, field(key));
  }

  std::vector<double> quantities(const std::string& key, Dimension dim, const std::vector<double>& fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    const auto n = raw(key);
    if (!n.IsSequence()) throw ConfigError(field(key) + ": expected a list");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string f = field(key) + "[" + std::to_string(i) + "]";
      if (!n[i].IsScalar()) throw ConfigError(f + ": expected a scalar");
      out.push_back(units::parse(n[i].Scalar(), dim, f));
    }
    return out;
  }

  template <class T>
  T integer(const std::string& key, T fallback, T min_value = 0) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    const std::string s = text(key);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw ConfigError(field(key) + ": expected an integer, got '" + s + "'");
    if (v < static_cast<long long>(min_value))
      throw ConfigError(field(key) + ": must be >= " + std::to_string(min_value));
    return static_cast<T>(v);
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    const std::string s = text(key);
    if (s == "true") return true;
    if (s == "false") return false;
    throw ConfigError(field(key) + ": expected true or false, got '" + s + "'");
  }

  std::vector<Stage> stages(const std::string& key, const std::vector<Stage>& fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    const auto n = raw(key);
    if (!n.IsSequence()) throw ConfigError(field(key) + ": expected a list of [kernel, filters, stride]");
    std::vector<Stage> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string f = field(key) + "[" + std::to_string(i) + "]";
      if (!n[i].IsSequence() || n[i].size() != 3) throw ConfigError(f + ": expected [kernel, filters, stride]");
      std::size_t v[3];
      for (std::size_t j = 0; j < 3; ++j) {
        try {
          const auto x = n[i][j].as<long long>();
          if (x < 1) throw ConfigError(f + ": entries must be >= 1");
          v[j] = static_cast<std::size_t>(x);
        } catch (const YAML::Exception&) {
          throw ConfigError(f + ": entries must be integers");
        }
      }
      out.push_back({v[0], v[1], v[2]});
    }
    return out;
  }

  /// Throws on keys that were never read.
  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.count(key)) throw ConfigError(field(key) + ": unknown key");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

inline dynamics::SystemModel read_model(Section& s) {
  const std::string kind = s.text("model");
  if (kind == "duffing1") {
    dynamics::Duffing1Params p;
    p.mass = s.quantity("mass", Dimension::mass, p.mass);
    p.damping = s.quantity("damping", Dimension::damping, p.damping);
    p.k1 = s.quantity("k1", Dimension::stiffness, p.k1);
    p.k3 = s.quantity("k3", Dimension::cubic_stiffness, p.k3);
    return p;
  }
  if (kind == "duffing2") {
    dynamics::Duffing2Params p;
    p.m1 = s.quantity("m1", Dimension::mass, p.m1);
    p.m2 = s.quantity("m2", Dimension::mass, p.m2);
    p.c1 = s.quantity("c1", Dimension::damping, p.c1);
    p.c2 = s.quantity("c2", Dimension::damping, p.c2);
    p.k11 = s.quantity("k11", Dimension::stiffness, p.k11);
    p.k21 = s.quantity("k21", Dimension::stiffness, p.k21);
    p.k13 = s.quantity("k13", Dimension::cubic_stiffness, p.k13);
    p.k23 = s.quantity("k23", Dimension::cubic_stiffness, p.k23);
    return p;
  }
  if (kind == "isolator") {
    dynamics::IsolatorParams p;
    p.mass = s.quantity("mass", Dimension::mass, p.mass);
    p.damping = s.quantity("damping", Dimension::damping, p.damping);
    p.ki = s.quantity("ki", Dimension::stiffness, p.ki);
    p.kn = s.quantity("kn", Dimension::stiffness, p.kn);
    p.k3 = s.quantity("k3", Dimension::cubic_stiffness, p.k3);
    p.xu = s.quantity("xu", Dimension::length, p.xu);
    p.xm = s.quantity("xm", Dimension::length, p.xm);
    p.xf = s.quantity("xf", Dimension::length, p.xf);
    p.bw_alpha = s.quantity("bw_alpha", Dimension::dimensionless, p.bw_alpha);
    p.bw_beta = s.quantity("bw_beta", Dimension::inverse_length, p.bw_beta);
    p.bw_gamma = s.quantity("bw_gamma", Dimension::inverse_length, p.bw_gamma);
    p.bw_n = s.quantity("bw_n", Dimension::dimensionless, p.bw_n);
    p.ks = s.quantity("ks", Dimension::stiffness, p.ks);
    p.km = s.quantity("km", Dimension::stiffness, p.km);
    p.yield_force = s.quantity("yield_force", Dimension::force, p.yield_force);
    p.sma_alpha = s.quantity("sma_alpha", Dimension::dimensionless, p.sma_alpha);
    p.sma_ys = s.quantity("sma_ys", Dimension::dimensionless, p.sma_ys);
    p.sma_a_tilde = s.quantity("sma_a_tilde", Dimension::dimensionless, p.sma_a_tilde);
    p.sma_cs = s.quantity("sma_cs", Dimension::inverse_length, p.sma_cs);
    p.sma_ns = s.quantity("sma_ns", Dimension::dimensionless, p.sma_ns);
    return p;
  }
  throw ConfigError(s.field("model") + ": unknown model '" + kind + "' (duffing1, duffing2, isolator, external)");
}

inline ExternalData read_external(Section& s, const std::filesystem::path& base_dir) {
  ExternalData d;
  d.rate = s.required_quantity("rate", Dimension::frequency);
  if (s.has("band")) {
    const auto band = s.quantities("band", Dimension::frequency, {});
    if (band.size() != 2 || !(band[0] > 0.0 && band[0] < band[1]))
      throw ConfigError(s.field("band") + ": expected [low, high] with 0 < low < high");
    d.band = std::make_pair(band[0], band[1]);
  } else {
    s.raw("band");
  }
  const auto files = s.raw("files");
  if (!files || !files.IsSequence() || files.size() == 0)
    throw ConfigError(s.field("files") + ": expected a non-empty list of {path, damage}");
  for (std::size_t i = 0; i < files.size(); ++i) {
    Section f(files[i], s.field("files") + "[" + std::to_string(i) + "]");
    ExternalFile e;
    e.path = f.text("path");
    if (e.path.is_relative()) e.path = base_dir / e.path;
    e.damage = f.quantity("damage", Dimension::dimensionless, 0.0);
    f.finish();
    d.files.push_back(e);
  }
  return d;
}

inline void read_ae(Section& s, ae::AEConfig& c) {
  if (s.has("preset")) {
    const auto name = s.text("preset");
    try {
      c = ae::preset(name);
    } catch (const ConfigError& e) {
      throw ConfigError(s.field("preset") + ": " + e.what());
    }
  }
  c.channels = s.integer<std::size_t>("channels", c.channels, 1);
  c.encoder = s.stages("encoder", c.encoder);
  const bool own_decoder = s.has("decoder");
  c.decoder = s.stages("decoder", c.decoder);
  // a preset decoder follows the channel count
  if (!own_decoder && !c.decoder.empty()) c.decoder.back().filters = c.channels;
  c.latent = s.integer<std::size_t>("latent", c.latent, 1);
  c.lambda = s.quantity("lambda", Dimension::dimensionless, c.lambda);
  c.lr = s.quantity("learning_rate", Dimension::dimensionless, c.lr);
  c.batch = s.integer<std::size_t>("batch", c.batch, 1);
  c.max_epochs = s.integer<std::size_t>("max_epochs", c.max_epochs, 1);
  c.patience = s.integer<std::size_t>("patience", c.patience, 1);
  s.finish();
}

inline void read_gan(Section& s, gan::GANConfig& c) {
  if (s.has("preset")) {
    const auto name = s.text("preset");
    try {
      c = gan::preset(name);
    } catch (const ConfigError& e) {
      throw ConfigError(s.field("preset") + ": " + e.what());
    }
  }
  c.channels = s.integer<std::size_t>("channels", c.channels, 1);
  const bool own_generator = s.has("generator");
  c.generator = s.stages("generator", c.generator);
  if (!own_generator && !c.generator.empty()) c.generator.back().filters = c.channels;
  c.discriminator = s.stages("discriminator", c.discriminator);
  c.latent = s.integer<std::size_t>("latent", c.latent, 1);
  c.stem_frames = s.integer<std::size_t>("stem_frames", c.stem_frames, 1);
  c.dropout = s.quantity("dropout", Dimension::dimensionless, c.dropout);
  c.lr_g = s.quantity("learning_rate_g", Dimension::dimensionless, c.lr_g);
  c.lr_d = s.quantity("learning_rate_d", Dimension::dimensionless, c.lr_d);
  c.beta1 = s.quantity("beta1", Dimension::dimensionless, c.beta1);
  c.batch = s.integer<std::size_t>("batch", c.batch, 1);
  c.epochs = s.integer<std::size_t>("epochs", c.epochs, 1);
  c.non_saturating = s.boolean("non_saturating", c.non_saturating);
  s.finish();
}

inline void read_frc(Section& s, FrcConfig& f) {
  f.amplitudes_g = s.quantities("amplitudes", Dimension::acceleration, {0.003 * kGravity, 0.1 * kGravity});
  for (auto& a : f.amplitudes_g) a /= kGravity;
  f.damages = s.quantities("damages", Dimension::dimensionless, f.damages);
  f.f_min = s.quantity("f_min", Dimension::frequency, f.f_min);
  f.f_max = s.quantity("f_max", Dimension::frequency, f.f_max);
  f.step = s.quantity("step", Dimension::frequency, f.step);
  if (s.has("directions")) {
    const auto n = s.raw("directions");
    if (!n.IsSequence() || n.size() == 0) throw ConfigError(s.field("directions") + ": expected a list of up/down");
    f.directions.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      const auto v = n[i].as<std::string>();
      if (v == "up") f.directions.push_back(analysis::Direction::up);
      else if (v == "down") f.directions.push_back(analysis::Direction::down);
      else throw ConfigError(s.field("directions") + "[" + std::to_string(i) + "]: expected up or down, got '" + v + "'");
    }
  } else {
    s.raw("directions");
  }
  f.sweep.settle_cycles = s.integer<std::size_t>("settle_cycles", f.sweep.settle_cycles, 1);
  f.sweep.measure_cycles = s.integer<std::size_t>("measure_cycles", f.sweep.measure_cycles, 1);
  if (f.amplitudes_g.empty()) throw ConfigError(s.field("amplitudes") + ": must not be empty");
  for (double a : f.amplitudes_g)
    if (!(a > 0.0)) throw ConfigError(s.field("amplitudes") + ": values must be > 0");
  for (double d : f.damages)
    if (!(d >= 0.0 && d < 1.0)) throw ConfigError(s.field("damages") + ": values must lie in [0, 1)");
  if (!(f.f_min > 0.0 && f.f_min <= f.f_max)) throw ConfigError(s.field("f_min") + ": need 0 < f_min <= f_max");
  if (!(f.step > 0.0)) throw ConfigError(s.field("step") + ": must be > 0");
  s.finish();
}

}  // namespace detail

/// Parses an already-loaded YAML document. Relative data paths resolve against base_dir.
inline ExperimentConfig from_yaml(const YAML::Node& root, const std::filesystem::path& base_dir = ".") {
  using detail::Section;
  if (!root || !root.IsMap()) throw ConfigError("config: top level must be a mapping");
  Section top(root, "");
  ExperimentConfig c;
  c.name = top.string("name", "experiment");
  c.seed = top.integer<std::uint64_t>("seed", c.seed);

  auto sys = top.section("system");
  if (!top.has("system")) throw ConfigError("system: required");
  if (sys.text("model") == "external") {
    auto data = top.section("data");
    if (!top.has("data")) throw ConfigError("data: required when system.model is external");
    c.external = detail::read_external(data, base_dir);
    data.finish();
  } else {
    c.model = detail::read_model(sys);
    try {
      dynamics::validate(*c.model);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("system: ") + e.what());
    }
    if (top.has("data")) throw ConfigError("data: only allowed when system.model is external");
  }
  sys.finish();

  auto exc = top.section("excitation");
  c.benchmark.amplitude.lo = exc.quantity("amplitude_min", Dimension::acceleration, 0.01 * kGravity) / kGravity;
  c.benchmark.amplitude.hi = exc.quantity("amplitude_max", Dimension::acceleration, 0.1 * kGravity) / kGravity;
  if (!(c.benchmark.amplitude.lo > 0.0 && c.benchmark.amplitude.lo <= c.benchmark.amplitude.hi))
    throw ConfigError("excitation: need 0 < amplitude_min <= amplitude_max");
  exc.finish();

  auto ds = top.section("dataset");
  c.benchmark.window_len = ds.integer<std::size_t>("window_len", 500, 1);
  c.benchmark.sim.output_rate = ds.quantity("rate", Dimension::frequency, 250.0);
  c.benchmark.noise_level = ds.quantity("noise", Dimension::dimensionless, 0.1);
  c.benchmark.windows_per_level = ds.integer<std::size_t>("windows", 2000, 1);
  c.train_fraction = ds.quantity("train_fraction", Dimension::dimensionless, 0.8);
  c.benchmark.levels = ds.quantities("levels", Dimension::dimensionless, {0.0});
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
    throw ConfigError(ds.field("train_fraction") + ": must lie in (0, 1)");
  if (!(c.benchmark.noise_level >= 0.0)) throw ConfigError(ds.field("noise") + ": must be >= 0");
  if (!(c.benchmark.sim.output_rate > 0.0)) throw ConfigError(ds.field("rate") + ": must be > 0");
  if (c.benchmark.levels.empty()) throw ConfigError(ds.field("levels") + ": must not be empty");
  for (double d : c.benchmark.levels)
    if (!(d >= 0.0 && d < 1.0)) throw ConfigError(ds.field("levels") + ": values must lie in [0, 1)");
  c.score_windows = ds.integer<std::size_t>("score_windows", c.benchmark.windows_per_level, 1);
  ds.finish();

  auto sim = top.section("simulation");
  c.benchmark.sim.dt_int = sim.quantity("dt", Dimension::time, c.benchmark.sim.dt_int);
  c.benchmark.sim.blowup_bound = sim.quantity("blowup_bound", Dimension::dimensionless, c.benchmark.sim.blowup_bound);
  if (!(c.benchmark.sim.dt_int > 0.0)) throw ConfigError(sim.field("dt") + ": must be > 0");
  sim.finish();

  const std::string preset_name = c.model ? c.system_name() : "magnetoelastic";
  c.ae = ae::preset(preset_name == "external" ? "magnetoelastic" : preset_name);
  c.gan = gan::preset(preset_name == "external" ? "magnetoelastic" : preset_name);
  auto ae_s = top.section("ae");
  detail::read_ae(ae_s, c.ae);
  auto gan_s = top.section("gan");
  detail::read_gan(gan_s, c.gan);
  c.ae.window_len = c.gan.window_len = c.benchmark.window_len;
  try {
    c.ae.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("ae: ") + e.what());
  }
  try {
    c.gan.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("gan: ") + e.what());
  }

  auto frc = top.section("frc");
  detail::read_frc(frc, c.frc);

  auto out = top.section("output");
  c.out_dir = out.string("dir", "out/" + c.name);
  out.finish();

  top.finish();
  return c;
}

inline ExperimentConfig parse(const std::string& text, const std::filesystem::path& base_dir = ".") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  auto c = from_yaml(root, base_dir);
  c.source = text;
  c.base_dir = std::filesystem::absolute(base_dir.empty() ? std::filesystem::path(".") : base_dir);
  return c;
}

inline ExperimentConfig load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("config file not found: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse(text.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace nldd::config
