#pragma once

// Vanilla GAN over response windows: transposed-conv generator, conv
// discriminator with dropout and a sigmoid head. D outputs near 1 flag
// windows that resemble the undamaged training data.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nldd/error.hpp"
#include "nldd/nn/losses.hpp"
#include "nldd/nn/network.hpp"
#include "nldd/stage.hpp"
#include "nldd/time_series.hpp"

namespace nldd::gan {

struct GANConfig {
  std::string name = "custom";
  std::size_t window_len = 500;
  std::size_t channels = 1;
  std::vector<Stage> generator;      // transposed convs; the last one is the sigmoid output
  std::vector<Stage> discriminator;  // convs, each followed by dropout
  std::size_t latent = 64;
  std::size_t stem_frames = 8;  // frames of the reshaped dense stem feeding the generator convs
  double dropout = 0.3;
  double slope = 0.2;
  double lr_g = 2e-4;
  double lr_d = 2e-4;
  double beta1 = 0.5;
  std::size_t batch = 32;
  std::size_t epochs = 1000;
  bool non_saturating = false;

  std::size_t generator_stem() const {
    std::size_t up = 1;
    for (const auto& s : generator) up *= s.stride;
    return up == 0 ? 0 : window_len / up;
  }

  void validate() const {
    auto fail = [&](const std::string& msg) { throw ConfigError("gan config '" + name + "': " + msg); };
    if (window_len == 0) fail("window length must be >= 1");
    if (channels == 0) fail("channels must be >= 1");
    if (generator.empty()) fail("generator needs at least one stage");
    if (discriminator.empty()) fail("discriminator needs at least one stage");
    if (latent == 0) fail("latent dimension must be >= 1");
    if (stem_frames == 0) fail("stem frames must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout probability must lie in [0, 1)");
    if (!(lr_g > 0.0) || !(lr_d > 0.0)) fail("learning rates must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
    if (batch == 0) fail("batch size must be >= 1");
    if (epochs == 0) fail("epochs must be >= 1");
    check_stages(generator, "generator", fail);
    check_stages(discriminator, "discriminator", fail);
    std::size_t up = 1;
    for (const auto& s : generator) up *= s.stride;
    if (window_len % up != 0) {
      std::ostringstream os;
      os << "generator strides multiply to " << up << ", which does not divide the window length " << window_len;
      fail(os.str());
    }
    if (generator.back().filters != channels) {
      std::ostringstream os;
      os << "generator layer " << generator.size() - 1 << ": output filters " << generator.back().filters
         << " must equal the channel count " << channels;
      fail(os.str());
    }
  }

  bool operator==(const GANConfig&) const = default;
};

inline GANConfig preset(const std::string& name) {
  GANConfig c;
  c.name = name;
  if (name == "duffing1") {
    c.generator = {{2, 32, 2}, {3, 32, 1}, {6, 1, 2}};
    c.discriminator = {{6, 64, 2}, {6, 64, 2}, {6, 64, 2}};
  } else if (name == "duffing2") {
    c.generator = {{6, 64, 2}, {6, 32, 1}, {4, 1, 2}};
    c.discriminator = {{6, 32, 2}, {6, 32, 2}, {6, 32, 2}};
  } else if (name == "isolator") {
    c.generator = {{2, 2, 2}, {8, 1, 2}};
    c.discriminator = {{8, 8, 2}, {4, 4, 2}, {2, 2, 1}};
  } else if (name == "magnetoelastic") {
    c.generator = {{10, 100, 1}, {20, 200, 2}, {2, 1, 2}};
    c.discriminator = {{3, 200, 1}, {50, 200, 1}, {15, 100, 1}, {10, 50, 1}};
  } else {
    throw ConfigError("unknown gan preset '" + name + "'");
  }
  return c;
}

inline std::vector<nn::LayerSpec> generator_specs(const GANConfig& c) {
  const std::size_t stem = c.generator_stem();
  std::vector<nn::LayerSpec> s;
  s.push_back(nn::DenseSpec{c.stem_frames * stem, nn::Activation::leaky_relu, c.slope, c.latent});
  s.push_back(nn::ReshapeSpec{c.stem_frames, stem});
  for (std::size_t i = 0; i < c.generator.size(); ++i) {
    const auto& st = c.generator[i];
    const bool last = i + 1 == c.generator.size();
    s.push_back(nn::ConvSpec{st.kernel, st.filters, st.stride, true,
                             last ? nn::Activation::sigmoid : nn::Activation::leaky_relu, c.slope});
  }
  return s;
}

inline std::vector<nn::LayerSpec> discriminator_specs(const GANConfig& c) {
  std::vector<nn::LayerSpec> s;
  for (const auto& st : c.discriminator) {
    s.push_back(nn::ConvSpec{st.kernel, st.filters, st.stride, false, nn::Activation::leaky_relu, c.slope});
    s.push_back(nn::DropoutSpec{c.dropout});
  }
  s.push_back(nn::DenseSpec{1, nn::Activation::sigmoid, c.slope});
  return s;
}

struct Gan {
  GANConfig config;
  nn::Network generator;
  nn::Network discriminator;
};

inline Gan build_gan(const GANConfig& config, std::uint64_t seed) {
  config.validate();
  Gan g;
  g.config = config;
  try {
    g.generator = nn::Network({1, config.latent}, generator_specs(config), derive_seed(seed, SeedTag::init, 3),
                              "generator");
    g.discriminator = nn::Network({config.channels, config.window_len}, discriminator_specs(config),
                                  derive_seed(seed, SeedTag::init, 4), "discriminator");
  } catch (const ContractError& e) {
    throw ConfigError("gan config '" + config.name + "': " + e.what());
  }
  const auto out = g.generator.output_shape();
  if (out.frames != config.channels || out.length != config.window_len) {
    std::ostringstream os;
    os << "gan config '" << config.name << "': generator output " << nn::to_string(out) << " does not match "
       << config.channels << "x" << config.window_len;
    throw ConfigError(os.str());
  }
  return g;
}

struct LatentSample {
  std::vector<double> z;
};

/// Standard normal latent vector, deterministic per seed.
inline LatentSample sample_latent(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw DomainError("sample_latent: dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  LatentSample s;
  s.z.resize(dim);
  for (auto& v : s.z) v = n(rng);
  return s;
}

inline nn::Batch latent_batch(std::size_t count, std::size_t dim, std::uint64_t seed) {
  nn::Batch b;
  b.reserve(count);
  for (std::size_t i = 0; i < count; ++i) b.emplace_back(1, dim, sample_latent(dim, derive_seed(seed, {i})).z);
  return b;
}

inline nn::FeatureMap generate(Gan& g, const LatentSample& z) {
  if (z.z.size() != g.config.latent) throw ContractError("generate: latent dimension mismatch");
  return g.generator.forward(nn::FeatureMap(1, z.z.size(), z.z));
}

/// D outputs in inference mode, evaluated in chunks.
inline std::vector<double> discriminate(Gan& g, const nn::Batch& x, std::size_t chunk = 64) {
  std::vector<double> out;
  out.reserve(x.size());
  const auto in = g.discriminator.input_shape();
  for (const auto& m : x)
    if (m.frames != in.frames || m.length != in.length) {
      std::ostringstream os;
      os << "discriminate: window shape " << m.frames << "x" << m.length << " does not match model "
         << nn::to_string(in);
      throw ContractError(os.str());
    }
  for (std::size_t i = 0; i < x.size(); i += chunk) {
    const nn::Batch part(x.begin() + static_cast<std::ptrdiff_t>(i),
                         x.begin() + static_cast<std::ptrdiff_t>(std::min(x.size(), i + chunk)));
    for (const auto& y : g.discriminator.forward(part, nn::Mode::infer)) out.push_back(y.values[0]);
  }
  return out;
}

inline double discriminate(Gan& g, const nn::FeatureMap& x) { return discriminate(g, nn::Batch{x}).front(); }

inline std::vector<double> outputs(const nn::Batch& y) {
  std::vector<double> v;
  v.reserve(y.size());
  for (const auto& m : y) v.push_back(m.values[0]);
  return v;
}

inline nn::Batch as_grad(const std::vector<double>& g) {
  nn::Batch b;
  b.reserve(g.size());
  for (double v : g) b.emplace_back(1, 1, std::vector<double>{v});
  return b;
}

struct History {
  std::vector<double> d_loss;
  std::vector<double> g_loss;
  std::vector<double> d_real;  // mean D(x) seen in the D steps
  std::vector<double> d_fake;  // mean D(G(z)) seen in the G steps
  std::size_t d_steps = 0;
  std::size_t g_steps = 0;
};

/// Optimizers and counters carried across epochs.
class Trainer {
 public:
  Trainer(Gan& g, std::uint64_t seed) : gan_(&g), seed_(seed) {
    nn::AdamOptions od, og;
    od.lr = g.config.lr_d;
    og.lr = g.config.lr_g;
    od.beta1 = og.beta1 = g.config.beta1;
    adam_d_ = nn::Adam(g.discriminator, od);
    adam_g_ = nn::Adam(g.generator, og);
    g.discriminator.reseed_dropout(derive_seed(seed, SeedTag::dropout));
  }

  /// One D update on `real` against a fresh fake batch. Dropout is active.
  double discriminator_step(const nn::Batch& real) {
    auto& g = *gan_;
    const auto z = latent_batch(real.size(), g.config.latent, derive_seed(seed_, SeedTag::latent, step_++));
    const auto fake = g.generator.forward(z, nn::Mode::infer);
    g.discriminator.zero_grad();
    // The real and fake halves of the loss have independent gradients.
    last_real_ = outputs(g.discriminator.forward(real, nn::Mode::train));
    const auto [gr, unused_f] = nn::discriminator_loss_grad(last_real_, last_real_);
    g.discriminator.backward(as_grad(gr), true, false);
    const auto pf = outputs(g.discriminator.forward(fake, nn::Mode::train));
    const auto [unused_r, gf] = nn::discriminator_loss_grad(pf, pf);
    g.discriminator.backward(as_grad(gf), true, false);
    adam_d_.step(g.discriminator);
    return nn::gan_losses(last_real_, pf, g.config.non_saturating).discriminator;
  }

  /// One G update through a frozen discriminator in inference mode.
  double generator_step(std::size_t count) {
    auto& g = *gan_;
    const auto z = latent_batch(count, g.config.latent, derive_seed(seed_, SeedTag::latent, step_++));
    g.generator.zero_grad();
    const auto fake = g.generator.forward(z, nn::Mode::train);
    const auto pf = outputs(g.discriminator.forward(fake, nn::Mode::infer));
    const double loss = nn::generator_loss(pf, g.config.non_saturating);
    const auto dx = g.discriminator.backward(as_grad(nn::generator_loss_grad(pf, g.config.non_saturating)), false, true);
    g.generator.backward(dx, true, false);
    adam_g_.step(g.generator);
    last_fake_ = pf;
    return loss;
  }

  const std::vector<double>& last_real() const noexcept { return last_real_; }
  const std::vector<double>& last_fake() const noexcept { return last_fake_; }

 private:
  Gan* gan_;
  std::uint64_t seed_;
  std::uint64_t step_ = 0;
  nn::Adam adam_d_, adam_g_;
  std::vector<double> last_real_, last_fake_;
};

/// Runs the configured number of epochs; each batch makes one D update
/// followed by one G update. No early stopping.
/// on_epoch, if set, runs after every epoch with the history so far.
inline History train_gan(Gan& g, const nn::Batch& train, std::uint64_t seed,
                         const std::function<void(const History&)>& on_epoch = {}) {
  if (train.empty()) throw DomainError("train_gan: empty training set");
  const auto& c = g.config;
  Trainer t(g, seed);
  History h;
  std::vector<std::size_t> order(train.size());
  for (std::size_t epoch = 1; epoch <= c.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(derive_seed(seed, SeedTag::shuffle, epoch));
    std::shuffle(order.begin(), order.end(), rng);
    double ld = 0.0, lg = 0.0, real = 0.0, fake = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += c.batch) {
      const std::size_t end = std::min(order.size(), start + c.batch);
      nn::Batch x;
      x.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) x.push_back(train[order[i]]);
      const double d = t.discriminator_step(x);
      if (!std::isfinite(d)) throw DivergenceError("discriminator loss is not finite", epoch, "discriminator");
      ++h.d_steps;
      const double gl = t.generator_step(x.size());
      if (!std::isfinite(gl)) throw DivergenceError("generator loss is not finite", epoch, "generator");
      ++h.g_steps;
      ld += d;
      lg += gl;
      real += std::accumulate(t.last_real().begin(), t.last_real().end(), 0.0) / static_cast<double>(x.size());
      fake += std::accumulate(t.last_fake().begin(), t.last_fake().end(), 0.0) / static_cast<double>(x.size());
      ++batches;
    }
    const double nb = static_cast<double>(batches);
    h.d_loss.push_back(ld / nb);
    h.g_loss.push_back(lg / nb);
    h.d_real.push_back(real / nb);
    h.d_fake.push_back(fake / nb);
    if (on_epoch) on_epoch(h);
  }
  return h;
}

}  // namespace nldd::gan
