#pragma once

// 1D-CNN autoencoder: conv/pool encoder, dense bottleneck, transposed-conv
// decoder. Trained on undamaged windows; reconstruction MAE is the score.

#include <algorithm>
#include <cmath>
#include <limits>
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

namespace nldd::ae {

struct AEConfig {
  std::string name = "custom";
  std::size_t window_len = 500;
  std::size_t channels = 1;
  std::vector<Stage> encoder;  // each stage: conv, then maxpool(pool)
  std::vector<Stage> decoder;  // transposed convs; the last one is the sigmoid output
  std::size_t pool = 2;
  std::size_t latent = 32;
  double slope = 0.2;
  double lambda = 1e-6;
  double lr = 1e-3;
  std::size_t batch = 32;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;

  /// Length of the feature map entering the first transposed conv.
  std::size_t decoder_stem() const {
    std::size_t up = 1;
    for (const auto& s : decoder) up *= s.stride;
    return up == 0 ? 0 : window_len / up;
  }

  void validate() const {
    auto fail = [&](const std::string& msg) { throw ConfigError("ae config '" + name + "': " + msg); };
    if (window_len == 0) fail("window length must be >= 1");
    if (channels == 0) fail("channels must be >= 1");
    if (encoder.empty()) fail("encoder needs at least one stage");
    if (decoder.empty()) fail("decoder needs at least one stage");
    if (latent == 0 || latent >= window_len) fail("latent dimension must satisfy 1 <= m < window length");
    if (pool == 0) fail("pool width must be >= 1");
    if (patience == 0) fail("patience must be >= 1");
    if (batch == 0) fail("batch size must be >= 1");
    if (max_epochs == 0) fail("max epochs must be >= 1");
    if (!(lambda >= 0.0)) fail("lambda must be >= 0");
    if (!(lr > 0.0)) fail("learning rate must be > 0");
    check_stages(encoder, "encoder", fail);
    check_stages(decoder, "decoder", fail);
    std::size_t up = 1;
    for (const auto& s : decoder) up *= s.stride;
    if (window_len % up != 0) {
      std::ostringstream os;
      os << "decoder strides multiply to " << up << ", which does not divide the window length " << window_len;
      fail(os.str());
    }
    if (decoder.back().filters != channels) {
      std::ostringstream os;
      os << "decoder layer " << decoder.size() - 1 << ": output filters " << decoder.back().filters
         << " must equal the channel count " << channels;
      fail(os.str());
    }
  }

  bool operator==(const AEConfig&) const = default;
};

/// Shipped presets: duffing1, duffing2, isolator, magnetoelastic.
inline AEConfig preset(const std::string& name) {
  AEConfig c;
  c.name = name;
  if (name == "duffing1") {
    c.encoder = {{100, 10, 1}, {50, 5, 1}, {25, 2, 1}};
    c.decoder = {{25, 5, 2}, {50, 10, 2}, {100, 1, 1}};
  } else if (name == "duffing2") {
    c.encoder = {{50, 100, 1}, {25, 50, 1}, {12, 25, 1}};
    c.decoder = {{12, 50, 2}, {25, 100, 2}, {25, 100, 1}, {50, 1, 1}};
  } else if (name == "isolator") {
    c.encoder = {{20, 50, 1}, {10, 50, 1}, {5, 50, 1}};
    c.decoder = {{5, 50, 2}, {10, 50, 2}, {20, 1, 1}};
  } else if (name == "magnetoelastic") {
    c.encoder = {{20, 100, 1}, {100, 100, 1}, {50, 50, 1}, {25, 25, 1}};
    c.decoder = {{50, 50, 1}, {50, 100, 2}, {20, 1, 2}};
  } else {
    throw ConfigError("unknown ae preset '" + name + "'");
  }
  return c;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"duffing1", "duffing2", "isolator", "magnetoelastic"};
  return names;
}

inline std::vector<nn::LayerSpec> encoder_specs(const AEConfig& c) {
  std::vector<nn::LayerSpec> s;
  for (const auto& st : c.encoder) {
    s.push_back(nn::ConvSpec{st.kernel, st.filters, st.stride, false, nn::Activation::leaky_relu, c.slope});
    s.push_back(nn::PoolSpec{c.pool});
  }
  s.push_back(nn::DenseSpec{c.latent, nn::Activation::linear, c.slope});
  return s;
}

inline std::vector<nn::LayerSpec> decoder_specs(const AEConfig& c) {
  const std::size_t frames = c.encoder.back().filters, stem = c.decoder_stem();
  std::vector<nn::LayerSpec> s;
  s.push_back(nn::DenseSpec{frames * stem, nn::Activation::leaky_relu, c.slope, c.latent});
  s.push_back(nn::ReshapeSpec{frames, stem});
  for (std::size_t i = 0; i < c.decoder.size(); ++i) {
    const auto& st = c.decoder[i];
    const bool last = i + 1 == c.decoder.size();
    s.push_back(nn::ConvSpec{st.kernel, st.filters, st.stride, true,
                             last ? nn::Activation::sigmoid : nn::Activation::leaky_relu, c.slope});
  }
  return s;
}

/// Encoder g and decoder f.
struct AutoEncoder {
  AEConfig config;
  nn::Network encoder;
  nn::Network decoder;

  nn::Batch forward(const nn::Batch& x, nn::Mode mode = nn::Mode::infer) {
    return decoder.forward(encoder.forward(x, mode), mode);
  }

  void backward(const nn::Batch& dy) { encoder.backward(decoder.backward(dy, true, true), true, false); }

  void zero_grad() {
    encoder.zero_grad();
    decoder.zero_grad();
  }

  double squared_norm() { return nn::squared_norm(encoder) + nn::squared_norm(decoder); }

  std::size_t parameter_count() const { return encoder.parameter_count() + decoder.parameter_count(); }
};

/// Assembles g and f; shape problems surface as ConfigError naming the layer.
inline AutoEncoder build_ae(const AEConfig& config, std::uint64_t seed) {
  config.validate();
  AutoEncoder a;
  a.config = config;
  try {
    a.encoder = nn::Network({config.channels, config.window_len}, encoder_specs(config), derive_seed(seed, SeedTag::init, 1),
                            "encoder");
    a.decoder = nn::Network({1, config.latent}, decoder_specs(config), derive_seed(seed, SeedTag::init, 2), "decoder");
  } catch (const ContractError& e) {
    throw ConfigError("ae config '" + config.name + "': " + e.what());
  }
  const auto out = a.decoder.output_shape();
  if (out.frames != config.channels || out.length != config.window_len) {
    std::ostringstream os;
    os << "ae config '" << config.name << "': decoder output " << nn::to_string(out) << " does not match input "
       << config.channels << "x" << config.window_len;
    throw ConfigError(os.str());
  }
  return a;
}

struct TrainReport {
  std::vector<double> train_loss;  // MAE + lambda ||theta||^2, averaged over the epoch's batches
  std::vector<double> val_loss;    // plain MAE
  std::size_t stopped_epoch = 0;
  std::size_t best_epoch = 0;
  double best_val = std::numeric_limits<double>::infinity();
};

/// Patience rule on a validation metric. update() returns true when
/// training should stop after this epoch.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {
    if (patience == 0) throw DomainError("EarlyStopping: patience must be >= 1");
  }

  bool update(double value) {
    ++epoch_;
    if (value < best_) {
      best_ = value;
      best_epoch_ = epoch_;
      improved_ = true;
      since_best_ = 0;
      return false;
    }
    improved_ = false;
    return ++since_best_ >= patience_;
  }

  bool improved() const noexcept { return improved_; }
  double best() const noexcept { return best_; }
  std::size_t best_epoch() const noexcept { return best_epoch_; }

 private:
  std::size_t patience_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  bool improved_ = false;
};

/// Mean reconstruction MAE per sample, evaluated in chunks.
inline std::vector<double> score_ae(AutoEncoder& a, const nn::Batch& x, std::size_t chunk = 64) {
  std::vector<double> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); i += chunk) {
    const nn::Batch part(x.begin() + static_cast<std::ptrdiff_t>(i),
                         x.begin() + static_cast<std::ptrdiff_t>(std::min(x.size(), i + chunk)));
    const auto y = a.forward(part);
    for (std::size_t b = 0; b < part.size(); ++b) out.push_back(nn::mae_loss(part[b].values, y[b].values));
  }
  return out;
}

/// Per-channel MAE for each sample: out[i][c].
inline std::vector<std::vector<double>> score_ae_channels(AutoEncoder& a, const nn::Batch& x, std::size_t chunk = 64) {
  std::vector<std::vector<double>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); i += chunk) {
    const nn::Batch part(x.begin() + static_cast<std::ptrdiff_t>(i),
                         x.begin() + static_cast<std::ptrdiff_t>(std::min(x.size(), i + chunk)));
    const auto y = a.forward(part);
    for (std::size_t b = 0; b < part.size(); ++b) {
      std::vector<double> per(part[b].frames);
      for (std::size_t c = 0; c < part[b].frames; ++c) per[c] = nn::mae_loss(part[b].frame(c), y[b].frame(c));
      out.push_back(std::move(per));
    }
  }
  return out;
}

inline double mean_score(AutoEncoder& a, const nn::Batch& x) {
  const auto s = score_ae(a, x);
  return s.empty() ? 0.0 : std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

struct Reconstruction {
  nn::FeatureMap window;
  double mae = 0.0;
};

inline Reconstruction reconstruct(AutoEncoder& a, const nn::FeatureMap& x) {
  if (x.frames != a.config.channels || x.length != a.config.window_len) {
    std::ostringstream os;
    os << "reconstruct: window shape " << x.frames << "x" << x.length << " does not match model "
       << a.config.channels << "x" << a.config.window_len;
    throw ContractError(os.str());
  }
  Reconstruction r;
  r.window = a.forward(nn::Batch{x}).front();
  r.mae = nn::mae_loss(x.values, r.window.values);
  return r;
}

/// Minibatch ADAM on MAE + lambda ||theta||^2 with early stopping on the
/// validation MAE. The best-validation parameters are restored on return.
inline TrainReport train_ae(AutoEncoder& a, const nn::Batch& train, const nn::Batch& val, std::uint64_t seed) {
  const auto& c = a.config;
  if (train.empty()) throw DomainError("train_ae: empty training set");
  if (val.empty()) throw DomainError("train_ae: empty validation set");
  nn::AdamOptions opt;
  opt.lr = c.lr;
  nn::Adam adam_g(a.encoder, opt), adam_f(a.decoder, opt);

  TrainReport r;
  std::vector<std::vector<double>> best_g = a.encoder.snapshot(), best_f = a.decoder.snapshot();
  EarlyStopping stopper(c.patience);
  std::vector<std::size_t> order(train.size());

  for (std::size_t epoch = 1; epoch <= c.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(derive_seed(seed, SeedTag::shuffle, epoch));
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += c.batch) {
      const std::size_t end = std::min(order.size(), start + c.batch);
      nn::Batch x;
      x.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) x.push_back(train[order[i]]);
      a.zero_grad();
      const auto y = a.forward(x, nn::Mode::train);
      const double loss = nn::mae_loss(x, y) + c.lambda * a.squared_norm();
      if (!std::isfinite(loss)) throw DivergenceError("autoencoder training loss is not finite", epoch, "ae");
      a.backward(nn::mae_grad(x, y));
      nn::accumulate_l2(a.encoder, c.lambda);
      nn::accumulate_l2(a.decoder, c.lambda);
      adam_g.step(a.encoder);
      adam_f.step(a.decoder);
      epoch_loss += loss * static_cast<double>(end - start);
    }
    r.train_loss.push_back(epoch_loss / static_cast<double>(train.size()));

    const double v = mean_score(a, val);
    if (!std::isfinite(v)) throw DivergenceError("autoencoder validation loss is not finite", epoch, "ae");
    r.val_loss.push_back(v);
    r.stopped_epoch = epoch;
    const bool stop = stopper.update(v);
    if (stopper.improved()) {
      best_g = a.encoder.snapshot();
      best_f = a.decoder.snapshot();
    }
    if (stop) break;
  }
  r.best_val = stopper.best();
  r.best_epoch = stopper.best_epoch();
  a.encoder.restore(best_g);
  a.decoder.restore(best_f);
  return r;
}

}  // namespace nldd::ae
