#pragma once

// Sequential layer stack with cached forward passes and reverse-mode
// gradients. Gradients accumulate across backward calls until zero_grad().

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nldd/error.hpp"
#include "nldd/nn/adam.hpp"
#include "nldd/nn/kernels.hpp"
#include "nldd/nn/tensor.hpp"
#include "nldd/time_series.hpp"

namespace nldd::nn {

enum class Mode { train, infer };

struct ConvSpec {
  std::size_t kernel = 1;
  std::size_t filters = 1;
  std::size_t stride = 1;
  bool transposed = false;
  Activation activation = Activation::leaky_relu;
  double slope = 0.2;
  bool operator==(const ConvSpec&) const = default;
};

/// Dense layer over the flattened input; output shape is 1 x units.
/// `inputs` = 0 means "infer from the incoming shape".
struct DenseSpec {
  std::size_t units = 1;
  Activation activation = Activation::linear;
  double slope = 0.2;
  std::size_t inputs = 0;
  bool operator==(const DenseSpec&) const = default;
};

struct PoolSpec {
  std::size_t width = 2;
  bool operator==(const PoolSpec&) const = default;
};

struct DropoutSpec {
  double p = 0.3;
  bool operator==(const DropoutSpec&) const = default;
};

struct ReshapeSpec {
  std::size_t frames = 1;
  std::size_t length = 1;
  bool operator==(const ReshapeSpec&) const = default;
};

using LayerSpec = std::variant<ConvSpec, DenseSpec, PoolSpec, DropoutSpec, ReshapeSpec>;

/// A trainable tensor with its accumulated gradient.
struct Param {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;
};

// ---------------------------------------------------------------------------

class Layer {
 public:
  virtual ~Layer() = default;
  virtual LayerSpec spec() const = 0;
  virtual Shape input_shape() const = 0;
  virtual Shape output_shape() const = 0;
  virtual Batch forward(const Batch& x, Mode mode) = 0;
  /// Returns d(loss)/d(input) when want_input_grad, else an empty batch.
  virtual Batch backward(const Batch& dy, bool param_grads, bool want_input_grad) = 0;
  virtual std::vector<Param*> params() { return {}; }
  virtual std::unique_ptr<Layer> clone() const = 0;

 protected:
  void check_cache(const Batch& dy, std::size_t cached) const {
    if (cached == 0) throw ContractError("backward called without a cached forward pass");
    if (dy.size() != cached) throw ContractError("backward batch size differs from the cached forward pass");
  }
  static void check_input(const Batch& x, const Shape& s, const char* who) {
    for (const auto& m : x) {
      if (m.frames != s.frames || m.length != s.length) {
        std::ostringstream os;
        os << who << ": expected input " << to_string(s) << ", got " << m.frames << "x" << m.length;
        throw ContractError(os.str());
      }
    }
  }
};

namespace detail {

inline void init_uniform(std::vector<double>& w, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-limit, limit);
  for (auto& v : w) v = u(rng);
}

/// He-uniform for Leaky-ReLU layers, Xavier-uniform otherwise.
inline double init_limit(Activation act, std::size_t fan_in, std::size_t fan_out) {
  if (act == Activation::leaky_relu) return std::sqrt(6.0 / static_cast<double>(fan_in));
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace detail

class ConvLayer final : public Layer {
 public:
  ConvLayer(const ConvSpec& spec, Shape in, std::mt19937_64& rng) : spec_(spec), in_(in) {
    if (spec.kernel == 0 || spec.filters == 0 || spec.stride == 0)
      throw ContractError("conv layer: kernel, filters and stride must be >= 1");
    const std::size_t n = in.frames * spec.filters * spec.kernel;
    weights_ = {spec.transposed ? "tconv.weights" : "conv.weights",
                spec.transposed ? std::vector<std::size_t>{in.frames, spec.filters, spec.kernel}
                                : std::vector<std::size_t>{spec.filters, in.frames, spec.kernel},
                std::vector<double>(n), std::vector<double>(n, 0.0)};
    bias_ = {spec.transposed ? "tconv.bias" : "conv.bias", {spec.filters}, std::vector<double>(spec.filters, 0.0),
             std::vector<double>(spec.filters, 0.0)};
    detail::init_uniform(weights_.value,
                         detail::init_limit(spec.activation, in.frames * spec.kernel, spec.filters * spec.kernel), rng);
  }

  LayerSpec spec() const override { return spec_; }
  Shape input_shape() const override { return in_; }
  Shape output_shape() const override {
    return {spec_.filters, spec_.transposed ? in_.length * spec_.stride : (in_.length + spec_.stride - 1) / spec_.stride};
  }
  std::vector<Param*> params() override { return {&weights_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ConvLayer>(*this); }

  Batch forward(const Batch& x, Mode) override {
    check_input(x, in_, "conv layer");
    const Shape out = output_shape();
    const auto g = geometry();
    input_ = x;
    pre_.assign(x.size(), FeatureMap());
    Batch y(x.size());
    for (std::size_t b = 0; b < x.size(); ++b) {
      FeatureMap z(out.frames, out.length);
      if (spec_.transposed)
        correlate_adjoint(g, weights_.value, x[b].values, z.values);
      else
        correlate(g, weights_.value, x[b].values, z.values);
      for (std::size_t f = 0; f < out.frames; ++f)
        for (auto& v : z.frame(f)) v += bias_.value[f];
      y[b] = z;
      for (std::size_t i = 0; i < z.size(); ++i) y[b].values[i] = activate(spec_.activation, z.values[i], spec_.slope);
      pre_[b] = std::move(z);
    }
    output_ = y;
    return y;
  }

  Batch backward(const Batch& dy, bool param_grads, bool want_input_grad) override {
    check_cache(dy, input_.size());
    const auto g = geometry();
    Batch dx;
    if (want_input_grad) dx.resize(dy.size());
    for (std::size_t b = 0; b < dy.size(); ++b) {
      FeatureMap dz = dy[b];
      for (std::size_t i = 0; i < dz.size(); ++i)
        dz.values[i] *= activate_grad(spec_.activation, pre_[b].values[i], output_[b].values[i], spec_.slope);
      if (param_grads) {
        for (std::size_t f = 0; f < spec_.filters; ++f) {
          double s = 0.0;
          for (double v : dz.frame(f)) s += v;
          bias_.grad[f] += s;
        }
        if (spec_.transposed)
          correlate_weight_grad(g, dz.values, input_[b].values, weights_.grad);
        else
          correlate_weight_grad(g, input_[b].values, dz.values, weights_.grad);
      }
      if (want_input_grad) {
        dx[b] = FeatureMap(in_.frames, in_.length);
        if (spec_.transposed)
          correlate(g, weights_.value, dz.values, dx[b].values);
        else
          correlate_adjoint(g, weights_.value, dz.values, dx[b].values);
      }
    }
    return dx;
  }

 private:
  // For a transposed layer this is the geometry of the underlying regular
  // convolution (filters -> in frames).
  CorrelationGeometry geometry() const {
    if (spec_.transposed) return {spec_.filters, in_.frames, spec_.kernel, spec_.stride, in_.length * spec_.stride};
    return {in_.frames, spec_.filters, spec_.kernel, spec_.stride, in_.length};
  }

  ConvSpec spec_;
  Shape in_;
  Param weights_, bias_;
  Batch input_, pre_, output_;
};

class DenseLayer final : public Layer {
 public:
  DenseLayer(const DenseSpec& spec, Shape in, std::mt19937_64& rng) : spec_(spec), in_(in) {
    if (spec.units == 0) throw ContractError("dense layer: units must be >= 1");
    spec_.inputs = in.size();
    const std::size_t n = spec.units * in.size();
    weights_ = {"dense.weights", {spec.units, in.size()}, std::vector<double>(n), std::vector<double>(n, 0.0)};
    bias_ = {"dense.bias", {spec.units}, std::vector<double>(spec.units, 0.0), std::vector<double>(spec.units, 0.0)};
    detail::init_uniform(weights_.value, detail::init_limit(spec.activation, in.size(), spec.units), rng);
  }

  LayerSpec spec() const override { return spec_; }
  Shape input_shape() const override { return in_; }
  Shape output_shape() const override { return {1, spec_.units}; }
  std::vector<Param*> params() override { return {&weights_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<DenseLayer>(*this); }

  Batch forward(const Batch& x, Mode) override {
    check_input(x, in_, "dense layer");
    input_ = x;
    pre_.assign(x.size(), FeatureMap());
    Batch y(x.size());
    const auto rows = static_cast<Eigen::Index>(spec_.units), cols = static_cast<Eigen::Index>(in_.size());
    nn::detail::ConstMatrixMap w(weights_.value.data(), rows, cols);
    for (std::size_t b = 0; b < x.size(); ++b) {
      FeatureMap z(1, spec_.units);
      Eigen::Map<const Eigen::VectorXd> xv(x[b].values.data(), cols);
      Eigen::Map<Eigen::VectorXd> zv(z.values.data(), rows);
      zv.noalias() = w * xv;
      for (std::size_t i = 0; i < spec_.units; ++i) z.values[i] += bias_.value[i];
      y[b] = z;
      for (auto& v : y[b].values) v = activate(spec_.activation, v, spec_.slope);
      pre_[b] = std::move(z);
    }
    output_ = y;
    return y;
  }

  Batch backward(const Batch& dy, bool param_grads, bool want_input_grad) override {
    check_cache(dy, input_.size());
    const auto rows = static_cast<Eigen::Index>(spec_.units), cols = static_cast<Eigen::Index>(in_.size());
    nn::detail::ConstMatrixMap w(weights_.value.data(), rows, cols);
    nn::detail::MatrixMap gw(weights_.grad.data(), rows, cols);
    Batch dx;
    if (want_input_grad) dx.resize(dy.size());
    for (std::size_t b = 0; b < dy.size(); ++b) {
      std::vector<double> dz(dy[b].values);
      for (std::size_t i = 0; i < dz.size(); ++i)
        dz[i] *= activate_grad(spec_.activation, pre_[b].values[i], output_[b].values[i], spec_.slope);
      Eigen::Map<const Eigen::VectorXd> dzv(dz.data(), rows);
      if (param_grads) {
        Eigen::Map<const Eigen::VectorXd> xv(input_[b].values.data(), cols);
        gw.noalias() += dzv * xv.transpose();
        for (std::size_t i = 0; i < dz.size(); ++i) bias_.grad[i] += dz[i];
      }
      if (want_input_grad) {
        dx[b] = FeatureMap(in_.frames, in_.length);
        Eigen::Map<Eigen::VectorXd> dxv(dx[b].values.data(), cols);
        dxv.noalias() = w.transpose() * dzv;
      }
    }
    return dx;
  }

 private:
  DenseSpec spec_;
  Shape in_;
  Param weights_, bias_;
  Batch input_, pre_, output_;
};

class PoolLayer final : public Layer {
 public:
  PoolLayer(const PoolSpec& spec, Shape in) : spec_(spec), in_(in) {
    if (spec.width == 0) throw ContractError("pool layer: width must be >= 1");
  }
  LayerSpec spec() const override { return spec_; }
  Shape input_shape() const override { return in_; }
  Shape output_shape() const override { return {in_.frames, (in_.length + spec_.width - 1) / spec_.width}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<PoolLayer>(*this); }

  Batch forward(const Batch& x, Mode) override {
    check_input(x, in_, "pool layer");
    Batch y(x.size());
    argmax_.assign(x.size(), {});
    for (std::size_t b = 0; b < x.size(); ++b) {
      auto r = maxpool1d(x[b], spec_.width);
      y[b] = std::move(r.output);
      argmax_[b] = std::move(r.argmax);
    }
    cached_ = x.size();
    return y;
  }

  /// Routes each upstream gradient to its block's argmax.
  Batch backward(const Batch& dy, bool, bool want_input_grad) override {
    check_cache(dy, cached_);
    Batch dx;
    if (!want_input_grad) return dx;
    const Shape out = output_shape();
    dx.resize(dy.size());
    for (std::size_t b = 0; b < dy.size(); ++b) {
      dx[b] = FeatureMap(in_.frames, in_.length);
      for (std::size_t f = 0; f < in_.frames; ++f)
        for (std::size_t j = 0; j < out.length; ++j) dx[b](f, argmax_[b][f * out.length + j]) += dy[b](f, j);
    }
    return dx;
  }

 private:
  PoolSpec spec_;
  Shape in_;
  std::vector<std::vector<std::size_t>> argmax_;
  std::size_t cached_ = 0;
};

class DropoutLayer final : public Layer {
 public:
  DropoutLayer(const DropoutSpec& spec, Shape in, std::uint64_t seed) : spec_(spec), in_(in), rng_(seed) {
    check_dropout_probability(spec.p);
  }
  LayerSpec spec() const override { return spec_; }
  Shape input_shape() const override { return in_; }
  Shape output_shape() const override { return in_; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<DropoutLayer>(*this); }

  Batch forward(const Batch& x, Mode mode) override {
    check_input(x, in_, "dropout layer");
    cached_ = x.size();
    masks_.clear();
    if (mode == Mode::infer || spec_.p == 0.0) return x;
    Batch y = x;
    for (auto& m : y) {
      masks_.push_back(dropout_mask(m.size(), spec_.p, rng_));
      for (std::size_t i = 0; i < m.size(); ++i) m.values[i] *= masks_.back()[i];
    }
    return y;
  }

  Batch backward(const Batch& dy, bool, bool want_input_grad) override {
    check_cache(dy, cached_);
    if (!want_input_grad) return {};
    if (masks_.empty()) return dy;
    Batch dx = dy;
    for (std::size_t b = 0; b < dx.size(); ++b)
      for (std::size_t i = 0; i < dx[b].size(); ++i) dx[b].values[i] *= masks_[b][i];
    return dx;
  }

  void reseed(std::uint64_t seed) { rng_.seed(seed); }

 private:
  DropoutSpec spec_;
  Shape in_;
  std::mt19937_64 rng_;
  std::vector<std::vector<double>> masks_;
  std::size_t cached_ = 0;
};

class ReshapeLayer final : public Layer {
 public:
  ReshapeLayer(const ReshapeSpec& spec, Shape in) : spec_(spec), in_(in) {
    if (spec.frames * spec.length != in.size()) {
      std::ostringstream os;
      os << "reshape layer: cannot reshape " << to_string(in) << " into " << spec.frames << "x" << spec.length;
      throw ContractError(os.str());
    }
  }
  LayerSpec spec() const override { return spec_; }
  Shape input_shape() const override { return in_; }
  Shape output_shape() const override { return {spec_.frames, spec_.length}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ReshapeLayer>(*this); }

  Batch forward(const Batch& x, Mode) override {
    check_input(x, in_, "reshape layer");
    cached_ = x.size();
    Batch y;
    y.reserve(x.size());
    for (const auto& m : x) y.emplace_back(spec_.frames, spec_.length, m.values);
    return y;
  }
  Batch backward(const Batch& dy, bool, bool want_input_grad) override {
    check_cache(dy, cached_);
    Batch dx;
    if (!want_input_grad) return dx;
    dx.reserve(dy.size());
    for (const auto& m : dy) dx.emplace_back(in_.frames, in_.length, m.values);
    return dx;
  }

 private:
  ReshapeSpec spec_;
  Shape in_;
  std::size_t cached_ = 0;
};

// ---------------------------------------------------------------------------

inline std::string describe(const LayerSpec& spec) {
  std::ostringstream os;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConvSpec>) {
          os << (s.transposed ? "tconv" : "conv") << "(k=" << s.kernel << ", f=" << s.filters << ", s=" << s.stride
             << ", " << to_string(s.activation) << ")";
        } else if constexpr (std::is_same_v<T, DenseSpec>) {
          os << "dense(" << s.units << ", " << to_string(s.activation) << ")";
        } else if constexpr (std::is_same_v<T, PoolSpec>) {
          os << "maxpool(" << s.width << ")";
        } else if constexpr (std::is_same_v<T, DropoutSpec>) {
          os << "dropout(" << s.p << ")";
        } else {
          os << "reshape(" << s.frames << "x" << s.length << ")";
        }
      },
      spec);
  return os.str();
}

class Network {
 public:
  Network() = default;

  /// Builds the stack, initializing weights from `seed`. Throws ContractError
  /// naming the offending layer when shapes do not chain.
  Network(Shape input, const std::vector<LayerSpec>& specs, std::uint64_t seed, std::string name = "network")
      : name_(std::move(name)), input_(input), seed_(seed) {
    std::mt19937_64 rng(derive_seed(seed, SeedTag::init));
    Shape cur = input;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      try {
        layers_.push_back(make_layer(specs[i], cur, rng, derive_seed(seed, SeedTag::dropout, i)));
      } catch (const Error& e) {
        std::ostringstream os;
        os << name_ << " layer " << i << " " << describe(specs[i]) << ": " << e.what();
        throw ContractError(os.str());
      }
      cur = layers_.back()->output_shape();
    }
    output_ = cur;
  }

  Network(const Network& o) : name_(o.name_), input_(o.input_), output_(o.output_), seed_(o.seed_) {
    for (const auto& l : o.layers_) layers_.push_back(l->clone());
  }
  Network& operator=(const Network& o) {
    if (this != &o) {
      Network tmp(o);
      *this = std::move(tmp);
    }
    return *this;
  }
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  Batch forward(const Batch& x, Mode mode = Mode::infer) {
    Batch cur = x;
    for (auto& l : layers_) cur = l->forward(cur, mode);
    return cur;
  }

  FeatureMap forward(const FeatureMap& x) { return forward(Batch{x}, Mode::infer).front(); }

  /// Backpropagates dy from the output; accumulates parameter gradients when
  /// param_grads is set. Returns d/d(input) when want_input_grad.
  Batch backward(const Batch& dy, bool param_grads = true, bool want_input_grad = false) {
    Batch cur = dy;
    for (std::size_t i = layers_.size(); i-- > 0;) {
      const bool need_dx = i > 0 || want_input_grad;
      cur = layers_[i]->backward(cur, param_grads, need_dx);
    }
    return cur;
  }

  void zero_grad() {
    for (auto* p : params()) std::fill(p->grad.begin(), p->grad.end(), 0.0);
  }

  std::vector<Param*> params() {
    std::vector<Param*> out;
    for (auto& l : layers_)
      for (auto* p : l->params()) out.push_back(p);
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_)
      for (auto* p : l->params()) n += p->value.size();
    return n;
  }

  /// Copies of all parameter values, in params() order.
  std::vector<std::vector<double>> snapshot() const {
    std::vector<std::vector<double>> out;
    for (const auto& l : layers_)
      for (auto* p : l->params()) out.push_back(p->value);
    return out;
  }

  void restore(const std::vector<std::vector<double>>& values) {
    auto ps = params();
    if (values.size() != ps.size()) throw ContractError("restore: tensor count mismatch");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (values[i].size() != ps[i]->value.size()) throw ContractError("restore: tensor size mismatch");
      ps[i]->value = values[i];
    }
  }

  /// Restarts every dropout layer's mask stream.
  void reseed_dropout(std::uint64_t seed) {
    for (std::size_t i = 0; i < layers_.size(); ++i)
      if (auto* d = dynamic_cast<DropoutLayer*>(layers_[i].get())) d->reseed(derive_seed(seed, SeedTag::dropout, i));
  }

  std::vector<LayerSpec> specs() const {
    std::vector<LayerSpec> out;
    for (const auto& l : layers_) out.push_back(l->spec());
    return out;
  }

  const std::string& name() const noexcept { return name_; }
  Shape input_shape() const noexcept { return input_; }
  Shape output_shape() const noexcept { return output_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t layer_count() const noexcept { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }

 private:
  static std::unique_ptr<Layer> make_layer(const LayerSpec& spec, Shape in, std::mt19937_64& rng,
                                           std::uint64_t dropout_seed) {
    return std::visit(
        [&](const auto& s) -> std::unique_ptr<Layer> {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, ConvSpec>) {
            return std::make_unique<ConvLayer>(s, in, rng);
          } else if constexpr (std::is_same_v<T, DenseSpec>) {
            if (s.inputs != 0 && s.inputs != in.size()) {
              std::ostringstream os;
              os << "declared " << s.inputs << " inputs but receives " << in.size() << " (" << to_string(in) << ")";
              throw ContractError(os.str());
            }
            return std::make_unique<DenseLayer>(s, in, rng);
          } else if constexpr (std::is_same_v<T, PoolSpec>) {
            return std::make_unique<PoolLayer>(s, in);
          } else if constexpr (std::is_same_v<T, DropoutSpec>) {
            return std::make_unique<DropoutLayer>(s, in, dropout_seed);
          } else {
            return std::make_unique<ReshapeLayer>(s, in);
          }
        },
        spec);
  }

  std::string name_;
  Shape input_;
  Shape output_;
  std::uint64_t seed_ = 0;
  std::vector<std::unique_ptr<Layer>> layers_;
};

// ---------------------------------------------------------------------------

/// ADAM over every parameter tensor of a network.
class Adam {
 public:
  Adam() = default;
  Adam(Network& net, AdamOptions opt) : options_(opt) {
    for (auto* p : net.params()) {
      OptimizerState st;
      st.options = opt;
      st.m.assign(p->value.size(), 0.0);
      st.v.assign(p->value.size(), 0.0);
      states_.push_back(std::move(st));
    }
  }

  /// Applies one update from the accumulated gradients.
  void step(Network& net) {
    auto ps = net.params();
    if (ps.size() != states_.size()) throw ContractError("Adam: network does not match optimizer state");
    for (std::size_t i = 0; i < ps.size(); ++i) adam_step(ps[i]->value, ps[i]->grad, states_[i]);
  }

  const AdamOptions& options() const noexcept { return options_; }
  std::uint64_t steps() const noexcept { return states_.empty() ? 0 : states_.front().step; }

 private:
  AdamOptions options_;
  std::vector<OptimizerState> states_;
};

/// Adds the gradient of lambda * ||theta||^2 to every parameter gradient.
inline void accumulate_l2(Network& net, double lambda) {
  if (lambda == 0.0) return;
  for (auto* p : net.params())
    for (std::size_t j = 0; j < p->value.size(); ++j) p->grad[j] += 2.0 * lambda * p->value[j];
}

/// Sum of squared parameters.
inline double squared_norm(Network& net) {
  double s = 0.0;
  for (auto* p : net.params())
    for (double v : p->value) s += v * v;
  return s;
}

}  // namespace nldd::nn
