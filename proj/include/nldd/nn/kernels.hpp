#pragma once

// Layer primitives for single samples: strided "same"-padded 1D
// cross-correlation and its adjoint (transposed convolution), max pooling,
// dense maps, activations and dropout.
//
// Convolution geometry (matches the usual "same" convention):
//   out_len   = ceil(in_len / stride)
//   pad_total = max((out_len - 1) * stride + kernel - in_len, 0)
//   pad_left  = pad_total / 2
//   y[o][j]   = b[o] + sum_c sum_k w[o][c][k] * x[c][j*stride + k - pad_left]
// with out-of-range x treated as zero.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "nldd/error.hpp"
#include "nldd/nn/tensor.hpp"

namespace nldd::nn {

enum class Activation : std::uint8_t { linear = 0, leaky_relu = 1, sigmoid = 2 };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::linear: return "linear";
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

inline double activate(Activation a, double x, double slope) noexcept {
  switch (a) {
    case Activation::leaky_relu: return x > 0.0 ? x : slope * x;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::linear: break;
  }
  return x;
}

/// Derivative expressed through the pre-activation x and output y.
inline double activate_grad(Activation a, double x, double y, double slope) noexcept {
  switch (a) {
    case Activation::leaky_relu: return x > 0.0 ? 1.0 : slope;
    case Activation::sigmoid: return y * (1.0 - y);
    case Activation::linear: break;
  }
  return 1.0;
}

inline FeatureMap activation(const FeatureMap& x, Activation kind, double slope = 0.2) {
  FeatureMap y = x;
  for (auto& v : y.values) v = activate(kind, v, slope);
  return y;
}

// ---------------------------------------------------------------------------
// Strided correlation operator Q: (in_frames x in_len) -> (out_frames x out_len)

struct CorrelationGeometry {
  std::size_t in_frames = 1;
  std::size_t out_frames = 1;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t in_len = 1;

  std::size_t out_len() const noexcept { return (in_len + stride - 1) / stride; }
  std::size_t pad_left() const noexcept {
    const std::size_t need = (out_len() - 1) * stride + kernel;
    return need > in_len ? (need - in_len) / 2 : 0;
  }
  std::size_t weight_count() const noexcept { return out_frames * in_frames * kernel; }
};

namespace detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

/// col[(c*K + k) * out_len + j] = x[c][j*s + k - pad]
inline void im2col(const CorrelationGeometry& g, const double* x, std::vector<double>& col) {
  const std::size_t lo = g.out_len(), pad = g.pad_left(), K = g.kernel, s = g.stride, L = g.in_len;
  col.assign(g.in_frames * K * lo, 0.0);
  for (std::size_t c = 0; c < g.in_frames; ++c) {
    const double* xc = x + c * L;
    for (std::size_t k = 0; k < K; ++k) {
      double* row = col.data() + (c * K + k) * lo;
      for (std::size_t j = 0; j < lo; ++j) {
        const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(j * s + k) - static_cast<std::ptrdiff_t>(pad);
        if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(L)) row[j] = xc[idx];
      }
    }
  }
}

/// Scatter-add of im2col's layout back into x.
inline void col2im(const CorrelationGeometry& g, const std::vector<double>& col, double* x) {
  const std::size_t lo = g.out_len(), pad = g.pad_left(), K = g.kernel, s = g.stride, L = g.in_len;
  for (std::size_t c = 0; c < g.in_frames; ++c) {
    double* xc = x + c * L;
    for (std::size_t k = 0; k < K; ++k) {
      const double* row = col.data() + (c * K + k) * lo;
      for (std::size_t j = 0; j < lo; ++j) {
        const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(j * s + k) - static_cast<std::ptrdiff_t>(pad);
        if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(L)) xc[idx] += row[j];
      }
    }
  }
}

}  // namespace detail

/// y = Q x (no bias). x: in_frames x in_len, w: out_frames x in_frames x kernel.
inline void correlate(const CorrelationGeometry& g, std::span<const double> w, std::span<const double> x,
                      std::span<double> y) {
  const std::size_t ck = g.in_frames * g.kernel, lo = g.out_len();
  std::vector<double> col;
  detail::im2col(g, x.data(), col);
  detail::ConstMatrixMap wm(w.data(), static_cast<Eigen::Index>(g.out_frames), static_cast<Eigen::Index>(ck));
  detail::ConstMatrixMap cm(col.data(), static_cast<Eigen::Index>(ck), static_cast<Eigen::Index>(lo));
  detail::MatrixMap ym(y.data(), static_cast<Eigen::Index>(g.out_frames), static_cast<Eigen::Index>(lo));
  ym.noalias() = wm * cm;
}

/// x += Q^T y. y: out_frames x out_len, x: in_frames x in_len.
inline void correlate_adjoint(const CorrelationGeometry& g, std::span<const double> w, std::span<const double> y,
                              std::span<double> x) {
  const std::size_t ck = g.in_frames * g.kernel, lo = g.out_len();
  detail::ConstMatrixMap wm(w.data(), static_cast<Eigen::Index>(g.out_frames), static_cast<Eigen::Index>(ck));
  detail::ConstMatrixMap ym(y.data(), static_cast<Eigen::Index>(g.out_frames), static_cast<Eigen::Index>(lo));
  std::vector<double> col(ck * lo);
  detail::MatrixMap cm(col.data(), static_cast<Eigen::Index>(ck), static_cast<Eigen::Index>(lo));
  cm.noalias() = wm.transpose() * ym;
  detail::col2im(g, col, x.data());
}

/// dw += dy * im2col(x)^T, i.e. the gradient of <dy, Q_w x> with respect to w.
inline void correlate_weight_grad(const CorrelationGeometry& g, std::span<const double> x, std::span<const double> dy,
                                  std::span<double> dw) {
  const std::size_t ck = g.in_frames * g.kernel, lo = g.out_len();
  std::vector<double> col;
  detail::im2col(g, x.data(), col);
  detail::ConstMatrixMap cm(col.data(), static_cast<Eigen::Index>(ck), static_cast<Eigen::Index>(lo));
  detail::ConstMatrixMap dym(dy.data(), static_cast<Eigen::Index>(g.out_frames), static_cast<Eigen::Index>(lo));
  detail::MatrixMap dwm(dw.data(), static_cast<Eigen::Index>(g.out_frames), static_cast<Eigen::Index>(ck));
  dwm.noalias() += dym * cm.transpose();
}

// ---------------------------------------------------------------------------
// Convolution layers as free functions

/// Weights and biases of a (transposed) convolution.
///
/// Regular convolution: weights[filter][in_frame][k], bias[filter].
/// Transposed convolution: weights[in_frame][filter][k], bias[filter]; the
/// layer is the adjoint of a regular convolution with in/out swapped.
struct ConvParams {
  std::size_t in_frames = 1;
  std::size_t filters = 1;
  std::size_t kernel = 1;
  std::vector<double> weights;
  std::vector<double> bias;

  void check() const {
    if (in_frames == 0 || filters == 0 || kernel == 0) throw ContractError("conv: zero-sized parameter tensor");
    if (weights.size() != in_frames * filters * kernel) throw ContractError("conv: weight count mismatch");
    if (bias.size() != filters) throw ContractError("conv: bias count mismatch");
  }
};

inline CorrelationGeometry conv_geometry(const ConvParams& p, std::size_t stride, std::size_t in_len) {
  return {p.in_frames, p.filters, p.kernel, stride, in_len};
}

/// Geometry of the regular convolution whose adjoint is the transposed layer.
inline CorrelationGeometry transposed_geometry(const ConvParams& p, std::size_t stride, std::size_t in_len) {
  return {p.filters, p.in_frames, p.kernel, stride, in_len * stride};
}

inline void check_stride(std::size_t stride) {
  if (stride == 0) throw ContractError("conv: stride must be >= 1");
}

/// Same-padded strided convolution (cross-correlation) plus bias.
inline FeatureMap conv1d_forward(const FeatureMap& x, const ConvParams& p, std::size_t stride) {
  p.check();
  check_stride(stride);
  if (x.frames != p.in_frames) throw ContractError("conv1d_forward: input frames do not match layer");
  if (x.length == 0) throw ContractError("conv1d_forward: empty input");
  const auto g = conv_geometry(p, stride, x.length);
  FeatureMap y(p.filters, g.out_len());
  correlate(g, p.weights, x.values, y.values);
  for (std::size_t f = 0; f < p.filters; ++f)
    for (auto& v : y.frame(f)) v += p.bias[f];
  return y;
}

/// Transposed convolution: output length = length * stride; exact adjoint of
/// conv1d_forward (bias aside).
inline FeatureMap conv1d_transposed_forward(const FeatureMap& x, const ConvParams& p, std::size_t stride) {
  p.check();
  check_stride(stride);
  if (x.frames != p.in_frames) throw ContractError("conv1d_transposed_forward: input frames do not match layer");
  if (x.length == 0) throw ContractError("conv1d_transposed_forward: empty input");
  const auto g = transposed_geometry(p, stride, x.length);
  FeatureMap y(p.filters, g.in_len);
  correlate_adjoint(g, p.weights, x.values, y.values);
  for (std::size_t f = 0; f < p.filters; ++f)
    for (auto& v : y.frame(f)) v += p.bias[f];
  return y;
}

// ---------------------------------------------------------------------------
// Pooling

struct PoolResult {
  FeatureMap output;
  std::vector<std::size_t> argmax;  // index within the frame, per output value
};

/// Non-overlapping max pooling of width W; a trailing partial block is
/// pooled over its actual extent.
inline PoolResult maxpool1d(const FeatureMap& x, std::size_t width) {
  if (width == 0) throw ContractError("maxpool1d: width must be >= 1");
  const std::size_t lo = (x.length + width - 1) / width;
  PoolResult r{FeatureMap(x.frames, lo), std::vector<std::size_t>(x.frames * lo)};
  for (std::size_t f = 0; f < x.frames; ++f) {
    const auto in = x.frame(f);
    for (std::size_t j = 0; j < lo; ++j) {
      const std::size_t begin = j * width, end = std::min(begin + width, x.length);
      std::size_t best = begin;
      for (std::size_t s = begin + 1; s < end; ++s)
        if (in[s] > in[best]) best = s;
      r.output(f, j) = in[best];
      r.argmax[f * lo + j] = best;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Dense

/// weights[out][in] row-major.
struct DenseParams {
  std::size_t inputs = 1;
  std::size_t outputs = 1;
  std::vector<double> weights;
  std::vector<double> bias;

  void check() const {
    if (weights.size() != inputs * outputs) throw ContractError("dense: weight count mismatch");
    if (bias.size() != outputs) throw ContractError("dense: bias count mismatch");
  }
};

/// W x + b followed by the activation.
inline std::vector<double> dense_forward(std::span<const double> x, const DenseParams& p,
                                         Activation act = Activation::linear, double slope = 0.2) {
  p.check();
  if (x.size() != p.inputs) throw ContractError("dense_forward: input size mismatch");
  std::vector<double> y(p.outputs);
  detail::ConstMatrixMap wm(p.weights.data(), static_cast<Eigen::Index>(p.outputs), static_cast<Eigen::Index>(p.inputs));
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  yv.noalias() = wm * xv;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = activate(act, y[i] + p.bias[i], slope);
  return y;
}

// ---------------------------------------------------------------------------
// Dropout

/// Inverted dropout mask: 0 with probability p, 1/(1-p) otherwise.
inline std::vector<double> dropout_mask(std::size_t n, double p, std::mt19937_64& rng) {
  std::vector<double> mask(n, 1.0);
  if (p == 0.0) return mask;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double keep = 1.0 / (1.0 - p);
  for (auto& m : mask) m = u(rng) < p ? 0.0 : keep;
  return mask;
}

inline void check_dropout_probability(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("dropout probability must be in [0,1)");
}

inline FeatureMap dropout(const FeatureMap& x, double p, bool training, std::uint64_t seed) {
  check_dropout_probability(p);
  if (!training || p == 0.0) return x;
  std::mt19937_64 rng(seed);
  const auto mask = dropout_mask(x.size(), p, rng);
  FeatureMap y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y.values[i] *= mask[i];
  return y;
}

}  // namespace nldd::nn
