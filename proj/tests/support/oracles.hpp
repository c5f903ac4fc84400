#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the library's kernels.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "nldd/nn/network.hpp"

namespace oracle {

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline std::size_t same_pad_left(std::size_t len, std::size_t kernel, std::size_t stride) {
  const long out = (static_cast<long>(len) + static_cast<long>(stride) - 1) / static_cast<long>(stride);
  const long total = std::max<long>((out - 1) * static_cast<long>(stride) + static_cast<long>(kernel) - static_cast<long>(len), 0);
  return static_cast<std::size_t>(total / 2);
}

/// Nested-loop "same" convolution. x[c][t], w[f][c][k], result y[f][j].
inline std::vector<double> conv(const std::vector<double>& x, std::size_t in_frames, std::size_t len,
                                const std::vector<double>& w, const std::vector<double>& b, std::size_t filters,
                                std::size_t kernel, std::size_t stride) {
  const std::size_t out = (len + stride - 1) / stride;
  const long pad = static_cast<long>(same_pad_left(len, kernel, stride));
  std::vector<double> y(filters * out, 0.0);
  for (std::size_t f = 0; f < filters; ++f)
    for (std::size_t j = 0; j < out; ++j) {
      double acc = b[f];
      for (std::size_t c = 0; c < in_frames; ++c)
        for (std::size_t k = 0; k < kernel; ++k) {
          const long t = static_cast<long>(j * stride + k) - pad;
          if (t < 0 || t >= static_cast<long>(len)) continue;
          acc += w[(f * in_frames + c) * kernel + k] * x[c * len + static_cast<std::size_t>(t)];
        }
      y[f * out + j] = acc;
    }
  return y;
}

/// Nested-loop transposed convolution: scatter of every input sample through
/// the kernel. x[c][j], w[c][f][k], result y[f][t] with t < len * stride.
inline std::vector<double> tconv(const std::vector<double>& x, std::size_t in_frames, std::size_t len,
                                 const std::vector<double>& w, const std::vector<double>& b, std::size_t filters,
                                 std::size_t kernel, std::size_t stride) {
  const std::size_t out = len * stride;
  const long pad = static_cast<long>(same_pad_left(out, kernel, stride));
  std::vector<double> y(filters * out, 0.0);
  for (std::size_t f = 0; f < filters; ++f)
    for (std::size_t t = 0; t < out; ++t) y[f * out + t] = b[f];
  for (std::size_t c = 0; c < in_frames; ++c)
    for (std::size_t j = 0; j < len; ++j)
      for (std::size_t f = 0; f < filters; ++f)
        for (std::size_t k = 0; k < kernel; ++k) {
          const long t = static_cast<long>(j * stride + k) - pad;
          if (t < 0 || t >= static_cast<long>(out)) continue;
          y[f * out + static_cast<std::size_t>(t)] += w[(c * filters + f) * kernel + k] * x[c * len + j];
        }
  return y;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Relative error with a floor on the denominator so that gradients that are
/// zero up to rounding do not dominate.
inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

/// Compares the gradients stored in `params` with central differences of
/// loss(), using h = 1e-5 * max(1, |theta|). Returns the worst relative error.
inline double finite_difference_check(const std::vector<nldd::nn::Param*>& params, const std::function<double()>& loss) {
  double worst = 0.0;
  for (auto* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double theta = p->value[i];
      const double h = 1e-5 * std::max(1.0, std::abs(theta));
      p->value[i] = theta + h;
      const double lp = loss();
      p->value[i] = theta - h;
      const double lm = loss();
      p->value[i] = theta;
      worst = std::max(worst, relative_error(p->grad[i], (lp - lm) / (2.0 * h)));
    }
  }
  return worst;
}

/// Biases start at zero, which puts dropped-out windows exactly on the leaky
/// ReLU kink. Random biases move the check to a differentiable point.
inline void randomize_biases(const std::vector<nldd::nn::Param*>& params, std::mt19937_64& rng) {
  for (auto* p : params)
    if (p->name.ends_with("bias")) p->value = random_vector(p->value.size(), rng, 0.5);
}

/// Holds an input batch as a parameter so its gradient can be checked too.
struct InputParam {
  nldd::nn::Param param;
  nldd::nn::Shape shape;

  InputParam(nldd::nn::Shape s, std::size_t batch, std::mt19937_64& rng, double scale = 1.0) : shape(s) {
    param.name = "input";
    param.value = random_vector(batch * s.size(), rng, scale);
    param.grad.assign(param.value.size(), 0.0);
  }

  nldd::nn::Batch batch() const {
    nldd::nn::Batch b;
    const std::size_t n = param.value.size() / shape.size();
    for (std::size_t i = 0; i < n; ++i)
      b.emplace_back(shape.frames, shape.length,
                     std::vector<double>(param.value.begin() + static_cast<std::ptrdiff_t>(i * shape.size()),
                                         param.value.begin() + static_cast<std::ptrdiff_t>((i + 1) * shape.size())));
    return b;
  }

  void set_grad(const nldd::nn::Batch& g) {
    for (std::size_t i = 0; i < g.size(); ++i)
      std::copy(g[i].values.begin(), g[i].values.end(), param.grad.begin() + static_cast<std::ptrdiff_t>(i * shape.size()));
  }
};

/// A small random stack exercising every layer kind and activation.
struct RandomNet {
  nldd::nn::Shape input;
  std::vector<nldd::nn::LayerSpec> specs;
};

inline RandomNet random_net(std::mt19937_64& rng) {
  using namespace nldd::nn;
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  auto act = [&] { return static_cast<Activation>(pick(0, 2)); };
  RandomNet r;
  r.input = {pick(1, 3), pick(5, 14)};
  r.specs.push_back(ConvSpec{pick(1, 5), pick(1, 4), pick(1, 3), false, act(), 0.2});
  r.specs.push_back(PoolSpec{pick(1, 3)});
  r.specs.push_back(ConvSpec{pick(1, 4), pick(1, 3), pick(1, 2), true, act(), 0.2});
  r.specs.push_back(DropoutSpec{0.3});
  r.specs.push_back(ConvSpec{pick(1, 4), pick(1, 3), pick(1, 2), false, act(), 0.2});
  const std::size_t units = pick(2, 6);
  r.specs.push_back(DenseSpec{units, act(), 0.2});
  r.specs.push_back(ReshapeSpec{1, units});
  r.specs.push_back(ConvSpec{pick(1, 3), 1, pick(1, 2), true, Activation::sigmoid, 0.2});
  return r;
}

}  // namespace oracle
