#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "nldd/error.hpp"
#include "nldd/nn/tensor.hpp"

namespace nldd::nn {

/// How per-sample losses over a batch are combined.
enum class Reduction { mean, sum };

inline double mae_loss(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractError("mae_loss: size mismatch");
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
  return acc / static_cast<double>(x.size());
}

/// Batch MAE: per-sample MAE combined by `reduction`.
inline double mae_loss(const Batch& target, const Batch& output, Reduction reduction = Reduction::mean) {
  if (target.size() != output.size()) throw ContractError("mae_loss: batch size mismatch");
  double acc = 0.0;
  for (std::size_t b = 0; b < target.size(); ++b) acc += mae_loss(target[b].values, output[b].values);
  if (reduction == Reduction::mean && !target.empty()) acc /= static_cast<double>(target.size());
  return acc;
}

/// d(batch MAE)/d(output); sign(0) = 0.
inline Batch mae_grad(const Batch& target, const Batch& output, Reduction reduction = Reduction::mean) {
  if (target.size() != output.size()) throw ContractError("mae_grad: batch size mismatch");
  Batch g;
  g.reserve(output.size());
  const double batch_scale = reduction == Reduction::mean && !output.empty() ? 1.0 / static_cast<double>(output.size()) : 1.0;
  for (std::size_t b = 0; b < output.size(); ++b) {
    if (target[b].size() != output[b].size()) throw ContractError("mae_grad: shape mismatch");
    FeatureMap gb(output[b].frames, output[b].length);
    const double scale = batch_scale / static_cast<double>(std::max<std::size_t>(1, output[b].size()));
    for (std::size_t i = 0; i < gb.size(); ++i) {
      const double d = output[b].values[i] - target[b].values[i];
      gb.values[i] = d > 0.0 ? scale : (d < 0.0 ? -scale : 0.0);
    }
    g.push_back(std::move(gb));
  }
  return g;
}

struct PenaltyResult {
  double value = 0.0;
  std::vector<double> grad;
};

/// lambda * ||theta||^2 and its gradient 2 lambda theta.
inline PenaltyResult l2_penalty(std::span<const double> theta, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("l2_penalty: lambda must be >= 0");
  PenaltyResult r;
  r.grad.resize(theta.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    sq += theta[i] * theta[i];
    r.grad[i] = 2.0 * lambda * theta[i];
  }
  r.value = lambda * sq;
  return r;
}

// ---------------------------------------------------------------------------
// Adversarial losses

inline constexpr double kLogClamp = 1e-7;

struct GanLosses {
  double discriminator = 0.0;
  double generator = 0.0;
};

inline double clamp_probability(double p, double eps = kLogClamp) { return std::clamp(p, eps, 1.0 - eps); }

/// Discriminator: -[mean log D(x) + mean log(1 - D(G(z)))].
/// Generator (saturating): mean log(1 - D(G(z))); non-saturating: -mean log D(G(z)).
inline GanLosses gan_losses(std::span<const double> real, std::span<const double> fake, bool non_saturating = false,
                            double eps = kLogClamp) {
  if (real.empty() || fake.empty()) throw DomainError("gan_losses: empty output list");
  double lr = 0.0, lf = 0.0, lg = 0.0;
  for (double p : real) lr += std::log(clamp_probability(p, eps));
  for (double p : fake) {
    const double q = clamp_probability(p, eps);
    lf += std::log(1.0 - q);
    lg += non_saturating ? -std::log(q) : std::log(1.0 - q);
  }
  const double nr = static_cast<double>(real.size()), nf = static_cast<double>(fake.size());
  return {-(lr / nr + lf / nf), lg / nf};
}

/// Generator loss alone, same convention as gan_losses.
inline double generator_loss(std::span<const double> fake, bool non_saturating = false, double eps = kLogClamp) {
  if (fake.empty()) throw DomainError("generator_loss: empty output list");
  double lg = 0.0;
  for (double p : fake) {
    const double q = clamp_probability(p, eps);
    lg += non_saturating ? -std::log(q) : std::log(1.0 - q);
  }
  return lg / static_cast<double>(fake.size());
}

namespace detail {
inline bool clamped(double p, double eps) { return p < eps || p > 1.0 - eps; }
}  // namespace detail

/// d(discriminator loss)/dD for the real and fake outputs.
inline std::pair<std::vector<double>, std::vector<double>> discriminator_loss_grad(std::span<const double> real,
                                                                                   std::span<const double> fake,
                                                                                   double eps = kLogClamp) {
  std::vector<double> gr(real.size()), gf(fake.size());
  const double nr = static_cast<double>(real.size()), nf = static_cast<double>(fake.size());
  for (std::size_t i = 0; i < real.size(); ++i) gr[i] = detail::clamped(real[i], eps) ? 0.0 : -1.0 / (nr * real[i]);
  for (std::size_t i = 0; i < fake.size(); ++i)
    gf[i] = detail::clamped(fake[i], eps) ? 0.0 : 1.0 / (nf * (1.0 - fake[i]));
  return {gr, gf};
}

/// d(generator loss)/dD(G(z)).
inline std::vector<double> generator_loss_grad(std::span<const double> fake, bool non_saturating = false,
                                               double eps = kLogClamp) {
  std::vector<double> g(fake.size());
  const double nf = static_cast<double>(fake.size());
  for (std::size_t i = 0; i < fake.size(); ++i) {
    if (detail::clamped(fake[i], eps)) continue;
    g[i] = non_saturating ? -1.0 / (nf * fake[i]) : -1.0 / (nf * (1.0 - fake[i]));
  }
  return g;
}

}  // namespace nldd::nn
