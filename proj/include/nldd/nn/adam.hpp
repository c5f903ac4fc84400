#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "nldd/error.hpp"

namespace nldd::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Moment estimates for one parameter tensor.
struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  AdamOptions options;
};

/// One ADAM update. The step counter is incremented before bias correction:
///   m = b1 m + (1-b1) g,  v = b2 v + (1-b2) g^2,
///   m^ = m / (1-b1^t),   v^ = v / (1-b2^t),
///   theta -= lr * m^ / (sqrt(v^) + eps).
inline void adam_step(std::span<double> params, std::span<const double> grads, OptimizerState& st) {
  if (params.size() != grads.size()) throw ContractError("adam_step: params/grads size mismatch");
  if (st.m.empty() && st.v.empty()) {
    st.m.assign(params.size(), 0.0);
    st.v.assign(params.size(), 0.0);
  }
  if (st.m.size() != params.size() || st.v.size() != params.size())
    throw ContractError("adam_step: optimizer state shape mismatch");
  const auto& o = st.options;
  ++st.step;
  const double t = static_cast<double>(st.step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    st.m[i] = o.beta1 * st.m[i] + (1.0 - o.beta1) * g;
    st.v[i] = o.beta2 * st.v[i] + (1.0 - o.beta2) * g * g;
    const double mhat = st.m[i] / c1;
    const double vhat = st.v[i] / c2;
    params[i] -= o.lr / (std::sqrt(vhat) + o.eps) * mhat;
  }
}

}  // namespace nldd::nn
