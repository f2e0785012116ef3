// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Element-wise reference cell steps shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <vector>

#include "reqrnn/nn.hpp"

namespace reqrnn_test {

using reqrnn::GruLayerParams;
using reqrnn::LstmLayerParams;
using reqrnn::Vector;

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Straight-line LSTM step, element by element from the gate equations.
inline void lstm_oracle(const LstmLayerParams& p, const Vector& x, const Vector& h_prev,
                        const Vector& c_prev, Vector& h, Vector& c) {
  const std::size_t H = h_prev.size();
  const std::size_t N = x.size();
  h = Vector(H);
  c = Vector(H);
  for (std::size_t j = 0; j < H; ++j) {
    double af = p.b_f[j], ai = p.b_i[j], ao = p.b_o[j], ag = p.b_c[j];
    for (std::size_t k = 0; k < H; ++k) {
      af += p.w_f(j, k) * h_prev[k];
      ai += p.w_i(j, k) * h_prev[k];
      ao += p.w_o(j, k) * h_prev[k];
      ag += p.w_c(j, k) * h_prev[k];
    }
    for (std::size_t k = 0; k < N; ++k) {
      af += p.w_f(j, H + k) * x[k];
      ai += p.w_i(j, H + k) * x[k];
      ao += p.w_o(j, H + k) * x[k];
      ag += p.w_c(j, H + k) * x[k];
    }
    c[j] = sig(af) * c_prev[j] + sig(ai) * std::tanh(ag);
    h[j] = sig(ao) * std::tanh(c[j]);
  }
}

inline Vector gru_oracle(const GruLayerParams& p, const Vector& x, const Vector& h_prev) {
  const std::size_t H = h_prev.size();
  const std::size_t N = x.size();
  std::vector<double> z(H), r(H);
  for (std::size_t j = 0; j < H; ++j) {
    double az = 0, ar = 0;
    for (std::size_t k = 0; k < N; ++k) {
      az += p.u_z(j, k) * x[k];
      ar += p.u_r(j, k) * x[k];
    }
    for (std::size_t k = 0; k < H; ++k) {
      az += p.w_z(j, k) * h_prev[k];
      ar += p.w_r(j, k) * h_prev[k];
    }
    z[j] = sig(az);
    r[j] = sig(ar);
  }
  Vector h(H);
  for (std::size_t j = 0; j < H; ++j) {
    double as = 0;
    for (std::size_t k = 0; k < N; ++k) as += p.u_s(j, k) * x[k];
    for (std::size_t k = 0; k < H; ++k) as += p.w_s(j, k) * (h_prev[k] * r[k]);
    h[j] = (1 - z[j]) * std::tanh(as) + z[j] * h_prev[j];
  }
  return h;
}

}  // namespace reqrnn_test
