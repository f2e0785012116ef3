// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Padded, masked batch evaluation. Sequences are right-padded with PAD;
// at a padded step a sequence keeps its state (h, c) and contributes no
// parameter gradient, so its final state equals the state at its own last
// token.

#include <algorithm>
#include <cmath>

#include "reqrnn/error.hpp"
#include "reqrnn/nn.hpp"
#include "reqrnn/textpipe.hpp"

namespace reqrnn {
namespace {

constexpr double kProbFloor = 1e-12;

/// (t, b) -> row of a [T][B][width] buffer.
struct Grid {
  std::size_t batch;
  std::size_t width;
  std::vector<double> data;

  Grid(std::size_t steps, std::size_t b, std::size_t w) : batch(b), width(w), data(steps * b * w, 0.0) {}
  double* at(std::size_t t, std::size_t b) { return data.data() + (t * batch + b) * width; }
  const double* at(std::size_t t, std::size_t b) const { return data.data() + (t * batch + b) * width; }
};

double row_dot(const Matrix& m, std::size_t r, const double* x) {
  const double* w = m.data() + r * m.cols();
  double acc = 0.0;
  for (std::size_t c = 0; c < m.cols(); ++c) acc += w[c] * x[c];
  return acc;
}

void add_outer(Matrix& m, const double* a, const double* x) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double* w = m.data() + r * m.cols();
    for (std::size_t c = 0; c < m.cols(); ++c) w[c] += a[r] * x[c];
  }
}

void add_transposed(const Matrix& m, const double* y, double* out) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* w = m.data() + r * m.cols();
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += w[c] * y[r];
  }
}

struct LayerState {
  Grid inputs, h, c, gates, aux;
  LayerState(std::size_t T, std::size_t B, std::size_t in, std::size_t H, std::size_t ngates)
      : inputs(T, B, in), h(T, B, H), c(T, B, H), gates(T, B, ngates * H), aux(T, B, H) {}
};

}  // namespace

PaddedBatchResult padded_batch_loss_and_gradient(std::span<const std::vector<int>> sequences,
                                                 std::span<const int> labels,
                                                 std::span<const Vector> masks,
                                                 const ParameterSet& params,
                                                 const ModelConfig& config, ParameterSet& grads) {
  const std::size_t B = sequences.size();
  if (B == 0) throw ParameterError("padded batch: empty batch");
  if (labels.size() != B) throw StructuralError("padded batch: labels/sequences length mismatch");
  if (!masks.empty() && masks.size() != B) {
    throw StructuralError("padded batch: masks/sequences length mismatch");
  }
  check_shapes(params, config);
  grads = ParameterSet::zeros(config);

  const auto H = static_cast<std::size_t>(config.hidden_units);
  const bool lstm = config.cell == CellType::kLstm;
  std::vector<std::size_t> len(B);
  std::size_t T = 0;
  for (std::size_t b = 0; b < B; ++b) {
    if (sequences[b].empty()) throw StructuralError("padded batch: empty sequence");
    for (int id : sequences[b]) {
      if (id < 0 || id >= config.vocab_size) throw StructuralError("padded batch: id out of range");
    }
    len[b] = sequences[b].size();
    T = std::max(T, len[b]);
  }
  auto id_at = [&](std::size_t t, std::size_t b) {
    return t < len[b] ? sequences[b][t] : TagVocabulary::kPad;
  };
  auto active = [&](std::size_t t, std::size_t b) { return t < len[b]; };

  std::vector<LayerState> layers;
  const std::vector<double> zeros(H, 0.0);
  std::vector<double> xcat;
  for (int l = 0; l < config.num_layers; ++l) {
    const auto in = static_cast<std::size_t>(config.layer_input_dim(l));
    layers.emplace_back(T, B, in, H, lstm ? 4 : 3);
    LayerState& st = layers.back();
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t b = 0; b < B; ++b) {
        const double* src = l == 0 ? params.embedding.row(static_cast<std::size_t>(id_at(t, b))).data()
                                   : layers[static_cast<std::size_t>(l) - 1].h.at(t, b);
        std::copy(src, src + in, st.inputs.at(t, b));
      }
    }
    xcat.resize(H + in);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t b = 0; b < B; ++b) {
        const double* h_prev = t == 0 ? zeros.data() : st.h.at(t - 1, b);
        const double* c_prev = t == 0 ? zeros.data() : st.c.at(t - 1, b);
        double* h = st.h.at(t, b);
        double* c = st.c.at(t, b);
        if (!active(t, b)) {
          std::copy(h_prev, h_prev + H, h);
          std::copy(c_prev, c_prev + H, c);
          continue;
        }
        const double* x = st.inputs.at(t, b);
        double* gates = st.gates.at(t, b);
        double* aux = st.aux.at(t, b);
        if (lstm) {
          const auto& p = params.lstm[static_cast<std::size_t>(l)];
          std::copy(h_prev, h_prev + H, xcat.begin());
          std::copy(x, x + in, xcat.begin() + static_cast<std::ptrdiff_t>(H));
          for (std::size_t j = 0; j < H; ++j) {
            const double f = sigmoid(row_dot(p.w_f, j, xcat.data()) + p.b_f[j]);
            const double i = sigmoid(row_dot(p.w_i, j, xcat.data()) + p.b_i[j]);
            const double o = sigmoid(row_dot(p.w_o, j, xcat.data()) + p.b_o[j]);
            const double g = std::tanh(row_dot(p.w_c, j, xcat.data()) + p.b_c[j]);
            gates[j] = f;
            gates[H + j] = i;
            gates[2 * H + j] = o;
            gates[3 * H + j] = g;
            c[j] = f * c_prev[j] + i * g;
            aux[j] = std::tanh(c[j]);
            h[j] = o * aux[j];
          }
        } else {
          const auto& p = params.gru[static_cast<std::size_t>(l)];
          for (std::size_t j = 0; j < H; ++j) {
            gates[j] = sigmoid(row_dot(p.u_z, j, x) + row_dot(p.w_z, j, h_prev));
            gates[H + j] = sigmoid(row_dot(p.u_r, j, x) + row_dot(p.w_r, j, h_prev));
            aux[j] = h_prev[j] * gates[H + j];
          }
          for (std::size_t j = 0; j < H; ++j) {
            const double s = std::tanh(row_dot(p.u_s, j, x) + row_dot(p.w_s, j, aux));
            gates[2 * H + j] = s;
            h[j] = (1.0 - gates[j]) * s + gates[j] * h_prev[j];
          }
        }
      }
    }
  }

  // Head, loss and the gradient entering the top layer at the last step.
  PaddedBatchResult result;
  result.probs.resize(B);
  Grid d_out(T, B, H);
  double loss_sum = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    const double* top = layers.back().h.at(T - 1, b);
    Vector head_in(H);
    for (std::size_t j = 0; j < H; ++j) head_in[j] = masks.empty() ? top[j] : top[j] * masks[b][j];
    result.probs[b] = head_probs(params, head_in);
    const int y = labels[b];
    if (y != 0 && y != 1) throw ParameterError("padded batch: label must be 0 or 1");
    loss_sum += -std::log(std::max(result.probs[b][static_cast<std::size_t>(y)], kProbFloor));
    double dlogits[2] = {result.probs[b][0], result.probs[b][1]};
    dlogits[y] -= 1.0;
    add_outer(grads.head_w, dlogits, head_in.data());
    grads.head_b[0] += dlogits[0];
    grads.head_b[1] += dlogits[1];
    double* d_last = d_out.at(T - 1, b);
    add_transposed(params.head_w, dlogits, d_last);
    if (!masks.empty()) {
      for (std::size_t j = 0; j < H; ++j) d_last[j] *= masks[b][j];
    }
  }
  result.mean_loss = loss_sum / static_cast<double>(B);

  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerState& st = layers[l];
    const auto in = static_cast<std::size_t>(config.layer_input_dim(static_cast<int>(l)));
    Grid d_in(T, B, in);
    Grid dh_next(1, B, H), dc_next(1, B, H);
    std::vector<double> da(4 * H), dhr(H);
    for (std::size_t t = T; t-- > 0;) {
      for (std::size_t b = 0; b < B; ++b) {
        double* dhn = dh_next.at(0, b);
        double* dcn = dc_next.at(0, b);
        const double* dstep = d_out.at(t, b);
        if (!active(t, b)) {
          // State was copied forward; its gradient flows straight back.
          for (std::size_t j = 0; j < H; ++j) dhn[j] += dstep[j];
          continue;
        }
        const double* h_prev = t == 0 ? zeros.data() : st.h.at(t - 1, b);
        const double* x = st.inputs.at(t, b);
        const double* gates = st.gates.at(t, b);
        const double* aux = st.aux.at(t, b);
        double* dx = d_in.at(t, b);
        if (lstm) {
          const auto& p = params.lstm[l];
          auto& g = grads.lstm[l];
          const double* c_prev = t == 0 ? zeros.data() : st.c.at(t - 1, b);
          for (std::size_t j = 0; j < H; ++j) {
            const double f = gates[j], i = gates[H + j], o = gates[2 * H + j], gg = gates[3 * H + j];
            const double dh = dstep[j] + dhn[j];
            const double dc = dcn[j] + dh * o * (1.0 - aux[j] * aux[j]);
            da[j] = dc * c_prev[j] * f * (1.0 - f);
            da[H + j] = dc * gg * i * (1.0 - i);
            da[2 * H + j] = dh * aux[j] * o * (1.0 - o);
            da[3 * H + j] = dc * i * (1.0 - gg * gg);
            dcn[j] = dc * f;
          }
          std::copy(h_prev, h_prev + H, xcat.begin());
          std::copy(x, x + in, xcat.begin() + static_cast<std::ptrdiff_t>(H));
          Matrix* gw[4] = {&g.w_f, &g.w_i, &g.w_o, &g.w_c};
          Vector* gb[4] = {&g.b_f, &g.b_i, &g.b_o, &g.b_c};
          const Matrix* pw[4] = {&p.w_f, &p.w_i, &p.w_o, &p.w_c};
          std::vector<double> dxcat(H + in, 0.0);
          for (int k = 0; k < 4; ++k) {
            const double* dak = da.data() + static_cast<std::size_t>(k) * H;
            add_outer(*gw[k], dak, xcat.data());
            for (std::size_t j = 0; j < H; ++j) (*gb[k])[j] += dak[j];
            add_transposed(*pw[k], dak, dxcat.data());
          }
          std::copy(dxcat.begin(), dxcat.begin() + static_cast<std::ptrdiff_t>(H), dhn);
          std::copy(dxcat.begin() + static_cast<std::ptrdiff_t>(H), dxcat.end(), dx);
        } else {
          const auto& p = params.gru[l];
          auto& g = grads.gru[l];
          double* da_z = da.data();
          double* da_r = da.data() + H;
          double* da_s = da.data() + 2 * H;
          std::vector<double> dh_prev(H);
          for (std::size_t j = 0; j < H; ++j) {
            const double z = gates[j], s = gates[2 * H + j];
            const double dh = dstep[j] + dhn[j];
            da_s[j] = dh * (1.0 - z) * (1.0 - s * s);
            da_z[j] = dh * (h_prev[j] - s) * z * (1.0 - z);
            dh_prev[j] = dh * z;
          }
          add_outer(g.u_s, da_s, x);
          add_outer(g.w_s, da_s, aux);
          std::fill(dhr.begin(), dhr.end(), 0.0);
          add_transposed(p.w_s, da_s, dhr.data());
          for (std::size_t j = 0; j < H; ++j) {
            const double r = gates[H + j];
            dh_prev[j] += dhr[j] * r;
            da_r[j] = dhr[j] * h_prev[j] * r * (1.0 - r);
          }
          add_outer(g.u_z, da_z, x);
          add_outer(g.w_z, da_z, h_prev);
          add_outer(g.u_r, da_r, x);
          add_outer(g.w_r, da_r, h_prev);
          add_transposed(p.w_z, da_z, dh_prev.data());
          add_transposed(p.w_r, da_r, dh_prev.data());
          add_transposed(p.u_z, da_z, dx);
          add_transposed(p.u_r, da_r, dx);
          add_transposed(p.u_s, da_s, dx);
          std::copy(dh_prev.begin(), dh_prev.end(), dhn);
        }
      }
    }
    d_out = std::move(d_in);
  }

  const auto N = static_cast<std::size_t>(config.embedding_dim);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t b = 0; b < B; ++b) {
      if (!active(t, b)) continue;
      double* row = grads.embedding.row(static_cast<std::size_t>(sequences[b][t])).data();
      const double* d = d_out.at(t, b);
      for (std::size_t k = 0; k < N; ++k) row[k] += d[k];
    }
  }
  grads.scale(1.0 / static_cast<double>(B));
  return result;
}

}  // namespace reqrnn
