// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Sequence classifier: embedding -> stacked LSTM or GRU -> dropout on the
// final hidden state -> dense -> 2-way softmax, with a hand-derived
// backward pass through time.
//
// LSTM step (x = [h_prev; x_t], h first):
//   f = sigmoid(W_f x + b_f)   i = sigmoid(W_i x + b_i)   o = sigmoid(W_o x + b_o)
//   c = f * c_prev + i * tanh(W_c x + b_c)                h = o * tanh(c)
//
// GRU step (no bias terms; the reset gate scales h_prev before W_s):
//   z = sigmoid(U_z x_t + W_z h_prev)   r = sigmoid(U_r x_t + W_r h_prev)
//   s = tanh(U_s x_t + W_s (h_prev * r))
//   h = (1 - z) * s + z * h_prev
//
// The GRU form differs from the usual framework cells, which add biases and
// apply the reset gate after the recurrent product.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reqrnn/numcore.hpp"
#include "reqrnn/rng.hpp"

namespace reqrnn {

enum class CellType { kLstm, kGru };

std::string_view to_string(CellType cell);
std::optional<CellType> parse_cell(std::string_view name);

struct ModelConfig {
  CellType cell = CellType::kGru;
  int vocab_size = 3;
  int embedding_dim = 128;
  int hidden_units = 128;
  int num_layers = 1;
  double dropout = 0.0;
  int num_classes = 2;

  /// Throws ParameterError naming the first violated constraint.
  void validate() const;
  int layer_input_dim(int layer) const { return layer == 0 ? embedding_dim : hidden_units; }
  bool operator==(const ModelConfig&) const = default;
};

struct LstmLayerParams {
  Matrix w_f, w_i, w_o, w_c;  // H x (H + in)
  Vector b_f, b_i, b_o, b_c;  // H
  bool operator==(const LstmLayerParams&) const = default;
};

struct GruLayerParams {
  Matrix u_z, u_r, u_s;  // H x in
  Matrix w_z, w_r, w_s;  // H x H
  bool operator==(const GruLayerParams&) const = default;
};

/// Named view of one parameter tensor (vectors have cols == 1).
struct TensorRef {
  std::string name;
  std::size_t rows;
  std::size_t cols;
  std::span<double> values;
};

struct ConstTensorRef {
  std::string name;
  std::size_t rows;
  std::size_t cols;
  std::span<const double> values;
};

/// All trainable weights. Also used for gradients and optimizer moments,
/// which share the layout.
struct ParameterSet {
  Matrix embedding;  // vocab x N
  std::vector<LstmLayerParams> lstm;
  std::vector<GruLayerParams> gru;
  Matrix head_w;  // 2 x H
  Vector head_b;  // 2

  /// Correctly shaped, all zero.
  static ParameterSet zeros(const ModelConfig& config);

  /// Fixed order: embedding, layer tensors, head.
  std::vector<TensorRef> tensors();
  std::vector<ConstTensorRef> tensors() const;
  std::size_t parameter_count() const;

  void set_zero();
  /// this += other (same layout).
  void add(const ParameterSet& other);
  void scale(double factor);
  double squared_norm() const;

  bool operator==(const ParameterSet&) const = default;
};

/// Throws StructuralError if `params` is not shaped for `config`.
void check_shapes(const ParameterSet& params, const ModelConfig& config);

/// Glorot-uniform matrices, zero biases except the LSTM forget bias (1.0).
ParameterSet init_parameters(const ModelConfig& config, Rng& rng);

struct CellState {
  Vector h;
  Vector c;  // empty for GRU
};

/// Row ids[i] of the embedding table per position.
std::vector<Vector> embed(std::span<const int> ids, const Matrix& table);

CellState lstm_step(const Vector& x_t, const CellState& state, const LstmLayerParams& params);
Vector gru_step(const Vector& x_t, const Vector& h_prev, const GruLayerParams& params);

enum class Mode { kTrain, kInfer };

/// Per-layer cached activations, flattened T x width row-major.
struct LayerTrace {
  int input_dim = 0;
  int hidden = 0;
  std::vector<double> inputs;  // T x input_dim
  std::vector<double> h;       // T x H
  std::vector<double> c;       // LSTM: T x H
  std::vector<double> gates;   // LSTM: T x 4H (f, i, o, g); GRU: T x 3H (z, r, s)
  std::vector<double> aux;     // LSTM: tanh(c); GRU: h_prev * r
};

struct ForwardTrace {
  CellType cell = CellType::kGru;
  std::vector<int> ids;
  std::vector<LayerTrace> layers;
  Vector final_hidden;  // h_T of the top layer
  Vector dropout_mask;  // empty = no dropout; entries are 0 or 1/(1-p)
  Vector head_input;    // final_hidden after dropout
  Vector logits;
  Vector probs;

  std::size_t length() const { return ids.size(); }
};

/// Inverted-dropout mask; each unit kept with probability 1 - p.
Vector draw_dropout_mask(std::size_t units, double p, Rng& rng);

/// Dense layer + softmax on an already-dropped hidden vector.
Vector head_probs(const ParameterSet& params, const Vector& head_input, Vector* logits = nullptr);

/// Train mode with dropout > 0 draws a mask from `rng`; infer mode never does.
ForwardTrace forward(std::span<const int> ids, const ParameterSet& params,
                     const ModelConfig& config, Mode mode, Rng* rng = nullptr);
/// Same, with a caller-supplied mask (empty = none).
ForwardTrace forward_with_mask(std::span<const int> ids, const ParameterSet& params,
                               const ModelConfig& config, const Vector& mask);

/// Gradients of L = -log probs[true_class], accumulated into `grads`.
void backward(const ForwardTrace& trace, int true_class, const ParameterSet& params,
              const ModelConfig& config, ParameterSet& grads);
ParameterSet backward(const ForwardTrace& trace, int true_class, const ParameterSet& params,
                      const ModelConfig& config);

/// Padded-batch path: sequences are right-padded with PAD to the longest
/// length and masked, so padded steps leave the state untouched. Returns the
/// mean loss and writes the mean gradient; both agree with a per-sequence
/// loop to rounding.
struct PaddedBatchResult {
  double mean_loss = 0.0;
  std::vector<Vector> probs;
};
PaddedBatchResult padded_batch_loss_and_gradient(std::span<const std::vector<int>> sequences,
                                                 std::span<const int> labels,
                                                 std::span<const Vector> masks,
                                                 const ParameterSet& params,
                                                 const ModelConfig& config, ParameterSet& grads);

}  // namespace reqrnn
