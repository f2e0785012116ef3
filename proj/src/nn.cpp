// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include "reqrnn/nn.hpp"

#include <cmath>
#include <utility>

#include "reqrnn/error.hpp"

namespace reqrnn {
namespace {

using kernel::matvec;
using kernel::matvec_transposed_add;
using kernel::outer_add;

std::span<double> slice(std::vector<double>& v, std::size_t row, std::size_t width) {
  return {v.data() + row * width, width};
}
std::span<const double> slice(const std::vector<double>& v, std::size_t row, std::size_t width) {
  return {v.data() + row * width, width};
}

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw StructuralError(name + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                          ", got " + shape_string(m));
  }
}

void require_len(const Vector& v, std::size_t len, const std::string& name) {
  if (v.size() != len) {
    throw StructuralError(name + ": expected length " + std::to_string(len) + ", got " +
                          std::to_string(v.size()));
  }
}

// One LSTM step. xcat receives [h_prev; x_t]; gates receives f, i, o, g.
void lstm_step_into(const LstmLayerParams& p, std::span<const double> x_t,
                    std::span<const double> h_prev, std::span<const double> c_prev,
                    std::span<double> xcat, std::span<double> gates, std::span<double> c,
                    std::span<double> tanh_c, std::span<double> h) {
  const std::size_t H = h.size();
  std::copy(h_prev.begin(), h_prev.end(), xcat.begin());
  std::copy(x_t.begin(), x_t.end(), xcat.begin() + static_cast<std::ptrdiff_t>(H));

  auto f = gates.subspan(0, H);
  auto i = gates.subspan(H, H);
  auto o = gates.subspan(2 * H, H);
  auto g = gates.subspan(3 * H, H);
  matvec(p.w_f, xcat, f, false);
  matvec(p.w_i, xcat, i, false);
  matvec(p.w_o, xcat, o, false);
  matvec(p.w_c, xcat, g, false);
  for (std::size_t j = 0; j < H; ++j) {
    f[j] = sigmoid(f[j] + p.b_f[j]);
    i[j] = sigmoid(i[j] + p.b_i[j]);
    o[j] = sigmoid(o[j] + p.b_o[j]);
    g[j] = std::tanh(g[j] + p.b_c[j]);
    c[j] = f[j] * c_prev[j] + i[j] * g[j];
    tanh_c[j] = std::tanh(c[j]);
    h[j] = o[j] * tanh_c[j];
  }
}

// One GRU step. gates receives z, r, s; hr receives h_prev * r.
void gru_step_into(const GruLayerParams& p, std::span<const double> x_t,
                   std::span<const double> h_prev, std::span<double> gates, std::span<double> hr,
                   std::span<double> h) {
  const std::size_t H = h.size();
  auto z = gates.subspan(0, H);
  auto r = gates.subspan(H, H);
  auto s = gates.subspan(2 * H, H);
  matvec(p.u_z, x_t, z, false);
  matvec(p.w_z, h_prev, z, true);
  matvec(p.u_r, x_t, r, false);
  matvec(p.w_r, h_prev, r, true);
  for (std::size_t j = 0; j < H; ++j) {
    z[j] = sigmoid(z[j]);
    r[j] = sigmoid(r[j]);
    hr[j] = h_prev[j] * r[j];
  }
  matvec(p.u_s, x_t, s, false);
  matvec(p.w_s, hr, s, true);
  for (std::size_t j = 0; j < H; ++j) {
    s[j] = std::tanh(s[j]);
    h[j] = (1.0 - z[j]) * s[j] + z[j] * h_prev[j];
  }
}

void check_ids(std::span<const int> ids, std::size_t vocab) {
  if (ids.empty()) throw StructuralError("forward: empty sequence");
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || static_cast<std::size_t>(ids[t]) >= vocab) {
      throw StructuralError("id " + std::to_string(ids[t]) + " at position " + std::to_string(t) +
                            " outside vocabulary of size " + std::to_string(vocab));
    }
  }
}

}  // namespace

std::string_view to_string(CellType cell) { return cell == CellType::kLstm ? "LSTM" : "GRU"; }

std::optional<CellType> parse_cell(std::string_view name) {
  if (name == "LSTM" || name == "lstm") return CellType::kLstm;
  if (name == "GRU" || name == "gru") return CellType::kGru;
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (vocab_size < 3) throw ParameterError("vocab_size must be >= 3, got " + std::to_string(vocab_size));
  if (embedding_dim < 1) throw ParameterError("embedding_dim must be positive");
  if (hidden_units < 1) throw ParameterError("hidden_units must be positive");
  if (num_layers < 1) throw ParameterError("num_layers must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ParameterError("dropout must lie in [0, 1), got " + std::to_string(dropout));
  }
  if (num_classes != 2) throw ParameterError("num_classes must be 2 (binary models)");
}

ParameterSet ParameterSet::zeros(const ModelConfig& config) {
  config.validate();
  const auto H = static_cast<std::size_t>(config.hidden_units);
  ParameterSet p;
  p.embedding = Matrix(static_cast<std::size_t>(config.vocab_size),
                       static_cast<std::size_t>(config.embedding_dim));
  for (int l = 0; l < config.num_layers; ++l) {
    const auto in = static_cast<std::size_t>(config.layer_input_dim(l));
    if (config.cell == CellType::kLstm) {
      LstmLayerParams layer;
      layer.w_f = layer.w_i = layer.w_o = layer.w_c = Matrix(H, H + in);
      layer.b_f = layer.b_i = layer.b_o = layer.b_c = Vector(H);
      p.lstm.push_back(std::move(layer));
    } else {
      GruLayerParams layer;
      layer.u_z = layer.u_r = layer.u_s = Matrix(H, in);
      layer.w_z = layer.w_r = layer.w_s = Matrix(H, H);
      p.gru.push_back(std::move(layer));
    }
  }
  p.head_w = Matrix(2, H);
  p.head_b = Vector(2);
  return p;
}

namespace {

template <class Self, class Ref>
std::vector<Ref> collect_tensors(Self& self) {
  std::vector<Ref> out;
  auto mat = [&](auto& m, std::string name) { out.push_back({std::move(name), m.rows(), m.cols(), m.span()}); };
  auto vec = [&](auto& v, std::string name) { out.push_back({std::move(name), v.size(), 1, v.span()}); };
  mat(self.embedding, "embedding");
  for (std::size_t l = 0; l < self.lstm.size(); ++l) {
    auto& layer = self.lstm[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    mat(layer.w_f, prefix + "W_f");
    mat(layer.w_i, prefix + "W_i");
    mat(layer.w_o, prefix + "W_o");
    mat(layer.w_c, prefix + "W_c");
    vec(layer.b_f, prefix + "b_f");
    vec(layer.b_i, prefix + "b_i");
    vec(layer.b_o, prefix + "b_o");
    vec(layer.b_c, prefix + "b_c");
  }
  for (std::size_t l = 0; l < self.gru.size(); ++l) {
    auto& layer = self.gru[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    mat(layer.u_z, prefix + "U_z");
    mat(layer.u_r, prefix + "U_r");
    mat(layer.u_s, prefix + "U_s");
    mat(layer.w_z, prefix + "W_z");
    mat(layer.w_r, prefix + "W_r");
    mat(layer.w_s, prefix + "W_s");
  }
  mat(self.head_w, "head.W_y");
  vec(self.head_b, "head.b_y");
  return out;
}

}  // namespace

std::vector<TensorRef> ParameterSet::tensors() {
  return collect_tensors<ParameterSet, TensorRef>(*this);
}

std::vector<ConstTensorRef> ParameterSet::tensors() const {
  return collect_tensors<const ParameterSet, ConstTensorRef>(*this);
}

std::size_t ParameterSet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.values.size();
  return n;
}

void ParameterSet::set_zero() {
  for (auto& t : tensors()) std::fill(t.values.begin(), t.values.end(), 0.0);
}

void ParameterSet::add(const ParameterSet& other) {
  auto mine = tensors();
  const auto theirs = other.tensors();
  if (mine.size() != theirs.size()) throw StructuralError("ParameterSet::add: layout mismatch");
  for (std::size_t k = 0; k < mine.size(); ++k) {
    if (mine[k].values.size() != theirs[k].values.size()) {
      throw StructuralError("ParameterSet::add: size mismatch in " + mine[k].name);
    }
    kernel::axpy(1.0, theirs[k].values, mine[k].values);
  }
}

void ParameterSet::scale(double factor) {
  for (auto& t : tensors()) {
    for (auto& x : t.values) x *= factor;
  }
}

double ParameterSet::squared_norm() const {
  double total = 0.0;
  for (const auto& t : tensors()) total += dot(t.values, t.values);
  return total;
}

void check_shapes(const ParameterSet& params, const ModelConfig& config) {
  const auto H = static_cast<std::size_t>(config.hidden_units);
  require_shape(params.embedding, static_cast<std::size_t>(config.vocab_size),
                static_cast<std::size_t>(config.embedding_dim), "embedding");
  const auto layers = static_cast<std::size_t>(config.num_layers);
  if (config.cell == CellType::kLstm) {
    if (params.lstm.size() != layers || !params.gru.empty()) {
      throw StructuralError("parameters do not hold " + std::to_string(layers) + " LSTM layer(s)");
    }
    for (std::size_t l = 0; l < layers; ++l) {
      const auto in = static_cast<std::size_t>(config.layer_input_dim(static_cast<int>(l)));
      const auto& p = params.lstm[l];
      const std::string prefix = "layer" + std::to_string(l) + ".";
      require_shape(p.w_f, H, H + in, prefix + "W_f");
      require_shape(p.w_i, H, H + in, prefix + "W_i");
      require_shape(p.w_o, H, H + in, prefix + "W_o");
      require_shape(p.w_c, H, H + in, prefix + "W_c");
      require_len(p.b_f, H, prefix + "b_f");
      require_len(p.b_i, H, prefix + "b_i");
      require_len(p.b_o, H, prefix + "b_o");
      require_len(p.b_c, H, prefix + "b_c");
    }
  } else {
    if (params.gru.size() != layers || !params.lstm.empty()) {
      throw StructuralError("parameters do not hold " + std::to_string(layers) + " GRU layer(s)");
    }
    for (std::size_t l = 0; l < layers; ++l) {
      const auto in = static_cast<std::size_t>(config.layer_input_dim(static_cast<int>(l)));
      const auto& p = params.gru[l];
      const std::string prefix = "layer" + std::to_string(l) + ".";
      require_shape(p.u_z, H, in, prefix + "U_z");
      require_shape(p.u_r, H, in, prefix + "U_r");
      require_shape(p.u_s, H, in, prefix + "U_s");
      require_shape(p.w_z, H, H, prefix + "W_z");
      require_shape(p.w_r, H, H, prefix + "W_r");
      require_shape(p.w_s, H, H, prefix + "W_s");
    }
  }
  require_shape(params.head_w, 2, H, "head.W_y");
  require_len(params.head_b, 2, "head.b_y");
}

ParameterSet init_parameters(const ModelConfig& config, Rng& rng) {
  ParameterSet p = ParameterSet::zeros(config);
  p.embedding = glorot_uniform(p.embedding.rows(), p.embedding.cols(), rng);
  for (auto& layer : p.lstm) {
    for (Matrix* m : {&layer.w_f, &layer.w_i, &layer.w_o, &layer.w_c}) {
      *m = glorot_uniform(m->rows(), m->cols(), rng);
    }
    std::fill(layer.b_f.begin(), layer.b_f.end(), 1.0);
  }
  for (auto& layer : p.gru) {
    for (Matrix* m : {&layer.u_z, &layer.u_r, &layer.u_s, &layer.w_z, &layer.w_r, &layer.w_s}) {
      *m = glorot_uniform(m->rows(), m->cols(), rng);
    }
  }
  p.head_w = glorot_uniform(p.head_w.rows(), p.head_w.cols(), rng);
  return p;
}

std::vector<Vector> embed(std::span<const int> ids, const Matrix& table) {
  check_ids(ids, table.rows());
  std::vector<Vector> out;
  out.reserve(ids.size());
  for (int id : ids) {
    const auto row = table.row(static_cast<std::size_t>(id));
    out.push_back(Vector::from_values({row.begin(), row.end()}));
  }
  return out;
}

CellState lstm_step(const Vector& x_t, const CellState& state, const LstmLayerParams& params) {
  const std::size_t H = params.b_f.size();
  const std::size_t N = x_t.size();
  if (state.h.size() != H || state.c.size() != H) {
    throw StructuralError("lstm_step: state length " + std::to_string(state.h.size()) + "/" +
                          std::to_string(state.c.size()) + ", expected " + std::to_string(H));
  }
  for (const Matrix* m : {&params.w_f, &params.w_i, &params.w_o, &params.w_c}) {
    if (m->rows() != H || m->cols() != H + N) {
      throw StructuralError("lstm_step: gate matrix " + shape_string(*m) + " incompatible with H=" +
                            std::to_string(H) + ", N=" + std::to_string(N));
    }
  }
  std::vector<double> xcat(H + N), gates(4 * H), tanh_c(H);
  CellState next{Vector(H), Vector(H)};
  lstm_step_into(params, x_t.span(), state.h.span(), state.c.span(), xcat, gates, next.c.span(),
                 tanh_c, next.h.span());
  return next;
}

Vector gru_step(const Vector& x_t, const Vector& h_prev, const GruLayerParams& params) {
  const std::size_t H = h_prev.size();
  const std::size_t N = x_t.size();
  for (const Matrix* m : {&params.u_z, &params.u_r, &params.u_s}) {
    if (m->rows() != H || m->cols() != N) {
      throw StructuralError("gru_step: input matrix " + shape_string(*m) + " incompatible with H=" +
                            std::to_string(H) + ", N=" + std::to_string(N));
    }
  }
  for (const Matrix* m : {&params.w_z, &params.w_r, &params.w_s}) {
    if (m->rows() != H || m->cols() != H) {
      throw StructuralError("gru_step: recurrent matrix " + shape_string(*m) +
                            " incompatible with H=" + std::to_string(H));
    }
  }
  std::vector<double> gates(3 * H), hr(H);
  Vector h(H);
  gru_step_into(params, x_t.span(), h_prev.span(), gates, hr, h.span());
  return h;
}

Vector draw_dropout_mask(std::size_t units, double p, Rng& rng) {
  Vector mask(units);
  const double keep_scale = 1.0 / (1.0 - p);
  for (auto& m : mask) m = rng.uniform() < p ? 0.0 : keep_scale;
  return mask;
}

Vector head_probs(const ParameterSet& params, const Vector& head_input, Vector* logits) {
  Vector z(2);
  matvec(params.head_w, head_input.span(), z.span(), false);
  z[0] += params.head_b[0];
  z[1] += params.head_b[1];
  Vector probs = softmax(z);
  if (logits) *logits = std::move(z);
  return probs;
}

ForwardTrace forward_with_mask(std::span<const int> ids, const ParameterSet& params,
                               const ModelConfig& config, const Vector& mask) {
  check_shapes(params, config);
  check_ids(ids, static_cast<std::size_t>(config.vocab_size));
  const std::size_t T = ids.size();
  const auto H = static_cast<std::size_t>(config.hidden_units);
  if (!mask.empty() && mask.size() != H) {
    throw StructuralError("dropout mask length " + std::to_string(mask.size()) + ", expected " +
                          std::to_string(H));
  }

  ForwardTrace trace;
  trace.cell = config.cell;
  trace.ids.assign(ids.begin(), ids.end());
  trace.layers.resize(static_cast<std::size_t>(config.num_layers));

  std::vector<double> xcat;
  const std::vector<double> zeros(H, 0.0);
  for (std::size_t l = 0; l < trace.layers.size(); ++l) {
    LayerTrace& lt = trace.layers[l];
    lt.input_dim = config.layer_input_dim(static_cast<int>(l));
    lt.hidden = config.hidden_units;
    const auto in = static_cast<std::size_t>(lt.input_dim);
    if (l == 0) {
      lt.inputs.resize(T * in);
      for (std::size_t t = 0; t < T; ++t) {
        const auto row = params.embedding.row(static_cast<std::size_t>(ids[t]));
        std::copy(row.begin(), row.end(), lt.inputs.begin() + static_cast<std::ptrdiff_t>(t * in));
      }
    } else {
      lt.inputs = trace.layers[l - 1].h;
    }
    lt.h.resize(T * H);
    lt.aux.resize(T * H);
    if (config.cell == CellType::kLstm) {
      lt.c.resize(T * H);
      lt.gates.resize(T * 4 * H);
      xcat.resize(H + in);
      for (std::size_t t = 0; t < T; ++t) {
        const auto h_prev = t == 0 ? std::span<const double>(zeros) : slice(std::as_const(lt.h), t - 1, H);
        const auto c_prev = t == 0 ? std::span<const double>(zeros) : slice(std::as_const(lt.c), t - 1, H);
        lstm_step_into(params.lstm[l], slice(std::as_const(lt.inputs), t, in), h_prev, c_prev, xcat,
                       slice(lt.gates, t, 4 * H), slice(lt.c, t, H), slice(lt.aux, t, H),
                       slice(lt.h, t, H));
      }
    } else {
      lt.gates.resize(T * 3 * H);
      for (std::size_t t = 0; t < T; ++t) {
        const auto h_prev = t == 0 ? std::span<const double>(zeros) : slice(std::as_const(lt.h), t - 1, H);
        gru_step_into(params.gru[l], slice(std::as_const(lt.inputs), t, in), h_prev,
                      slice(lt.gates, t, 3 * H), slice(lt.aux, t, H), slice(lt.h, t, H));
      }
    }
  }

  const auto top = slice(std::as_const(trace.layers.back().h), T - 1, H);
  trace.final_hidden = Vector::from_values({top.begin(), top.end()});
  trace.dropout_mask = mask;
  trace.head_input = mask.empty() ? trace.final_hidden : hadamard(trace.final_hidden, mask);
  trace.probs = head_probs(params, trace.head_input, &trace.logits);
  return trace;
}

ForwardTrace forward(std::span<const int> ids, const ParameterSet& params,
                     const ModelConfig& config, Mode mode, Rng* rng) {
  Vector mask;
  if (mode == Mode::kTrain && config.dropout > 0.0) {
    if (rng == nullptr) throw ParameterError("forward: train mode with dropout needs an Rng");
    mask = draw_dropout_mask(static_cast<std::size_t>(config.hidden_units), config.dropout, *rng);
  }
  return forward_with_mask(ids, params, config, mask);
}

void backward(const ForwardTrace& trace, int true_class, const ParameterSet& params,
              const ModelConfig& config, ParameterSet& grads) {
  if (true_class != 0 && true_class != 1) {
    throw ParameterError("backward: true_class must be 0 or 1");
  }
  if (trace.cell != config.cell || trace.layers.size() != static_cast<std::size_t>(config.num_layers) ||
      trace.final_hidden.size() != static_cast<std::size_t>(config.hidden_units) ||
      trace.probs.size() != 2 || trace.ids.empty()) {
    throw StructuralError("backward: trace was not produced for this model configuration");
  }
  check_shapes(params, config);
  check_shapes(grads, config);

  const std::size_t T = trace.length();
  const auto H = static_cast<std::size_t>(config.hidden_units);

  // Head: dL/dlogits = probs - onehot.
  double dlogits[2] = {trace.probs[0], trace.probs[1]};
  dlogits[true_class] -= 1.0;
  outer_add(grads.head_w, dlogits, trace.head_input.span());
  grads.head_b[0] += dlogits[0];
  grads.head_b[1] += dlogits[1];

  std::vector<double> d_out(T * H, 0.0);  // dL/dh for every step of the current layer
  {
    auto last = slice(d_out, T - 1, H);
    matvec_transposed_add(params.head_w, dlogits, last);
    if (!trace.dropout_mask.empty()) {
      for (std::size_t j = 0; j < H; ++j) last[j] *= trace.dropout_mask[j];
    }
  }

  std::vector<double> dh_next(H), dc_next(H), dh(H), xcat, dxcat;
  std::vector<double> da(4 * H);
  const std::vector<double> zeros(H, 0.0);
  for (std::size_t l = trace.layers.size(); l-- > 0;) {
    const LayerTrace& lt = trace.layers[l];
    const auto in = static_cast<std::size_t>(lt.input_dim);
    std::vector<double> d_in(T * in, 0.0);
    std::fill(dh_next.begin(), dh_next.end(), 0.0);

    if (config.cell == CellType::kLstm) {
      const LstmLayerParams& p = params.lstm[l];
      LstmLayerParams& g = grads.lstm[l];
      std::fill(dc_next.begin(), dc_next.end(), 0.0);
      xcat.resize(H + in);
      dxcat.resize(H + in);
      for (std::size_t t = T; t-- > 0;) {
        const auto gates = slice(lt.gates, t, 4 * H);
        const auto c_prev = t == 0 ? std::span<const double>(zeros) : slice(lt.c, t - 1, H);
        const auto h_prev = t == 0 ? std::span<const double>(zeros) : slice(lt.h, t - 1, H);
        const auto tanh_c = slice(lt.aux, t, H);
        const auto d_step = slice(std::as_const(d_out), t, H);
        auto da_f = std::span<double>(da).subspan(0, H);
        auto da_i = std::span<double>(da).subspan(H, H);
        auto da_o = std::span<double>(da).subspan(2 * H, H);
        auto da_g = std::span<double>(da).subspan(3 * H, H);
        for (std::size_t j = 0; j < H; ++j) {
          const double f = gates[j], i = gates[H + j], o = gates[2 * H + j], gg = gates[3 * H + j];
          const double dhj = d_step[j] + dh_next[j];
          const double dc = dc_next[j] + dhj * o * (1.0 - tanh_c[j] * tanh_c[j]);
          da_o[j] = dhj * tanh_c[j] * o * (1.0 - o);
          da_f[j] = dc * c_prev[j] * f * (1.0 - f);
          da_i[j] = dc * gg * i * (1.0 - i);
          da_g[j] = dc * i * (1.0 - gg * gg);
          dc_next[j] = dc * f;
        }
        std::copy(h_prev.begin(), h_prev.end(), xcat.begin());
        const auto x_t = slice(lt.inputs, t, in);
        std::copy(x_t.begin(), x_t.end(), xcat.begin() + static_cast<std::ptrdiff_t>(H));
        outer_add(g.w_f, da_f, xcat);
        outer_add(g.w_i, da_i, xcat);
        outer_add(g.w_o, da_o, xcat);
        outer_add(g.w_c, da_g, xcat);
        kernel::axpy(1.0, da_f, g.b_f.span());
        kernel::axpy(1.0, da_i, g.b_i.span());
        kernel::axpy(1.0, da_o, g.b_o.span());
        kernel::axpy(1.0, da_g, g.b_c.span());
        std::fill(dxcat.begin(), dxcat.end(), 0.0);
        matvec_transposed_add(p.w_f, da_f, dxcat);
        matvec_transposed_add(p.w_i, da_i, dxcat);
        matvec_transposed_add(p.w_o, da_o, dxcat);
        matvec_transposed_add(p.w_c, da_g, dxcat);
        std::copy(dxcat.begin(), dxcat.begin() + static_cast<std::ptrdiff_t>(H), dh_next.begin());
        std::copy(dxcat.begin() + static_cast<std::ptrdiff_t>(H), dxcat.end(),
                  d_in.begin() + static_cast<std::ptrdiff_t>(t * in));
      }
    } else {
      const GruLayerParams& p = params.gru[l];
      GruLayerParams& g = grads.gru[l];
      std::vector<double> dhr(H), dh_prev(H);
      for (std::size_t t = T; t-- > 0;) {
        const auto gates = slice(lt.gates, t, 3 * H);
        const auto h_prev = t == 0 ? std::span<const double>(zeros) : slice(lt.h, t - 1, H);
        const auto hr = slice(lt.aux, t, H);
        const auto x_t = slice(lt.inputs, t, in);
        const auto d_step = slice(std::as_const(d_out), t, H);
        auto da_z = std::span<double>(da).subspan(0, H);
        auto da_r = std::span<double>(da).subspan(H, H);
        auto da_s = std::span<double>(da).subspan(2 * H, H);
        for (std::size_t j = 0; j < H; ++j) {
          const double z = gates[j], s = gates[2 * H + j];
          const double dhj = d_step[j] + dh_next[j];
          da_s[j] = dhj * (1.0 - z) * (1.0 - s * s);
          da_z[j] = dhj * (h_prev[j] - s) * z * (1.0 - z);
          dh_prev[j] = dhj * z;
        }
        outer_add(g.u_s, da_s, x_t);
        outer_add(g.w_s, da_s, hr);
        std::fill(dhr.begin(), dhr.end(), 0.0);
        matvec_transposed_add(p.w_s, da_s, dhr);
        for (std::size_t j = 0; j < H; ++j) {
          const double r = gates[H + j];
          dh_prev[j] += dhr[j] * r;
          da_r[j] = dhr[j] * h_prev[j] * r * (1.0 - r);
        }
        outer_add(g.u_z, da_z, x_t);
        outer_add(g.w_z, da_z, h_prev);
        outer_add(g.u_r, da_r, x_t);
        outer_add(g.w_r, da_r, h_prev);
        matvec_transposed_add(p.w_z, da_z, dh_prev);
        matvec_transposed_add(p.w_r, da_r, dh_prev);
        auto dx = slice(d_in, t, in);
        matvec_transposed_add(p.u_z, da_z, dx);
        matvec_transposed_add(p.u_r, da_r, dx);
        matvec_transposed_add(p.u_s, da_s, dx);
        std::copy(dh_prev.begin(), dh_prev.end(), dh_next.begin());
      }
    }
    d_out = std::move(d_in);
  }

  // Embedding rows accumulate over repeated ids.
  const auto N = static_cast<std::size_t>(config.embedding_dim);
  for (std::size_t t = 0; t < T; ++t) {
    auto row = grads.embedding.row(static_cast<std::size_t>(trace.ids[t]));
    kernel::axpy(1.0, slice(std::as_const(d_out), t, N), row);
  }
}

ParameterSet backward(const ForwardTrace& trace, int true_class, const ParameterSet& params,
                      const ModelConfig& config) {
  ParameterSet grads = ParameterSet::zeros(config);
  backward(trace, true_class, params, config, grads);
  return grads;
}

}  // namespace reqrnn
