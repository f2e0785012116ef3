// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include "reqrnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "reqrnn/error.hpp"
#include "reqrnn/eval.hpp"

namespace reqrnn {
namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void check_sequences(std::span<const LabeledSequence> data, const ModelConfig& model,
                     const char* what) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& item = data[i];
    if (item.ids.empty()) {
      throw ParameterError(std::string("fit: ") + what + " sequence " + std::to_string(i) +
                           " is empty");
    }
    if (item.label != 0 && item.label != 1) {
      throw ParameterError(std::string("fit: ") + what + " label must be 0 or 1");
    }
    for (int id : item.ids) {
      if (id < 0 || id >= model.vocab_size) {
        throw StructuralError(std::string("fit: ") + what + " sequence " + std::to_string(i) +
                              " has id " + std::to_string(id) + " outside vocabulary of size " +
                              std::to_string(model.vocab_size));
      }
    }
  }
}

BatchStats padded_batch(std::span<const LabeledSequence> data, std::span<const std::size_t> batch,
                        const ParameterSet& params, const ModelConfig& model, Rng& dropout_rng,
                        ParameterSet& grads) {
  std::vector<std::vector<int>> seqs;
  std::vector<int> labels;
  std::vector<Vector> masks;
  for (std::size_t i : batch) {
    seqs.push_back(data[i].ids);
    labels.push_back(data[i].label);
  }
  if (model.dropout > 0.0) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      masks.push_back(
          draw_dropout_mask(static_cast<std::size_t>(model.hidden_units), model.dropout, dropout_rng));
    }
  }
  const auto result = padded_batch_loss_and_gradient(seqs, labels, masks, params, model, grads);
  BatchStats stats;
  stats.count = batch.size();
  stats.loss_sum = result.mean_loss * static_cast<double>(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    stats.correct += classify(result.probs[b]) == labels[b] ? 1 : 0;
  }
  return stats;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ParameterError("learning_rate must be positive, got " + format_double(learning_rate));
  }
  if (epochs < 1) throw ParameterError("epochs must be >= 1, got " + std::to_string(epochs));
  if (batch_size < 1) {
    throw ParameterError("batch_size must be >= 1, got " + std::to_string(batch_size));
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ParameterError("adam_beta1 must be in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ParameterError("adam_beta2 must be in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw ParameterError("adam_epsilon must be positive");
  if (clip_norm && !(*clip_norm > 0.0)) {
    throw ParameterError("clip_norm must be positive, got " + format_double(*clip_norm));
  }
}

AdamState AdamState::zeros(const ModelConfig& config) {
  return {ParameterSet::zeros(config), ParameterSet::zeros(config), 0};
}

double loss(const Vector& probs, int true_class) {
  if (probs.size() != 2 || (true_class != 0 && true_class != 1)) {
    throw StructuralError("loss: expects 2 probabilities and class 0 or 1");
  }
  return -std::log(std::max(probs[static_cast<std::size_t>(true_class)], kProbabilityFloor));
}

void adam_update(ParameterSet& params, const ParameterSet& grads, AdamState& state,
                 const TrainConfig& config) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
    throw StructuralError("adam_update: parameter/gradient/state layouts differ");
  }
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (g[k].values.size() != p[k].values.size() || m[k].values.size() != p[k].values.size() ||
        v[k].values.size() != p[k].values.size()) {
      throw StructuralError("adam_update: shape mismatch in " + p[k].name);
    }
    for (std::size_t i = 0; i < g[k].values.size(); ++i) {
      if (!std::isfinite(g[k].values[i])) {
        throw TrainingError("adam_update: non-finite gradient in " + g[k].name + " at element " +
                            std::to_string(i));
      }
    }
  }
  const double t = static_cast<double>(++state.t);
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto pv = p[k].values;
    const auto gv = g[k].values;
    auto mv = m[k].values;
    auto vv = v[k].values;
    for (std::size_t i = 0; i < pv.size(); ++i) {
      mv[i] = b1 * mv[i] + (1.0 - b1) * gv[i];
      vv[i] = b2 * vv[i] + (1.0 - b2) * gv[i] * gv[i];
      const double m_hat = mv[i] / c1;
      const double v_hat = vv[i] / c2;
      pv[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
  }
}

double clip_gradients(ParameterSet& grads, double clip_norm) {
  if (!(clip_norm > 0.0)) throw ParameterError("clip_gradients: clip_norm must be positive");
  const double norm = std::sqrt(grads.squared_norm());
  if (norm > clip_norm) grads.scale(clip_norm / norm);
  return norm;
}

std::string LossCurve::to_csv() const {
  std::string out = "epoch,train_loss,val_loss,train_acc\n";
  for (const auto& r : records) {
    out += std::to_string(r.epoch) + "," + format_double(r.train_loss) + "," +
           (r.val_loss ? format_double(*r.val_loss) : std::string()) + "," +
           format_double(r.train_acc) + "\n";
  }
  return out;
}

void LossCurve::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write loss curve: " + path.string());
  out << to_csv();
}

FitResult fit(std::span<const LabeledSequence> train, const ModelConfig& model,
              const TrainConfig& config, std::span<const LabeledSequence> validation) {
  model.validate();
  config.validate();
  if (train.empty()) throw ParameterError("fit: training set is empty");
  check_sequences(train, model, "training");
  check_sequences(validation, model, "validation");

  Rng init_rng(config.seed, kInitStream);
  Rng shuffle_rng(config.seed, kShuffleStream);
  Rng dropout_rng(config.seed, kDropoutStream);

  FitResult result{init_parameters(model, init_rng), {}};
  AdamState adam = AdamState::zeros(model);
  ParameterSet grads = ParameterSet::zeros(model);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::vector<int>> val_ids;
  for (const auto& item : validation) val_ids.push_back(item.ids);

  const auto batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle_each_epoch) shuffle(std::span<std::size_t>(order), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0, b = 0; start < order.size(); start += batch, ++b) {
      const std::span<const std::size_t> items(order.data() + start,
                                               std::min(batch, order.size() - start));
      const std::string where = "epoch " + std::to_string(epoch) + ", batch " + std::to_string(b);
      BatchStats stats;
      try {
        stats = config.padded_batches
                    ? padded_batch(train, items, result.params, model, dropout_rng, grads)
                    : batch_gradient(train, items, result.params, model, dropout_rng,
                                     config.execution, grads);
      } catch (const TrainingError&) {
        throw;
      } catch (const Error& e) {
        // Inputs were validated up front, so a failure here is numeric.
        throw TrainingError("non-finite activation at " + where + ": " + e.what());
      }
      if (!std::isfinite(stats.loss_sum)) throw TrainingError("non-finite loss at " + where);
      loss_sum += stats.loss_sum;
      correct += stats.correct;
      if (config.clip_norm) clip_gradients(grads, *config.clip_norm);
      try {
        adam_update(result.params, grads, adam, config);
      } catch (const TrainingError& e) {
        throw TrainingError(where + ": " + e.what());
      }
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(train.size());
    record.train_acc = static_cast<double>(correct) / static_cast<double>(train.size());
    if (!validation.empty()) {
      const auto probs = predict_batch(val_ids, result.params, model, config.execution);
      double val_sum = 0.0;
      for (std::size_t i = 0; i < probs.size(); ++i) val_sum += loss(probs[i], validation[i].label);
      record.val_loss = val_sum / static_cast<double>(validation.size());
    }
    result.curve.records.push_back(record);
  }
  return result;
}

std::vector<LabeledSequence> encode_labeled(const Dataset& dataset,
                                            std::span<const TagSequence> tags,
                                            const TagVocabulary& vocab, PropertyName property,
                                            EncodeStats* stats) {
  if (tags.size() != dataset.size()) {
    throw StructuralError("encode_labeled: " + std::to_string(tags.size()) +
                          " tag sequences for " + std::to_string(dataset.size()) +
                          " requirements");
  }
  std::vector<LabeledSequence> out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto label = dataset.requirements[i].labels.get(property);
    if (!label) continue;
    out.push_back({encode(tags[i], vocab, stats).ids, class_of(*label)});
  }
  return out;
}

}  // namespace reqrnn
