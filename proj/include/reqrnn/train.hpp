// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Training loop: cross-entropy loss, Adam with bias correction, global-norm
// clipping, and the finite-difference gradient check.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reqrnn/corpus.hpp"
#include "reqrnn/kernels.hpp"
#include "reqrnn/nn.hpp"
#include "reqrnn/textpipe.hpp"

namespace reqrnn {

struct TrainConfig {
  double learning_rate = 0.001;
  int epochs = 10;
  int batch_size = 32;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// Empty = clipping disabled.
  std::optional<double> clip_norm = 5.0;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;
  /// Use the padded, masked batch path instead of the per-sequence loop.
  bool padded_batches = false;
  Execution execution = Execution::kParallel;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Adam moments share the ParameterSet layout.
struct AdamState {
  ParameterSet m;
  ParameterSet v;
  std::int64_t t = 0;

  static AdamState zeros(const ModelConfig& config);
};

/// Probability floor applied before the log.
inline constexpr double kProbabilityFloor = 1e-12;

/// -log max(probs[true_class], 1e-12).
double loss(const Vector& probs, int true_class);

/// One Adam step. Throws TrainingError naming the first non-finite gradient.
void adam_update(ParameterSet& params, const ParameterSet& grads, AdamState& state,
                 const TrainConfig& config);

/// Rescales to `clip_norm` when the global L2 norm exceeds it. Returns the
/// norm before clipping.
double clip_gradients(ParameterSet& grads, double clip_norm);

struct EpochRecord {
  int epoch = 0;
  /// Mean per-sequence loss over the epoch, dropout active.
  double train_loss = 0.0;
  /// Infer-mode mean loss on the validation set after the epoch.
  std::optional<double> val_loss;
  /// Fraction of training sequences classified correctly during the epoch.
  double train_acc = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct LossCurve {
  std::vector<EpochRecord> records;

  /// Header `epoch,train_loss,val_loss,train_acc`; 17 significant digits.
  std::string to_csv() const;
  void save(const std::filesystem::path& path) const;
  bool operator==(const LossCurve&) const = default;
};

struct FitResult {
  ParameterSet params;
  LossCurve curve;
};

/// RNG streams of a training run, all keyed by TrainConfig::seed.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kShuffleStream = 2;
inline constexpr std::uint64_t kDropoutStream = 3;

/// Deterministic given (data, configs). Throws TrainingError on a
/// non-finite loss, naming the epoch and batch.
FitResult fit(std::span<const LabeledSequence> train, const ModelConfig& model,
              const TrainConfig& config, std::span<const LabeledSequence> validation = {});

/// Class index of a label: 0 when the property holds.
inline int class_of(bool has_property) { return has_property ? 0 : 1; }

/// Encodes the requirements labeled for `property`. `tags` is parallel to
/// `dataset.requirements`.
std::vector<LabeledSequence> encode_labeled(const Dataset& dataset,
                                            std::span<const TagSequence> tags,
                                            const TagVocabulary& vocab, PropertyName property,
                                            EncodeStats* stats = nullptr);

struct GradientCheckReport {
  bool passed = false;
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  double tolerance = 0.0;
};

/// Applied to the analytic gradient before comparison; used to inject faults.
using GradientHook = std::function<void(ParameterSet&)>;

/// Relative error |a - n| / max(|a|, |n|, kGradCheckFloor).
inline constexpr double kGradCheckFloor = 1e-4;

/// Central differences (eps 1e-6) on every parameter element of a randomly
/// initialized model over a random sequence of `length` ids.
GradientCheckReport gradient_check(const ModelConfig& config, int length, std::uint64_t seed,
                                   double tolerance, const GradientHook& hook = {});

}  // namespace reqrnn
