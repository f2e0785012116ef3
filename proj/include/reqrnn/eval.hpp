// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Metrics, k-fold cross-validation, holdout protocols and reports.
// Class 0 (property satisfied) is the positive class throughout.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reqrnn/corpus.hpp"
#include "reqrnn/kernels.hpp"
#include "reqrnn/nn.hpp"
#include "reqrnn/textpipe.hpp"
#include "reqrnn/train.hpp"

namespace reqrnn {

struct ModelArtifact;

struct Confusion {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::size_t total() const { return tp + tn + fp + fn; }
  bool operator==(const Confusion&) const = default;
};

/// Ratios with a zero denominator are 0 and flagged.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  /// Mean of (p_positive - [label is positive])^2.
  double mse = 0.0;
  Confusion counts;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;

  bool operator==(const Metrics&) const = default;
};

/// Argmax; an exact tie goes to class 0.
int classify(const Vector& probs);

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels,
                        std::span<const Vector> probs);

/// Precision and recall plugged into the harmonic mean.
double f1_score(double precision, double recall);

enum class MetricName { kPrecision, kRecall, kAccuracy, kF1, kMse };
std::string_view to_string(MetricName m);
std::optional<MetricName> parse_metric(std::string_view name);
double metric_value(const Metrics& m, MetricName name);

struct FoldResult {
  int fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  int vocab_size = 0;
  Metrics metrics;
};

struct CvResult {
  PropertyName property = PropertyName::kSingular;
  ModelConfig model;
  TrainConfig train;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  /// Unweighted fold means; counts are summed.
  Metrics aggregate;
  /// Highest accuracy, lowest index on ties.
  int best_fold = 0;
};

struct EvalOptions {
  TaggerMode tagger = TaggerMode::kRules;
  /// kParallel runs folds concurrently.
  Execution execution = Execution::kParallel;
};

/// Fold i trains on every other fold with seed ^ i, using a vocabulary built
/// from its own training tags. model.vocab_size is set per fold.
CvResult cross_validate(const Dataset& dataset, PropertyName property, const ModelConfig& model,
                        const TrainConfig& train, int k, std::uint64_t seed,
                        const EvalOptions& options = {});
/// Same, on already-tagged text (`tags` parallel to dataset.requirements).
CvResult cross_validate_tagged(const Dataset& dataset, std::span<const TagSequence> tags,
                               PropertyName property, const ModelConfig& model,
                               const TrainConfig& train, int k, std::uint64_t seed,
                               Execution execution = Execution::kParallel);

struct HoldoutResult {
  Metrics metrics;
  LossCurve curve;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  std::size_t test_size = 0;
};

/// Train on round(train_fraction * n) labeled rows, test on the rest.
HoldoutResult holdout_evaluate(const Dataset& dataset, PropertyName property,
                               const ModelConfig& model, const TrainConfig& train,
                               double train_fraction, std::uint64_t seed,
                               TaggerMode tagger = TaggerMode::kRules);

/// train / validation / test; validation loss is recorded in the curve.
/// Like cross_validate, the vocabulary comes from the training rows only.
HoldoutResult three_way_evaluate(const Dataset& dataset, PropertyName property,
                                 const ModelConfig& model, const TrainConfig& train,
                                 double train_fraction, double validation_fraction,
                                 std::uint64_t seed, TaggerMode tagger = TaggerMode::kRules);

struct PredictionRecord {
  std::string id;
  bool predicted = false;  // true = property satisfied
  double prob_positive = 0.0;
  std::optional<bool> label;
};

struct EvaluationResult {
  /// Absent when no requirement is labeled for the property.
  std::optional<Metrics> metrics;
  std::vector<PredictionRecord> predictions;
};

/// Throws StructuralError when the artifact was trained for another property.
EvaluationResult evaluate_model(const ModelArtifact& artifact, const Dataset& dataset,
                                PropertyName property);

std::string metrics_json(const Metrics& m);
std::string cv_report_json(const CvResult& result);
std::string predictions_jsonl(std::span<const PredictionRecord> records);

}  // namespace reqrnn
