// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include "reqrnn/eval.hpp"

#include <exception>
#include <unordered_set>

#include <json.hpp>

#include "reqrnn/error.hpp"
#include "reqrnn/model_io.hpp"

namespace reqrnn {
namespace {

using ojson = nlohmann::ordered_json;

ojson metrics_object(const Metrics& m) {
  ojson j;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["accuracy"] = m.accuracy;
  j["f1"] = m.f1;
  j["mse"] = m.mse;
  j["tp"] = m.counts.tp;
  j["tn"] = m.counts.tn;
  j["fp"] = m.counts.fp;
  j["fn"] = m.counts.fn;
  auto flags = ojson::array();
  if (m.precision_undefined) flags.push_back("precision_undefined");
  if (m.recall_undefined) flags.push_back("recall_undefined");
  if (m.f1_undefined) flags.push_back("f1_undefined");
  j["flags"] = flags;
  return j;
}

std::vector<TagSequence> tag_all(const Dataset& dataset, TaggerMode mode) {
  return tag_dataset(dataset, mode);
}

/// Trains on `train_set`, tests on `test_set`, vocabulary from training tags.
HoldoutResult train_and_test(const Dataset& train_set, const Dataset* validation_set,
                             const Dataset& test_set, PropertyName property,
                             const ModelConfig& model, const TrainConfig& train,
                             TaggerMode tagger) {
  if (train_set.size() == 0 || test_set.size() == 0) {
    throw ParameterError("holdout: train and test partitions must be non-empty");
  }
  const auto train_tags = tag_all(train_set, tagger);
  const TagVocabulary vocab = build_vocabulary(train_tags);
  const auto train_data = encode_labeled(train_set, train_tags, vocab, property);
  std::vector<LabeledSequence> val_data;
  if (validation_set) {
    val_data = encode_labeled(*validation_set, tag_all(*validation_set, tagger), vocab, property);
  }
  const auto test_data = encode_labeled(test_set, tag_all(test_set, tagger), vocab, property);

  ModelConfig m = model;
  m.vocab_size = vocab.size();
  const FitResult fitted = fit(train_data, m, train, val_data);
  std::vector<std::vector<int>> ids;
  std::vector<int> labels;
  for (const auto& item : test_data) {
    ids.push_back(item.ids);
    labels.push_back(item.label);
  }
  const auto probs = predict_batch(ids, fitted.params, m, train.execution);
  std::vector<int> predicted;
  for (const auto& p : probs) predicted.push_back(classify(p));

  HoldoutResult out;
  out.metrics = compute_metrics(predicted, labels, probs);
  out.curve = fitted.curve;
  out.train_size = train_data.size();
  out.validation_size = val_data.size();
  out.test_size = test_data.size();
  return out;
}

}  // namespace

int classify(const Vector& probs) {
  if (probs.size() != 2) throw StructuralError("classify: expects 2 probabilities");
  return probs[1] > probs[0] ? 1 : 0;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels,
                        std::span<const Vector> probs) {
  if (predictions.size() != labels.size() || probs.size() != labels.size()) {
    throw StructuralError("compute_metrics: " + std::to_string(predictions.size()) +
                          " predictions, " + std::to_string(labels.size()) + " labels, " +
                          std::to_string(probs.size()) + " probability vectors");
  }
  if (labels.empty()) throw ParameterError("compute_metrics: no examples");
  Metrics m;
  double sq = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred_pos = predictions[i] == 0;
    const bool label_pos = labels[i] == 0;
    if (pred_pos && label_pos) ++m.counts.tp;
    if (!pred_pos && !label_pos) ++m.counts.tn;
    if (pred_pos && !label_pos) ++m.counts.fp;
    if (!pred_pos && label_pos) ++m.counts.fn;
    const double err = probs[i][0] - (label_pos ? 1.0 : 0.0);
    sq += err * err;
  }
  const auto& c = m.counts;
  const auto n = static_cast<double>(c.total());
  m.accuracy = static_cast<double>(c.tp + c.tn) / n;
  m.mse = sq / n;
  if (c.tp + c.fp == 0) {
    m.precision_undefined = true;
  } else {
    m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn == 0) {
    m.recall_undefined = true;
  } else {
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (m.precision + m.recall == 0.0) {
    m.f1_undefined = true;
  } else {
    m.f1 = f1_score(m.precision, m.recall);
  }
  return m;
}

std::string_view to_string(MetricName m) {
  switch (m) {
    case MetricName::kPrecision: return "precision";
    case MetricName::kRecall: return "recall";
    case MetricName::kAccuracy: return "accuracy";
    case MetricName::kF1: return "f1";
    case MetricName::kMse: return "mse";
  }
  return "accuracy";
}

std::optional<MetricName> parse_metric(std::string_view name) {
  for (auto m : {MetricName::kPrecision, MetricName::kRecall, MetricName::kAccuracy,
                 MetricName::kF1, MetricName::kMse}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

double metric_value(const Metrics& m, MetricName name) {
  switch (name) {
    case MetricName::kPrecision: return m.precision;
    case MetricName::kRecall: return m.recall;
    case MetricName::kAccuracy: return m.accuracy;
    case MetricName::kF1: return m.f1;
    case MetricName::kMse: return m.mse;
  }
  return m.accuracy;
}

CvResult cross_validate(const Dataset& dataset, PropertyName property, const ModelConfig& model,
                        const TrainConfig& train, int k, std::uint64_t seed,
                        const EvalOptions& options) {
  const auto tags = tag_all(dataset, options.tagger);
  return cross_validate_tagged(dataset, tags, property, model, train, k, seed, options.execution);
}

CvResult cross_validate_tagged(const Dataset& dataset, std::span<const TagSequence> tags,
                               PropertyName property, const ModelConfig& model,
                               const TrainConfig& train, int k, std::uint64_t seed,
                               Execution execution) {
  if (tags.size() != dataset.size()) {
    throw StructuralError("cross_validate: tag sequences do not match the dataset");
  }
  train.validate();
  const FoldPlan plan = make_folds(dataset, property, k, seed);

  CvResult result;
  result.property = property;
  result.model = model;
  result.train = train;
  result.k = k;
  result.seed = seed;
  result.folds.resize(static_cast<std::size_t>(k));

  const bool parallel_folds = execution == Execution::kParallel && thread_count() > 1;
  auto run_fold = [&](int i) {
    const auto train_idx = plan.train_indices(i);
    const auto test_idx = plan.test_indices(i);
    std::unordered_set<std::string> train_ids;
    for (auto j : train_idx) train_ids.insert(dataset.requirements[j].id);
    for (auto j : test_idx) {
      if (train_ids.count(dataset.requirements[j].id) > 0) {
        throw StructuralError("fold " + std::to_string(i) + ": requirement " +
                              dataset.requirements[j].id + " is in both train and test");
      }
    }
    std::vector<TagSequence> train_tags;
    for (auto j : train_idx) train_tags.push_back(tags[j]);
    const TagVocabulary vocab = build_vocabulary(train_tags);
    auto to_items = [&](const std::vector<std::size_t>& idx) {
      std::vector<LabeledSequence> items;
      for (auto j : idx) {
        const bool label = *dataset.requirements[j].labels.get(property);
        items.push_back({encode(tags[j], vocab).ids, class_of(label)});
      }
      return items;
    };
    const auto train_items = to_items(train_idx);
    const auto test_items = to_items(test_idx);

    ModelConfig m = model;
    m.vocab_size = vocab.size();
    TrainConfig t = train;
    t.seed = seed ^ static_cast<std::uint64_t>(i);
    t.execution = parallel_folds ? Execution::kSerial : train.execution;
    const FitResult fitted = fit(train_items, m, t);

    std::vector<std::vector<int>> ids;
    std::vector<int> labels, predicted;
    for (const auto& item : test_items) {
      ids.push_back(item.ids);
      labels.push_back(item.label);
    }
    const auto probs = predict_batch(ids, fitted.params, m, t.execution);
    for (const auto& p : probs) predicted.push_back(classify(p));

    auto& fold = result.folds[static_cast<std::size_t>(i)];
    fold.fold = i;
    fold.train_size = train_items.size();
    fold.test_size = test_items.size();
    fold.vocab_size = vocab.size();
    fold.metrics = compute_metrics(predicted, labels, probs);
  };

  if (parallel_folds) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < k; ++i) {
      try {
        run_fold(i);
      } catch (...) {
#pragma omp critical(reqrnn_fold_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int i = 0; i < k; ++i) run_fold(i);
  }

  Metrics& agg = result.aggregate;
  for (const auto& f : result.folds) {
    const Metrics& m = f.metrics;
    agg.precision += m.precision;
    agg.recall += m.recall;
    agg.accuracy += m.accuracy;
    agg.f1 += m.f1;
    agg.mse += m.mse;
    agg.counts.tp += m.counts.tp;
    agg.counts.tn += m.counts.tn;
    agg.counts.fp += m.counts.fp;
    agg.counts.fn += m.counts.fn;
    agg.precision_undefined = agg.precision_undefined || m.precision_undefined;
    agg.recall_undefined = agg.recall_undefined || m.recall_undefined;
    agg.f1_undefined = agg.f1_undefined || m.f1_undefined;
    if (m.accuracy > result.folds[static_cast<std::size_t>(result.best_fold)].metrics.accuracy) {
      result.best_fold = f.fold;
    }
  }
  const double kd = static_cast<double>(k);
  agg.precision /= kd;
  agg.recall /= kd;
  agg.accuracy /= kd;
  agg.f1 /= kd;
  agg.mse /= kd;
  return result;
}

HoldoutResult holdout_evaluate(const Dataset& dataset, PropertyName property,
                               const ModelConfig& model, const TrainConfig& train,
                               double train_fraction, std::uint64_t seed, TaggerMode tagger) {
  const Split split = holdout_split(dataset, property, train_fraction, seed);
  return train_and_test(split.train, nullptr, split.test, property, model, train, tagger);
}

HoldoutResult three_way_evaluate(const Dataset& dataset, PropertyName property,
                                 const ModelConfig& model, const TrainConfig& train,
                                 double train_fraction, double validation_fraction,
                                 std::uint64_t seed, TaggerMode tagger) {
  const ThreeWaySplit split =
      three_way_split(dataset, property, train_fraction, validation_fraction, seed);
  return train_and_test(split.train, split.validation.size() > 0 ? &split.validation : nullptr,
                        split.test, property, model, train, tagger);
}

EvaluationResult evaluate_model(const ModelArtifact& artifact, const Dataset& dataset,
                                PropertyName property) {
  if (artifact.property != property) {
    throw StructuralError("model was trained for property \"" +
                          std::string(to_string(artifact.property)) + "\", not \"" +
                          std::string(to_string(property)) + "\"");
  }
  const auto tags = tag_all(dataset, artifact.tagger);
  std::vector<std::vector<int>> ids;
  for (const auto& t : tags) ids.push_back(encode(t, artifact.vocabulary).ids);
  const auto probs = predict_batch(ids, artifact.params, artifact.config, Execution::kParallel);

  EvaluationResult out;
  std::vector<int> predicted, labels;
  std::vector<Vector> labeled_probs;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& req = dataset.requirements[i];
    PredictionRecord rec;
    rec.id = req.id;
    rec.predicted = classify(probs[i]) == 0;
    rec.prob_positive = probs[i][0];
    rec.label = req.labels.get(property);
    if (rec.label) {
      predicted.push_back(classify(probs[i]));
      labels.push_back(class_of(*rec.label));
      labeled_probs.push_back(probs[i]);
    }
    out.predictions.push_back(std::move(rec));
  }
  if (!labels.empty()) out.metrics = compute_metrics(predicted, labels, labeled_probs);
  return out;
}

std::string metrics_json(const Metrics& m) { return metrics_object(m).dump(2) + "\n"; }

std::string cv_report_json(const CvResult& r) {
  ojson j;
  j["property"] = to_string(r.property);
  j["config"] = {{"model", to_json(r.model)}, {"train", to_json(r.train)}};
  j["k"] = r.k;
  auto folds = ojson::array();
  for (const auto& f : r.folds) {
    ojson fj;
    fj["fold"] = f.fold;
    fj["train_size"] = f.train_size;
    fj["test_size"] = f.test_size;
    fj["vocab_size"] = f.vocab_size;
    const ojson m = metrics_object(f.metrics);
    for (const auto& [key, value] : m.items()) fj[key] = value;
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  j["aggregate"] = metrics_object(r.aggregate);
  j["best_fold"] = {{"fold", r.best_fold},
                    {"metrics", metrics_object(r.folds.at(static_cast<std::size_t>(r.best_fold)).metrics)}};
  j["seed"] = r.seed;
  return j.dump(2) + "\n";
}

std::string predictions_jsonl(std::span<const PredictionRecord> records) {
  std::string out;
  for (const auto& r : records) {
    ojson j;
    j["id"] = r.id;
    j["predicted"] = r.predicted;
    j["prob_positive"] = r.prob_positive;
    j["label"] = r.label ? ojson(*r.label) : ojson();
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace reqrnn
