// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <json.hpp>

#include "reqrnn/error.hpp"
#include "reqrnn/eval.hpp"
#include "reqrnn/model_io.hpp"
#include "reqrnn/search.hpp"

using namespace reqrnn;

namespace {

struct Recount {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

/// Confusion cells recounted one at a time, positive = class 0.
Recount brute_force(const std::vector<int>& pred, const std::vector<int>& label) {
  Recount r;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == 0 && label[i] == 0) r.tp++;
    else if (pred[i] == 1 && label[i] == 1) r.tn++;
    else if (pred[i] == 0 && label[i] == 1) r.fp++;
    else r.fn++;
  }
  return r;
}

ModelConfig small_model() {
  ModelConfig m;
  m.cell = CellType::kGru;
  m.embedding_dim = 8;
  m.hidden_units = 8;
  return m;
}

TrainConfig short_training(int epochs = 8) {
  TrainConfig t;
  t.learning_rate = 0.01;
  t.epochs = epochs;
  t.batch_size = 16;
  return t;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("classify with the tie rule") {
    CHECK(classify(Vector{0.7, 0.3}) == 0);
    CHECK(classify(Vector{0.5, 0.5}) == 0);
    CHECK(classify(Vector{0.49, 0.51}) == 1);
  }

  TEST_CASE("F1 from the published precision and recall") {
    struct Row {
      double p, r, reported;
    };
    // Published rows: complete, singular, appropriate, correct.
    for (const Row row : {Row{0.75, 1.0, 0.85}, Row{0.78, 0.86, 0.82}, Row{0.72, 0.82, 0.76},
                          Row{0.75, 1.0, 0.85}}) {
      CHECK(std::abs(f1_score(row.p, row.r) - row.reported) <= 0.01);
    }
    CHECK(f1_score(0.75, 1.0) == doctest::Approx(0.8571428571428571).epsilon(1e-15));
    CHECK(f1_score(0.78, 0.86) == doctest::Approx(0.8180487804878048).epsilon(1e-15));
  }

  TEST_CASE("perfect classifier") {
    const std::vector<int> y = {0, 1, 1, 0};
    const std::vector<Vector> probs = {{1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}};
    const Metrics m = compute_metrics(y, y, probs);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.accuracy == 1.0);
    CHECK(m.f1 == 1.0);
    CHECK(m.mse == 0.0);
  }

  TEST_CASE("metrics equal a brute-force recount") {
    Rng rng(200);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> pred(200), label(200);
      std::vector<Vector> probs(200);
      double sq = 0.0;
      for (std::size_t i = 0; i < 200; ++i) {
        label[i] = static_cast<int>(rng.below(2));
        const double p0 = rng.uniform();
        probs[i] = Vector{p0, 1.0 - p0};
        pred[i] = classify(probs[i]);
        const double e = p0 - (label[i] == 0 ? 1.0 : 0.0);
        sq += e * e;
      }
      const Metrics m = compute_metrics(pred, label, probs);
      const Recount r = brute_force(pred, label);
      CHECK(m.counts.tp == r.tp);
      CHECK(m.counts.tn == r.tn);
      CHECK(m.counts.fp == r.fp);
      CHECK(m.counts.fn == r.fn);
      CHECK(m.counts.total() == 200);
      CHECK(m.precision == static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp));
      CHECK(m.recall == static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn));
      CHECK(m.accuracy == static_cast<double>(r.tp + r.tn) / 200.0);
      CHECK(m.f1 == doctest::Approx(2 * m.precision * m.recall / (m.precision + m.recall)));
      CHECK(m.mse == doctest::Approx(sq / 200.0).epsilon(1e-14));

      // Jointly permuted pairs give the same confusion and ratios.
      std::vector<std::size_t> order(200);
      for (std::size_t i = 0; i < 200; ++i) order[i] = i;
      shuffle(std::span<std::size_t>(order), rng);
      std::vector<int> pp, ll;
      std::vector<Vector> qq;
      for (auto i : order) {
        pp.push_back(pred[i]);
        ll.push_back(label[i]);
        qq.push_back(probs[i]);
      }
      const Metrics shuffled = compute_metrics(pp, ll, qq);
      CHECK(shuffled.counts == m.counts);
      CHECK(shuffled.precision == m.precision);
      CHECK(shuffled.f1 == m.f1);
      CHECK(shuffled.mse == doctest::Approx(m.mse).epsilon(1e-14));
    }
  }

  TEST_CASE("zero denominators are flagged") {
    const std::vector<int> pred = {1, 1};
    const std::vector<int> label = {1, 1};
    const std::vector<Vector> probs = {{0.2, 0.8}, {0.1, 0.9}};
    const Metrics m = compute_metrics(pred, label, probs);
    CHECK(m.precision == 0.0);
    CHECK(m.precision_undefined);
    CHECK(m.recall_undefined);
    CHECK(m.f1_undefined);
    CHECK(m.accuracy == 1.0);
    CHECK_THROWS_AS(compute_metrics(pred, std::vector<int>{1}, probs), StructuralError);
    CHECK_THROWS_AS(compute_metrics({}, {}, {}), ParameterError);
  }

  TEST_CASE("metric names") {
    for (auto m : {MetricName::kPrecision, MetricName::kRecall, MetricName::kAccuracy,
                   MetricName::kF1, MetricName::kMse}) {
      CHECK(parse_metric(to_string(m)) == m);
    }
    CHECK_FALSE(parse_metric("auc").has_value());
  }

  TEST_CASE("cross-validation is deterministic with isolated folds") {
    const Dataset ds = generate_synthetic(60, 3);
    const CvResult a = cross_validate(ds, PropertyName::kComplete, small_model(),
                                      short_training(), 5, 42);
    const CvResult b = cross_validate(ds, PropertyName::kComplete, small_model(),
                                      short_training(), 5, 42);
    REQUIRE(a.folds.size() == 5);
    CHECK(cv_report_json(a) == cv_report_json(b));
    double mean_acc = 0.0;
    for (const auto& f : a.folds) {
      CHECK(f.train_size + f.test_size == 60);
      CHECK(f.test_size == 12);
      CHECK(f.vocab_size >= 3);
      mean_acc += f.metrics.accuracy;
    }
    CHECK(a.aggregate.accuracy == doctest::Approx(mean_acc / 5.0).epsilon(1e-15));
    CHECK(a.aggregate.counts.total() == 60);
    for (const auto& f : a.folds) CHECK(f.metrics.accuracy <= a.folds[a.best_fold].metrics.accuracy);

    const CvResult serial = cross_validate(ds, PropertyName::kComplete, small_model(),
                                           short_training(), 5, 42,
                                           EvalOptions{TaggerMode::kRules, Execution::kSerial});
    CHECK(cv_report_json(serial) == cv_report_json(a));
  }

  TEST_CASE("report JSON layout") {
    const Dataset ds = generate_synthetic(30, 1);
    const CvResult r = cross_validate(ds, PropertyName::kSingular, small_model(),
                                      short_training(2), 3, 7);
    const auto j = nlohmann::json::parse(cv_report_json(r));
    CHECK(j["property"] == "singular");
    CHECK(j["seed"] == 7);
    CHECK(j["folds"].size() == 3);
    for (const char* key : {"precision", "recall", "accuracy", "f1", "mse"}) {
      CHECK(j["aggregate"].contains(key));
    }
    CHECK(j["config"]["model"]["cell"] == "GRU");
    CHECK(j.contains("best_fold"));
  }

  TEST_CASE("holdout protocols") {
    const Dataset ds = generate_synthetic(50, 8);
    const HoldoutResult h =
        holdout_evaluate(ds, PropertyName::kCorrect, small_model(), short_training(), 0.8, 3);
    CHECK(h.train_size == 40);
    CHECK(h.test_size == 10);
    CHECK(h.metrics.counts.total() == 10);
    const HoldoutResult t = three_way_evaluate(ds, PropertyName::kCorrect, small_model(),
                                               short_training(3), 0.8, 0.1, 3);
    CHECK(t.train_size == 40);
    CHECK(t.validation_size == 5);
    CHECK(t.test_size == 5);
    REQUIRE(t.curve.records.size() == 3);
    CHECK(t.curve.records[0].val_loss.has_value());
  }

  TEST_CASE("evaluate_model handles unlabeled rows and property mismatch") {
    Dataset ds = generate_synthetic(40, 6);
    const auto tags = tag_dataset(ds, TaggerMode::kRules);
    ModelArtifact art;
    art.property = PropertyName::kAppropriate;
    art.vocabulary = build_vocabulary(tags);
    art.config = small_model();
    art.config.vocab_size = art.vocabulary.size();
    TrainConfig tc = short_training(30);
    art.params = fit(encode_labeled(ds, tags, art.vocabulary, art.property), art.config, tc).params;

    ds.requirements[0].labels.clear(PropertyName::kAppropriate);
    const EvaluationResult r = evaluate_model(art, ds, PropertyName::kAppropriate);
    REQUIRE(r.predictions.size() == 40);
    REQUIRE(r.metrics.has_value());
    CHECK(r.metrics->counts.total() == 39);
    CHECK_FALSE(r.predictions[0].label.has_value());
    CHECK(r.predictions[0].predicted == (r.predictions[0].prob_positive >= 0.5));

    for (auto& req : ds.requirements) req.labels.clear(PropertyName::kAppropriate);
    const EvaluationResult none = evaluate_model(art, ds, PropertyName::kAppropriate);
    CHECK_FALSE(none.metrics.has_value());
    CHECK(none.predictions.size() == 40);

    CHECK_THROWS_AS(evaluate_model(art, ds, PropertyName::kSingular), StructuralError);

    const std::string jsonl = predictions_jsonl(r.predictions);
    const auto first = nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n')));
    CHECK(first["id"] == r.predictions[0].id);
    CHECK(first["label"].is_null());
    CHECK(first.contains("prob_positive"));
  }
}
