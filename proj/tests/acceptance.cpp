// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Acceptance runner: one PASS/FAIL line per criterion, exit 1 on any FAIL.
// Usage: reqrnn_acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cell_oracle.hpp"
#include "reqrnn/eval.hpp"
#include "reqrnn/model_io.hpp"
#include "reqrnn/search.hpp"

using namespace reqrnn;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Check {
  Outcome* out;
  void require(bool ok, const std::string& what) {
    if (!ok && out->passed) {
      out->passed = false;
      out->detail = "failed: " + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ModelConfig config(CellType cell, int H, int N, int layers, int vocab) {
  ModelConfig c;
  c.cell = cell;
  c.hidden_units = H;
  c.embedding_dim = N;
  c.num_layers = layers;
  c.vocab_size = vocab;
  return c;
}

Vector random_vector(std::size_t n, Rng& rng) {
  Vector v(n);
  for (auto& x : v) x = rng.uniform(-1.5, 1.5);
  return v;
}

struct Encoded {
  TagVocabulary vocab;
  std::vector<LabeledSequence> data;
};

Encoded encode_all(const Dataset& ds, PropertyName property) {
  const auto tags = tag_dataset(ds, TaggerMode::kRules);
  Encoded e;
  e.vocab = build_vocabulary(tags);
  e.data = encode_labeled(ds, tags, e.vocab, property);
  return e;
}

Outcome gradient_correctness() {
  Outcome o;
  Check c{&o};
  double worst = 0.0;
  Rng rng(0xAC1);
  for (auto cell : {CellType::kLstm, CellType::kGru}) {
    for (int i = 0; i < 20; ++i) {
      const int H = 1 + static_cast<int>(rng.below(8));
      const int N = 1 + static_cast<int>(rng.below(8));
      const int layers = 1 + static_cast<int>(rng.below(2));
      const int T = 1 + static_cast<int>(rng.below(5));
      const int vocab = 3 + static_cast<int>(rng.below(6));
      const auto report =
          gradient_check(config(cell, H, N, layers, vocab), T, rng.next_u64(), 1e-5);
      worst = std::max(worst, report.max_relative_error);
      c.require(report.passed, std::string(to_string(cell)) + " " + report.worst_parameter);
    }
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("40 configs, max relative error ") +
              fmt("%.3g", worst) + " <= 1e-05";
  return o;
}

Outcome equation_fidelity() {
  Outcome o;
  Check c{&o};
  Rng rng(0xAC2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int H = 1 + static_cast<int>(rng.below(8));
    const int N = 1 + static_cast<int>(rng.below(8));
    const ParameterSet lp = init_parameters(config(CellType::kLstm, H, N, 1, 4), rng);
    const ParameterSet gp = init_parameters(config(CellType::kGru, H, N, 1, 4), rng);
    const Vector x = random_vector(static_cast<std::size_t>(N), rng);
    const Vector h0 = random_vector(static_cast<std::size_t>(H), rng);
    const Vector c0 = random_vector(static_cast<std::size_t>(H), rng);
    Vector h, cc;
    reqrnn_test::lstm_oracle(lp.lstm[0], x, h0, c0, h, cc);
    const CellState s = lstm_step(x, {h0, c0}, lp.lstm[0]);
    const Vector g = gru_step(x, h0, gp.gru[0]);
    const Vector go = reqrnn_test::gru_oracle(gp.gru[0], x, h0);
    for (std::size_t j = 0; j < h.size(); ++j) {
      worst = std::max({worst, std::abs(s.h[j] - h[j]), std::abs(s.c[j] - cc[j]),
                        std::abs(g[j] - go[j])});
    }
  }
  c.require(worst <= 1e-12, "oracle difference " + fmt("%.3g", worst));

  const ParameterSet lz = ParameterSet::zeros(config(CellType::kLstm, 3, 2, 1, 4));
  const ParameterSet gz = ParameterSet::zeros(config(CellType::kGru, 3, 2, 1, 4));
  const Vector x{0.3, -2.0};
  const Vector h_prev{1.0, -0.5, 0.25};
  const CellState zs = lstm_step(x, {Vector(3), Vector(3)}, lz.lstm[0]);
  c.require(zs.h == Vector(3) && zs.c == Vector(3), "LSTM zero-weight h = 0");
  c.require(gru_step(x, h_prev, gz.gru[0]) == Vector{0.5, -0.25, 0.125},
            "GRU zero-weight h = 0.5 h_prev");

  // Opposite reset gates on the two units plus a swapping W_s separate
  // W_s(h*r) from (W_s h)*r.
  ParameterSet p = ParameterSet::zeros(config(CellType::kGru, 2, 1, 1, 4));
  auto& gl = p.gru[0];
  gl.u_r(0, 0) = 3.0;
  gl.u_r(1, 0) = -3.0;
  gl.w_s(0, 1) = 1.0;
  gl.w_s(1, 0) = 1.0;
  const Vector hp{0.8, -0.6};
  const double r0 = reqrnn_test::sig(3.0), r1 = reqrnn_test::sig(-3.0);
  const Vector hg = gru_step(Vector{1.0}, hp, gl);
  const double inside0 = 0.5 * std::tanh(hp[1] * r1) + 0.5 * hp[0];
  const double outside0 = 0.5 * std::tanh(hp[1] * r0) + 0.5 * hp[0];
  c.require(std::abs(hg[0] - inside0) <= 1e-14 && std::abs(hg[0] - outside0) > 0.1,
            "GRU reset ordering");
  if (o.passed) {
    o.detail = "100 instances, max |diff| " + fmt("%.3g", worst) +
               "; closed forms exact; W_s(h*r) ordering confirmed";
  }
  return o;
}

Outcome optimizer() {
  Outcome o;
  Check c{&o};
  ModelConfig cfg = config(CellType::kGru, 1, 1, 1, 3);
  ParameterSet p = ParameterSet::zeros(cfg);
  ParameterSet g = ParameterSet::zeros(cfg);
  for (auto& t : g.tensors()) std::fill(t.values.begin(), t.values.end(), 1.0);
  AdamState st = AdamState::zeros(cfg);
  TrainConfig tc;
  tc.learning_rate = 0.01;
  adam_update(p, g, st, tc);
  double step_err = 0.0;
  for (const auto& t : std::as_const(p).tensors()) {
    for (double v : t.values) step_err = std::max(step_err, std::abs(std::abs(v) - 0.01));
  }
  c.require(step_err <= 1e-9, "first step magnitude");

  ParameterSet q = ParameterSet::zeros(cfg);
  for (auto& t : q.tensors()) std::fill(t.values.begin(), t.values.end(), 1.0);
  AdamState sq = AdamState::zeros(cfg);
  tc.learning_rate = 0.1;
  for (int step = 0; step < 200; ++step) adam_update(q, q, sq, tc);
  const double theta = std::abs(q.head_b[0]);
  c.require(theta < 0.01, "quadratic |theta| = " + fmt("%.3g", theta));

  Rng rng(0xAC3);
  ParameterSet big = init_parameters(config(CellType::kLstm, 6, 4, 2, 6), rng);
  big.scale(10.0 / std::sqrt(big.squared_norm()));
  const ParameterSet orig = big;
  clip_gradients(big, 5.0);
  double dot = 0.0;
  const auto a = std::as_const(big).tensors();
  const auto b = orig.tensors();
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < a[k].values.size(); ++i) dot += a[k].values[i] * b[k].values[i];
  }
  const double norm = std::sqrt(big.squared_norm());
  const double cosine = dot / (norm * std::sqrt(orig.squared_norm()));
  c.require(std::abs(cosine - 1.0) <= 1e-12, "clip direction");
  c.require(norm <= 5.0 + 1e-12, "clip norm");
  if (o.passed) {
    o.detail = "first step |err| " + fmt("%.2g", step_err) + "; |theta_200| " +
               fmt("%.3g", theta) + "; clipped norm " + fmt("%.12g", norm) + ", cosine-1 " +
               fmt("%.2g", cosine - 1.0);
  }
  return o;
}

Outcome overfit() {
  Outcome o;
  Check c{&o};
  const Encoded e = encode_all(generate_synthetic(32, 0xAC4), PropertyName::kSingular);
  ModelConfig cfg = config(CellType::kGru, 64, 64, 1, static_cast<int>(e.vocab.size()));
  TrainConfig tc;
  tc.learning_rate = 0.01;
  tc.epochs = 200;
  tc.seed = 4;
  const auto start = std::chrono::steady_clock::now();
  const FitResult r = fit(e.data, cfg, tc);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<std::vector<int>> ids;
  for (const auto& s : e.data) ids.push_back(s.ids);
  const auto probs = predict_batch(ids, r.params, cfg, Execution::kParallel);
  double loss_sum = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    loss_sum += loss(probs[i], e.data[i].label);
    correct += classify(probs[i]) == e.data[i].label;
  }
  const double acc = static_cast<double>(correct) / static_cast<double>(probs.size());
  const double mean_loss = loss_sum / static_cast<double>(probs.size());
  c.require(acc == 1.0, "training accuracy " + fmt("%.4f", acc));
  c.require(mean_loss < 0.05, "mean loss " + fmt("%.4g", mean_loss));
  c.require(secs < 120.0, "runtime " + fmt("%.1f", secs) + " s");
  if (o.passed) {
    o.detail = "accuracy " + fmt("%.4f", acc) + ", mean loss " + fmt("%.3g", mean_loss) +
               " < 0.05, " + fmt("%.1f", secs) + " s < 120 s";
  }
  return o;
}

Outcome generalization() {
  Outcome o;
  Check c{&o};
  const Dataset ds = generate_synthetic(1000, 0xAC5);
  const TrialConfig preset = preset_config(PropertyName::kSingular);
  const auto start = std::chrono::steady_clock::now();
  const CvResult r = cross_validate(ds, PropertyName::kSingular, preset.model, preset.train, 10, 5);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double acc = r.aggregate.accuracy;
  c.require(acc >= 0.95, "aggregate accuracy " + fmt("%.4f", acc));
  c.require(secs < 900.0, "runtime " + fmt("%.0f", secs) + " s");
  if (o.passed) {
    o.detail = "10-fold aggregate accuracy " + fmt("%.4f", acc) + " >= 0.95, f1 " +
               fmt("%.4f", r.aggregate.f1) + ", " + fmt("%.0f", secs) + " s < 900 s";
  }
  return o;
}

Outcome metrics_oracle() {
  Outcome o;
  Check c{&o};
  Rng rng(0xAC6);
  std::vector<int> pred(200), label(200);
  std::vector<Vector> probs(200);
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    label[i] = static_cast<int>(rng.below(2));
    const double p0 = rng.uniform();
    probs[i] = Vector{p0, 1.0 - p0};
    pred[i] = classify(probs[i]);
    if (pred[i] == 0) (label[i] == 0 ? tp : fp)++;
    else (label[i] == 1 ? tn : fn)++;
  }
  const Metrics m = compute_metrics(pred, label, probs);
  c.require(m.counts.tp == tp && m.counts.tn == tn && m.counts.fp == fp && m.counts.fn == fn,
            "confusion recount");
  const double dtp = static_cast<double>(tp);
  c.require(m.precision == dtp / static_cast<double>(tp + fp), "precision");
  c.require(m.recall == dtp / static_cast<double>(tp + fn), "recall");
  c.require(m.accuracy == static_cast<double>(tp + tn) / 200.0, "accuracy");

  struct Row {
    const char* property;
    double p, r, f1;
  };
  std::string f1s;
  for (const Row row : {Row{"complete", 0.75, 1.0, 0.85},
                        Row{"singular", 0.78, 0.86, 0.82},
                        Row{"appropriate", 0.72, 0.82, 0.76},
                        Row{"correct", 0.75, 1.0, 0.85}}) {
    const double f = f1_score(row.p, row.r);
    c.require(std::abs(f - row.f1) <= 0.01, row.property);
    f1s += std::string(f1s.empty() ? "" : ", ") + row.property + " " + fmt("%.3f", f) +
           " vs " + fmt("%.2f", row.f1);
  }
  if (o.passed) o.detail = "200-pair confusion exact; F1 " + f1s;
  return o;
}

Outcome search_integrity() {
  Outcome o;
  Check c{&o};
  const SearchSpace space;
  c.require(space.size() == 4032, "space size " + std::to_string(space.size()));
  std::set<std::size_t> distinct;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const TrialConfig t = space.config_at(i);
    distinct.insert(std::hash<std::string>{}(to_json(t.model).dump() + to_json(t.train).dump()));
  }
  c.require(distinct.size() == 4032, "enumeration is not distinct");
  for (auto p : kAllProperties) {
    c.require(space.contains(preset_config(p)), "preset " + std::string(to_string(p)));
  }
  SearchOptions opt;
  opt.budget = 100;
  opt.seed = 77;
  c.require(trial_indices(space, opt) == trial_indices(space, opt), "random reproducibility");

  SearchSpace reduced;
  reduced.epochs = {3, 5};
  reduced.learning_rate = {0.01, 0.001};
  reduced.embedding_dim = {64};
  reduced.num_layers = {1, 2};
  reduced.num_units = {64};
  reduced.dropout = {0.0, 0.3};
  SearchOptions all = opt;
  all.budget = reduced.size();
  auto visited = trial_indices(reduced, all);
  all.mode = SearchMode::kExhaustive;
  auto exhaustive = trial_indices(reduced, all);
  std::sort(visited.begin(), visited.end());
  std::sort(exhaustive.begin(), exhaustive.end());
  c.require(visited == exhaustive, "budget = size visits the exhaustive set");

  // Whole search, run twice.
  const Dataset ds = generate_synthetic(40, 0xAC7);
  SearchSpace tiny = reduced;
  tiny.epochs = {2};
  tiny.num_units = {4};
  tiny.embedding_dim = {4};
  tiny.num_layers = {1};
  SearchOptions run;
  run.mode = SearchMode::kRandom;
  run.budget = 3;
  run.seed = 9;
  run.eval.kind = EvalProtocol::Kind::kHoldout;
  c.require(run_search(ds, PropertyName::kCorrect, tiny, run).trials_csv().size() > 0 &&
                run_search(ds, PropertyName::kCorrect, tiny, run).to_json() ==
                    run_search(ds, PropertyName::kCorrect, tiny, run).to_json(),
            "random search report reproducibility");
  if (o.passed) {
    o.detail = "4032 distinct configurations; 4 presets in space; seeded sampling "
               "reproducible; budget = " +
               std::to_string(reduced.size()) + " covers the reduced grid";
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  Check c{&o};
  const Dataset ds = generate_synthetic(64, 0xAC8);
  const Encoded e = encode_all(ds, PropertyName::kComplete);
  ModelConfig cfg = config(CellType::kLstm, 16, 8, 2, static_cast<int>(e.vocab.size()));
  cfg.dropout = 0.2;
  TrainConfig tc;
  tc.learning_rate = 0.01;
  tc.epochs = 5;
  tc.batch_size = 8;
  tc.seed = 88;
  const FitResult a = fit(e.data, cfg, tc);
  const FitResult b = fit(e.data, cfg, tc);
  c.require(a.curve.to_csv() == b.curve.to_csv(), "loss curves differ");
  c.require(a.params == b.params, "parameters differ");

  ModelArtifact art;
  art.property = PropertyName::kComplete;
  art.config = cfg;
  art.vocabulary = e.vocab;
  art.params = a.params;
  art.training_seed = tc.seed;
  const auto path = std::filesystem::temp_directory_path() / "reqrnn_acceptance_model.rqm";
  save_model(art, path);
  const ModelArtifact loaded = load_model(path);
  std::filesystem::remove(path);
  const Dataset inputs = generate_synthetic(100, 0xAC9);
  std::size_t same = 0;
  for (const auto& req : inputs.requirements) {
    same += predict_text(art, req.text) == predict_text(loaded, req.text);
  }
  c.require(same == 100, std::to_string(same) + "/100 predictions bit-exact");
  if (o.passed) {
    o.detail = "two runs give identical loss curves and parameters; 100/100 reloaded "
               "predictions bit-exact";
  }
  return o;
}

Outcome pipeline_invariants() {
  Outcome o;
  Check c{&o};
  Rng rng(0xACA);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Vector p = softmax(Vector{rng.uniform(-50, 50), rng.uniform(-50, 50)});
    worst = std::max(worst, std::abs(p[0] + p[1] - 1.0));
  }
  c.require(worst <= 1e-12, "softmax sum error " + fmt("%.3g", worst));

  const Dataset ds = generate_synthetic(257, 0xACB);
  for (int k : {2, 5, 10}) {
    const FoldPlan plan = make_folds(ds, PropertyName::kAppropriate, k, 3);
    std::vector<int> hits(ds.size(), 0);
    std::size_t lo = ds.size(), hi = 0;
    for (int f = 0; f < k; ++f) {
      const auto test = plan.test_indices(f);
      for (auto i : test) hits[i]++;
      lo = std::min(lo, test.size());
      hi = std::max(hi, test.size());
    }
    c.require(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }),
              "fold partition k=" + std::to_string(k));
    c.require(hi - lo <= 1, "fold spread k=" + std::to_string(k));
  }

  TagSequence all;
  for (auto t : penn_tagset()) all.emplace_back(t);
  const TagVocabulary v = build_vocabulary(std::vector<TagSequence>{all});
  c.require(decode(encode(all, v), v) == all, "encode/decode round trip");

  double padded_diff = 0.0;
  for (auto cell : {CellType::kLstm, CellType::kGru}) {
    ModelConfig cfg = config(cell, 5, 4, 2, 8);
    cfg.dropout = 0.25;
    const ParameterSet p = init_parameters(cfg, rng);
    std::vector<std::vector<int>> seqs;
    std::vector<int> labels;
    std::vector<Vector> masks;
    for (int i = 0; i < 12; ++i) {
      std::vector<int> s(1 + rng.below(9));
      for (auto& id : s) id = static_cast<int>(rng.below(8));
      seqs.push_back(std::move(s));
      labels.push_back(static_cast<int>(rng.below(2)));
      masks.push_back(draw_dropout_mask(5, 0.25, rng));
    }
    double loop_loss = 0.0;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      loop_loss += loss(forward_with_mask(seqs[i], p, cfg, masks[i]).probs, labels[i]);
    }
    ParameterSet grads;
    const auto r = padded_batch_loss_and_gradient(seqs, labels, masks, p, cfg, grads);
    padded_diff = std::max(padded_diff, std::abs(r.mean_loss - loop_loss / 12.0));
  }
  c.require(padded_diff <= 1e-10, "padded loss difference " + fmt("%.3g", padded_diff));
  if (o.passed) {
    o.detail = "softmax max |sum-1| " + fmt("%.2g", worst) +
               " over 1e5 pairs; folds partition with spread <= 1; " +
               std::to_string(all.size()) + " tags round-trip; padded vs loop loss " +
               fmt("%.2g", padded_diff);
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reqrnn acceptance runner"};
  std::vector<int> selected;
  app.add_option("criteria", selected, "Criterion numbers to run (default: all)")
      ->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", gradient_correctness},
      {2, "equation fidelity", equation_fidelity},
      {3, "optimizer", optimizer},
      {4, "overfit sanity", overfit},
      {5, "generalization on planted signal", generalization},
      {6, "metrics oracle", metrics_oracle},
      {7, "search integrity", search_integrity},
      {8, "determinism and persistence", determinism},
      {9, "pipeline invariants", pipeline_invariants},
  };

  int failures = 0;
  for (const auto& crit : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), crit.id) == selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = crit.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", out.passed ? "PASS" : "FAIL", crit.id,
                crit.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
