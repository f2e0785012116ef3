// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include <doctest.h>

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "reqrnn/error.hpp"
#include "reqrnn/kernels.hpp"
#include "reqrnn/train.hpp"

using namespace reqrnn;

namespace {

ModelConfig tiny_config() {
  ModelConfig c;
  c.cell = CellType::kGru;
  c.vocab_size = 3;
  c.embedding_dim = 1;
  c.hidden_units = 1;
  return c;
}

void fill(ParameterSet& p, double value) {
  for (auto& t : p.tensors()) {
    for (double& v : t.values) v = value;
  }
}

/// Token 2 marks class 1; everything else is class 0.
std::vector<LabeledSequence> separable(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledSequence> out;
  for (int i = 0; i < n; ++i) {
    LabeledSequence s;
    const int len = 3 + static_cast<int>(rng.below(4));
    for (int t = 0; t < len; ++t) s.ids.push_back(3 + static_cast<int>(rng.below(3)));
    s.label = i % 2;
    if (s.label == 1) s.ids[rng.below(s.ids.size())] = 2;
    out.push_back(std::move(s));
  }
  return out;
}

ModelConfig seq_config(CellType cell) {
  ModelConfig c;
  c.cell = cell;
  c.vocab_size = 6;
  c.embedding_dim = 4;
  c.hidden_units = 6;
  return c;
}

}  // namespace

TEST_SUITE("train") {
  TEST_CASE("cross-entropy loss") {
    CHECK(loss(Vector{0.5, 0.5}, 0) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
    CHECK(loss(Vector{1.0, 0.0}, 0) == 0.0);
    CHECK(loss(Vector{0.25, 0.75}, 1) == doctest::Approx(0.2876820724517809).epsilon(1e-15));
    CHECK(loss(Vector{1.0, 0.0}, 1) == doctest::Approx(-std::log(1e-12)));
    CHECK_THROWS_AS(loss(Vector{1.0, 0.0}, 2), StructuralError);
  }

  TEST_CASE("train config validation") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.epochs = 0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = {};
    c.learning_rate = 0.0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = {};
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = {};
    c.clip_norm = -1.0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
  }

  TEST_CASE("first Adam step has magnitude lr") {
    const ModelConfig cfg = tiny_config();
    for (double lr : {0.1, 0.01, 0.001}) {
      ParameterSet p = ParameterSet::zeros(cfg);
      ParameterSet g = ParameterSet::zeros(cfg);
      fill(g, 1.0);
      AdamState st = AdamState::zeros(cfg);
      TrainConfig tc;
      tc.learning_rate = lr;
      adam_update(p, g, st, tc);
      CHECK(st.t == 1);
      for (const auto& t : p.tensors()) {
        for (double v : t.values) CHECK(std::abs(std::abs(v) - lr) <= 1e-9);
      }
    }
  }

  TEST_CASE("zero gradient leaves parameters unchanged") {
    const ModelConfig cfg = tiny_config();
    ParameterSet p = ParameterSet::zeros(cfg);
    fill(p, 0.7);
    const ParameterSet before = p;
    AdamState st = AdamState::zeros(cfg);
    adam_update(p, ParameterSet::zeros(cfg), st, TrainConfig{});
    CHECK(p == before);
  }

  // Trajectory frozen from tests/oracles/adam_oracle.py (torch.optim.Adam).
  TEST_CASE("scalar quadratic follows the reference Adam run") {
    const ModelConfig cfg = tiny_config();
    ParameterSet p = ParameterSet::zeros(cfg);
    fill(p, 1.0);
    AdamState st = AdamState::zeros(cfg);
    TrainConfig tc;
    tc.learning_rate = 0.1;
    const std::vector<std::pair<int, double>> checkpoints = {
        {1, 0.900000001}, {2, 0.8004122297123382}, {10, 0.07624916061975533},
        {200, -7.218001000614941e-06}};
    std::size_t next = 0;
    for (int step = 1; step <= 200; ++step) {
      adam_update(p, p, st, tc);  // dL/dtheta = theta
      if (step == checkpoints[next].first) {
        for (const auto& t : p.tensors()) {
          for (double v : t.values) CHECK(std::abs(v - checkpoints[next].second) <= 1e-9);
        }
        ++next;
      }
    }
    CHECK(std::abs(p.head_b[0]) < 0.01);
  }

  TEST_CASE("first Adam step is invariant to gradient scale") {
    const ModelConfig cfg = seq_config(CellType::kGru);
    Rng rng(5);
    const ParameterSet start = init_parameters(cfg, rng);
    ParameterSet g = init_parameters(cfg, rng);
    ParameterSet g7 = g;
    g7.scale(7.0);
    ParameterSet a = start, b = start;
    AdamState sa = AdamState::zeros(cfg), sb = AdamState::zeros(cfg);
    adam_update(a, g, sa, TrainConfig{});
    adam_update(b, g7, sb, TrainConfig{});
    const auto ta = std::as_const(a).tensors();
    const auto tb = std::as_const(b).tensors();
    const auto t0 = start.tensors();
    for (std::size_t k = 0; k < ta.size(); ++k) {
      for (std::size_t i = 0; i < ta[k].values.size(); ++i) {
        const double da = ta[k].values[i] - t0[k].values[i];
        const double db = tb[k].values[i] - t0[k].values[i];
        const double gi = std::abs(std::as_const(g).tensors()[k].values[i]);
        // First step is -lr g / (|g| + eps): scale-free apart from eps / |g|.
        if (gi == 0.0) {
          CHECK(da == db);
          continue;
        }
        const double eps_effect = 1e-8 / gi;
        CHECK(std::abs(da - db) <= std::abs(da) * (eps_effect + 1e-12));
        if (gi >= 1e-2) CHECK(std::abs(da - db) <= 1e-6 * std::abs(da));
      }
    }
  }

  TEST_CASE("non-finite gradient names the parameter") {
    const ModelConfig cfg = tiny_config();
    ParameterSet p = ParameterSet::zeros(cfg);
    ParameterSet g = ParameterSet::zeros(cfg);
    g.gru[0].w_s(0, 0) = std::numeric_limits<double>::quiet_NaN();
    AdamState st = AdamState::zeros(cfg);
    try {
      adam_update(p, g, st, TrainConfig{});
      FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
      CHECK(std::string(e.what()).find("layer0.W_s") != std::string::npos);
    }
    CHECK(st.t == 0);
  }

  TEST_CASE("gradient clipping") {
    const ModelConfig cfg = seq_config(CellType::kLstm);
    Rng rng(6);
    ParameterSet g = init_parameters(cfg, rng);
    g.scale(10.0 / std::sqrt(g.squared_norm()));
    const ParameterSet orig = g;
    CHECK(clip_gradients(g, 5.0) == doctest::Approx(10.0));
    CHECK(std::sqrt(g.squared_norm()) <= 5.0 + 1e-12);
    double dot = 0.0;
    const auto a = std::as_const(g).tensors();
    const auto b = orig.tensors();
    for (std::size_t k = 0; k < a.size(); ++k) {
      for (std::size_t i = 0; i < a[k].values.size(); ++i) {
        CHECK(a[k].values[i] == doctest::Approx(b[k].values[i] / 2.0).epsilon(1e-14));
        dot += a[k].values[i] * b[k].values[i];
      }
    }
    const double cosine = dot / (std::sqrt(g.squared_norm()) * std::sqrt(orig.squared_norm()));
    CHECK(std::abs(cosine - 1.0) <= 1e-12);

    ParameterSet small = orig;
    small.scale(0.3);
    const ParameterSet before = small;
    clip_gradients(small, 5.0);
    CHECK(small == before);
  }

  TEST_CASE("serial and parallel batch gradients are bit-identical") {
    const auto data = separable(40, 3);
    for (auto cell : {CellType::kLstm, CellType::kGru}) {
      ModelConfig cfg = seq_config(cell);
      cfg.dropout = 0.2;
      Rng init(1);
      const ParameterSet p = init_parameters(cfg, init);
      std::vector<std::size_t> batch = {0, 5, 7, 9, 11, 13, 2, 39, 38, 21, 4};
      Rng d1(9), d2(9);
      ParameterSet gs, gp;
      const BatchStats s = batch_gradient(data, batch, p, cfg, d1, Execution::kSerial, gs);
      const BatchStats q = batch_gradient(data, batch, p, cfg, d2, Execution::kParallel, gp);
      CHECK(gs == gp);
      CHECK(s.loss_sum == q.loss_sum);
      CHECK(s.correct == q.correct);
      CHECK(d1.next_u64() == d2.next_u64());

      std::vector<std::vector<int>> ids;
      for (const auto& item : data) ids.push_back(item.ids);
      CHECK(predict_batch(ids, p, cfg, Execution::kSerial) ==
            predict_batch(ids, p, cfg, Execution::kParallel));
    }
  }

  TEST_CASE("fit is deterministic and learns separable data") {
    const auto data = separable(32, 11);
    ModelConfig cfg = seq_config(CellType::kGru);
    TrainConfig tc;
    tc.learning_rate = 0.01;
    tc.epochs = 60;
    tc.batch_size = 8;
    tc.seed = 21;
    const FitResult a = fit(data, cfg, tc);
    const FitResult b = fit(data, cfg, tc);
    CHECK(a.curve == b.curve);
    CHECK(a.params == b.params);
    REQUIRE(a.curve.records.size() == 60);
    CHECK(a.curve.records.back().train_loss < a.curve.records.front().train_loss);
    CHECK(a.curve.records.back().train_acc == 1.0);

    TrainConfig serial = tc;
    serial.execution = Execution::kSerial;
    CHECK(fit(data, cfg, serial).curve == a.curve);

    TrainConfig other = tc;
    other.seed = 22;
    CHECK_FALSE(fit(data, cfg, other).curve == a.curve);
  }

  TEST_CASE("padded training tracks the per-sequence loop") {
    const auto data = separable(24, 2);
    ModelConfig cfg = seq_config(CellType::kLstm);
    cfg.dropout = 0.1;
    TrainConfig tc;
    tc.learning_rate = 0.01;
    tc.epochs = 3;
    tc.batch_size = 5;
    const FitResult loop = fit(data, cfg, tc);
    tc.padded_batches = true;
    const FitResult padded = fit(data, cfg, tc);
    for (std::size_t e = 0; e < 3; ++e) {
      CHECK(std::abs(loop.curve.records[e].train_loss - padded.curve.records[e].train_loss) <=
            1e-9);
    }
  }

  TEST_CASE("validation loss and CSV output") {
    const auto data = separable(12, 4);
    TrainConfig tc;
    tc.epochs = 2;
    const FitResult r = fit(data, seq_config(CellType::kGru), tc, data);
    REQUIRE(r.curve.records[0].val_loss.has_value());
    const std::string csv = r.curve.to_csv();
    CHECK(csv.rfind("epoch,train_loss,val_loss,train_acc\n", 0) == 0);
    const auto row = csv.substr(csv.find('\n') + 1);
    CHECK(row.rfind("1,", 0) == 0);
    // 17 significant digits round-trip exactly.
    const auto first_comma = row.find(',');
    const double parsed = std::stod(row.substr(first_comma + 1));
    CHECK(parsed == r.curve.records[0].train_loss);

    const FitResult no_val = fit(data, seq_config(CellType::kGru), tc);
    CHECK(no_val.curve.to_csv().find(",,") != std::string::npos);
  }

  TEST_CASE("fit preconditions") {
    const ModelConfig cfg = seq_config(CellType::kGru);
    CHECK_THROWS_AS(fit({}, cfg, TrainConfig{}), ParameterError);
    std::vector<LabeledSequence> bad = {{{1, 9}, 0}};
    CHECK_THROWS_AS(fit(bad, cfg, TrainConfig{}), StructuralError);
    TrainConfig zero;
    zero.epochs = 0;
    CHECK_THROWS_AS(fit(separable(4, 1), cfg, zero), ParameterError);
  }

  TEST_CASE("divergent training reports epoch and batch") {
    const auto data = separable(16, 8);
    ModelConfig cfg = seq_config(CellType::kGru);
    TrainConfig tc;
    tc.learning_rate = 1e300;
    tc.clip_norm.reset();
    tc.epochs = 5;
    tc.batch_size = 4;
    try {
      fit(data, cfg, tc);
      FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("epoch ") != std::string::npos);
      CHECK(msg.find("batch ") != std::string::npos);
    }
  }
}
