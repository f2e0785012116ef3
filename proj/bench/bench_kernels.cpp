// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Serial vs OpenMP timing for the batch kernels.

#include <chrono>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "reqrnn/kernels.hpp"

using namespace reqrnn;

namespace {

template <class F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"batch kernel benchmark"};
  int batch = 32, hidden = 64, embedding = 128, length = 20, reps = 5;
  std::string cell = "GRU";
  app.add_option("--batch", batch)->check(CLI::PositiveNumber);
  app.add_option("--hidden", hidden)->check(CLI::PositiveNumber);
  app.add_option("--embedding", embedding)->check(CLI::PositiveNumber);
  app.add_option("--length", length)->check(CLI::PositiveNumber);
  app.add_option("--reps", reps)->check(CLI::PositiveNumber);
  app.add_option("--cell", cell)->check(CLI::IsMember({"LSTM", "GRU"}));
  CLI11_PARSE(app, argc, argv);

  ModelConfig cfg;
  cfg.cell = *parse_cell(cell);
  cfg.hidden_units = hidden;
  cfg.embedding_dim = embedding;
  cfg.vocab_size = 40;
  cfg.dropout = 0.3;
  Rng rng(2026);
  const ParameterSet params = init_parameters(cfg, rng);

  std::vector<LabeledSequence> data(static_cast<std::size_t>(batch));
  std::vector<std::vector<int>> seqs;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i].ids.resize(static_cast<std::size_t>(length));
    for (auto& id : data[i].ids) id = static_cast<int>(rng.below(40));
    data[i].label = static_cast<int>(i % 2);
    seqs.push_back(data[i].ids);
    idx.push_back(i);
  }

  ParameterSet g_serial, g_parallel;
  const double grad_serial = best_ms(reps, [&] {
    Rng d(7);
    batch_gradient(data, idx, params, cfg, d, Execution::kSerial, g_serial);
  });
  const double grad_parallel = best_ms(reps, [&] {
    Rng d(7);
    batch_gradient(data, idx, params, cfg, d, Execution::kParallel, g_parallel);
  });

  std::vector<Vector> p_serial, p_parallel;
  const double pred_serial =
      best_ms(reps, [&] { p_serial = predict_batch(seqs, params, cfg, Execution::kSerial); });
  const double pred_parallel =
      best_ms(reps, [&] { p_parallel = predict_batch(seqs, params, cfg, Execution::kParallel); });

  std::printf("cell=%s batch=%d hidden=%d embedding=%d length=%d threads=%d\n", cell.c_str(),
              batch, hidden, embedding, length, thread_count());
  std::printf("%-15s %10s %10s %8s %s\n", "kernel", "serial_ms", "omp_ms", "speedup", "match");
  std::printf("%-15s %10.3f %10.3f %8.2f %s\n", "batch_gradient", grad_serial, grad_parallel,
              grad_serial / grad_parallel, g_serial == g_parallel ? "bit-exact" : "DIFFER");
  std::printf("%-15s %10.3f %10.3f %8.2f %s\n", "predict_batch", pred_serial, pred_parallel,
              pred_serial / pred_parallel, p_serial == p_parallel ? "bit-exact" : "DIFFER");
  return g_serial == g_parallel && p_serial == p_parallel ? 0 : 1;
}
