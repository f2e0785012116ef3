// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include "reqrnn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "reqrnn/error.hpp"
#include "reqrnn/eval.hpp"
#include "reqrnn/train.hpp"

#ifdef REQRNN_HAVE_OPENMP
#include <omp.h>
#endif

namespace reqrnn {
namespace {

struct SequenceResult {
  double loss = 0.0;
  bool correct = false;
};

SequenceResult sequence_gradient(const LabeledSequence& item, const Vector& mask,
                                 const ParameterSet& params, const ModelConfig& config,
                                 ParameterSet& slot) {
  const ForwardTrace trace = forward_with_mask(item.ids, params, config, mask);
  slot.set_zero();
  backward(trace, item.label, params, config, slot);
  return {loss(trace.probs, item.label), classify(trace.probs) == item.label};
}

}  // namespace

int thread_count() {
#ifdef REQRNN_HAVE_OPENMP
  return std::max(1, omp_get_max_threads());
#else
  return 1;
#endif
}

BatchStats batch_gradient(std::span<const LabeledSequence> data,
                          std::span<const std::size_t> batch, const ParameterSet& params,
                          const ModelConfig& config, Rng& dropout_rng, Execution execution,
                          ParameterSet& grads) {
  if (batch.empty()) throw ParameterError("batch_gradient: empty batch");
  for (std::size_t i : batch) {
    if (i >= data.size()) throw StructuralError("batch_gradient: index out of range");
  }
  const auto H = static_cast<std::size_t>(config.hidden_units);
  std::vector<Vector> masks(batch.size());
  if (config.dropout > 0.0) {
    for (auto& m : masks) m = draw_dropout_mask(H, config.dropout, dropout_rng);
  }

  grads = ParameterSet::zeros(config);
  BatchStats stats;
  stats.count = batch.size();
  auto reduce = [&](const SequenceResult& r, const ParameterSet& slot) {
    grads.add(slot);
    stats.loss_sum += r.loss;
    stats.correct += r.correct ? 1 : 0;
  };

  const std::size_t slots =
      execution == Execution::kSerial ? 1 : std::min<std::size_t>(thread_count(), batch.size());
  std::vector<ParameterSet> slot_grads(slots, ParameterSet::zeros(config));
  std::vector<SequenceResult> results(slots);

  if (slots == 1) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      results[0] = sequence_gradient(data[batch[i]], masks[i], params, config, slot_grads[0]);
      reduce(results[0], slot_grads[0]);
    }
  } else {
    for (std::size_t wave = 0; wave < batch.size(); wave += slots) {
      const std::size_t n = std::min(slots, batch.size() - wave);
      std::exception_ptr failure;
#pragma omp parallel for schedule(static, 1)
      for (std::size_t s = 0; s < n; ++s) {
        try {
          results[s] = sequence_gradient(data[batch[wave + s]], masks[wave + s], params, config,
                                         slot_grads[s]);
        } catch (...) {
#pragma omp critical(reqrnn_batch_failure)
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
      for (std::size_t s = 0; s < n; ++s) reduce(results[s], slot_grads[s]);
    }
  }
  grads.scale(1.0 / static_cast<double>(batch.size()));
  return stats;
}

std::vector<Vector> predict_batch(std::span<const std::vector<int>> sequences,
                                  const ParameterSet& params, const ModelConfig& config,
                                  Execution execution) {
  std::vector<Vector> out(sequences.size());
  const Vector no_mask;
  if (execution == Execution::kSerial || thread_count() == 1) {
    for (std::size_t i = 0; i < sequences.size(); ++i) {
      out[i] = forward_with_mask(sequences[i], params, config, no_mask).probs;
    }
    return out;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    try {
      out[i] = forward_with_mask(sequences[i], params, config, no_mask).probs;
    } catch (...) {
#pragma omp critical(reqrnn_predict_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace reqrnn
