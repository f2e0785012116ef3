// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Batch-level kernels. Each has a serial reference and an OpenMP path; the
// parallel path computes per-sequence results concurrently and reduces them
// in sequence order, so both paths return bit-identical values.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "reqrnn/nn.hpp"
#include "reqrnn/rng.hpp"

namespace reqrnn {

enum class Execution { kSerial, kParallel };

/// An encoded sequence with its class (0 = property satisfied).
struct LabeledSequence {
  std::vector<int> ids;
  int label = 0;
};

struct BatchStats {
  double loss_sum = 0.0;
  std::size_t correct = 0;
  std::size_t count = 0;
};

/// Worker threads the parallel path uses (1 without OpenMP).
int thread_count();

/// Mean gradient over data[batch[i]] written to `grads` (reshaped as
/// needed). Dropout masks are drawn from `dropout_rng` serially, one per
/// sequence in batch order, before any parallel work.
BatchStats batch_gradient(std::span<const LabeledSequence> data,
                          std::span<const std::size_t> batch, const ParameterSet& params,
                          const ModelConfig& config, Rng& dropout_rng, Execution execution,
                          ParameterSet& grads);

/// Infer-mode class probabilities, one per sequence.
std::vector<Vector> predict_batch(std::span<const std::vector<int>> sequences,
                                  const ParameterSet& params, const ModelConfig& config,
                                  Execution execution);

}  // namespace reqrnn
