// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include <algorithm>
#include <cmath>

#include "reqrnn/error.hpp"
#include "reqrnn/train.hpp"

namespace reqrnn {

GradientCheckReport gradient_check(const ModelConfig& config, int length, std::uint64_t seed,
                                   double tolerance, const GradientHook& hook) {
  config.validate();
  if (length < 1) throw ParameterError("gradient_check: length must be >= 1");
  constexpr double kEps = 1e-6;

  Rng rng(seed, 0x6C);
  ParameterSet params = init_parameters(config, rng);
  std::vector<int> ids(static_cast<std::size_t>(length));
  for (auto& id : ids) id = static_cast<int>(rng.below(static_cast<std::uint64_t>(config.vocab_size)));
  const int label = static_cast<int>(rng.below(2));
  const Vector no_mask;

  const ForwardTrace trace = forward_with_mask(ids, params, config, no_mask);
  ParameterSet analytic = backward(trace, label, params, config);
  if (hook) hook(analytic);

  auto objective = [&] {
    const auto probs = forward_with_mask(ids, params, config, no_mask).probs;
    return -std::log(probs[static_cast<std::size_t>(label)]);
  };

  GradientCheckReport report;
  report.tolerance = tolerance;
  auto values = params.tensors();
  const auto grads = analytic.tensors();
  for (std::size_t k = 0; k < values.size(); ++k) {
    auto v = values[k].values;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double orig = v[i];
      v[i] = orig + kEps;
      const double up = objective();
      v[i] = orig - kEps;
      const double down = objective();
      v[i] = orig;
      const double numeric = (up - down) / (2.0 * kEps);
      const double a = grads[k].values[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.checked;
      if (rel > report.max_relative_error || report.worst_parameter.empty()) {
        report.max_relative_error = rel;
        report.worst_parameter = values[k].name;
        report.worst_index = i;
      }
    }
  }
  report.passed = report.max_relative_error <= tolerance;
  return report;
}

}  // namespace reqrnn
