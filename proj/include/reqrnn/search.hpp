// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Hyperparameter search: exhaustive grid or seeded random sampling without
// replacement, each trial scored by cross-validation or a holdout split.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reqrnn/corpus.hpp"
#include "reqrnn/eval.hpp"
#include "reqrnn/nn.hpp"
#include "reqrnn/train.hpp"

namespace reqrnn {

struct TrialConfig {
  ModelConfig model;
  TrainConfig train;
};

/// Candidate lists. Enumeration order is lexicographic over the fields in
/// declaration order, the last field (cell) varying fastest.
struct SearchSpace {
  std::vector<int> epochs = {3, 4, 5, 10, 30, 40, 100};
  std::vector<double> learning_rate = {0.1, 0.01, 0.001};
  std::vector<int> embedding_dim = {64, 128, 256, 2048};
  std::vector<int> num_layers = {1, 2};
  std::vector<int> num_units = {64, 128, 256, 1024};
  std::vector<double> dropout = {0.0, 0.1, 0.3};
  std::vector<CellType> cell = {CellType::kLstm, CellType::kGru};

  void validate() const;
  std::size_t size() const;
  /// Config at mixed-radix position `index`; `base` supplies the fields the
  /// space does not cover (batch size, Adam constants, clipping).
  TrialConfig config_at(std::size_t index, const TrainConfig& base = {}) const;
  /// True when every hyperparameter of `config` is one of the listed values.
  bool contains(const TrialConfig& config) const;

  std::string to_json() const;
  static SearchSpace from_json(std::string_view text);
  static SearchSpace load(const std::filesystem::path& path);
  bool operator==(const SearchSpace&) const = default;
};

enum class SearchMode { kRandom, kExhaustive };
std::string_view to_string(SearchMode mode);

struct EvalProtocol {
  enum class Kind { kCrossValidation, kHoldout };
  Kind kind = Kind::kCrossValidation;
  int folds = 10;
  double train_fraction = 0.8;
};

struct SearchOptions {
  SearchMode mode = SearchMode::kRandom;
  /// Trials in random mode; exhaustive mode runs the whole space.
  std::size_t budget = 10;
  EvalProtocol eval;
  /// Maximized; for mse the objective is its negation.
  MetricName objective = MetricName::kAccuracy;
  std::uint64_t seed = 0;
  TrainConfig base;
  TaggerMode tagger = TaggerMode::kRules;
};

struct SearchTrial {
  std::size_t trial = 0;
  std::size_t space_index = 0;
  TrialConfig config;
  Metrics metrics;
  double objective = 0.0;
  /// Wall time; not part of the deterministic output.
  double seconds = 0.0;
};

struct SearchReport {
  std::vector<SearchTrial> trials;
  std::size_t best = 0;
  SearchSpace space;
  SearchOptions options;
  PropertyName property = PropertyName::kSingular;

  /// Header `trial,cell,epochs,lr,embedding,layers,units,dropout,precision,
  /// recall,accuracy,f1,mse,seconds`.
  std::string trials_csv() const;
  std::string to_json() const;
};

/// Space indices the search visits, in trial order.
std::vector<std::size_t> trial_indices(const SearchSpace& space, const SearchOptions& options);

SearchReport run_search(const Dataset& dataset, PropertyName property, const SearchSpace& space,
                        const SearchOptions& options);

/// Best published configuration for a property.
TrialConfig preset_config(PropertyName property);

}  // namespace reqrnn
