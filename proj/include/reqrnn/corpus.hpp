// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Labeled requirement datasets: JSONL I/O, fold plans, splits and the
// planted-signal synthetic generator.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reqrnn {

enum class PropertyName { kSingular = 0, kComplete = 1, kAppropriate = 2, kCorrect = 3 };

inline constexpr std::array<PropertyName, 4> kAllProperties = {
    PropertyName::kSingular, PropertyName::kComplete, PropertyName::kAppropriate,
    PropertyName::kCorrect};

std::string_view to_string(PropertyName p);
/// Accepts the lowercase names only.
std::optional<PropertyName> parse_property(std::string_view name);

/// Per-property optional labels. true = the requirement has the property.
class LabelSet {
 public:
  std::optional<bool> get(PropertyName p) const { return values_[index(p)]; }
  void set(PropertyName p, bool value) { values_[index(p)] = value; }
  void clear(PropertyName p) { values_[index(p)].reset(); }
  bool has(PropertyName p) const { return values_[index(p)].has_value(); }
  bool operator==(const LabelSet&) const = default;

 private:
  static std::size_t index(PropertyName p) { return static_cast<std::size_t>(p); }
  std::array<std::optional<bool>, 4> values_{};
};

struct Requirement {
  std::string id;
  std::string text;
  LabelSet labels;
  std::optional<std::string> source;

  bool operator==(const Requirement&) const = default;
};

struct Dataset {
  std::string name;
  std::vector<Requirement> requirements;

  std::size_t size() const { return requirements.size(); }
  /// Indices (in dataset order) of requirements labeled for `p`.
  std::vector<std::size_t> labeled_indices(PropertyName p) const;
  /// Sub-dataset with the given indices, in the given order.
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

Dataset load_dataset(const std::filesystem::path& path);
/// Parses JSONL text; `origin` is used in error messages.
Dataset parse_dataset(std::string_view jsonl, const std::string& origin = "<memory>");
/// Canonical JSONL: keys id, text, labels (property order), source.
std::string dataset_to_jsonl(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

inline constexpr int kUnassigned = -1;

struct FoldPlan {
  int k = 0;
  /// One entry per dataset requirement; kUnassigned for unlabeled ones.
  std::vector<int> assignments;
  /// Requirements without a label for the property.
  std::size_t excluded = 0;

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
  std::size_t fold_size(int fold) const;
};

/// Seeded shuffle of the labeled subset, then round-robin fold assignment.
FoldPlan make_folds(const Dataset& dataset, PropertyName property, int k, std::uint64_t seed);

struct Split {
  Dataset train;
  Dataset test;
};

/// |train| = round(train_fraction * labeled count); unlabeled rows dropped.
Split holdout_split(const Dataset& dataset, PropertyName property, double train_fraction,
                    std::uint64_t seed);

struct ThreeWaySplit {
  Dataset train;
  Dataset validation;
  Dataset test;
};

/// train / validation / test; test receives the remainder.
ThreeWaySplit three_way_split(const Dataset& dataset, PropertyName property,
                              double train_fraction, double validation_fraction,
                              std::uint64_t seed);

/// Planted textual signals used by the synthetic generator. A requirement
/// lacks a property exactly when its text carries the matching marker.
struct SignalSpec {
  /// Modal verb heading each clause; "not singular" = at least
  /// `singular_min_clauses` clauses "<modal> <verb>".
  std::string modal = "shall";
  int singular_min_clauses = 2;
  /// "Not complete" = an open-ended list ending in this word (", etc.").
  std::string complete_marker = "etc";
  /// "Not appropriate" = a design-level "using <technology>" clause.
  std::string appropriate_marker = "using";
  /// "Not correct" = a hedging adverb right after the modal.
  std::vector<std::string> correct_markers = {"possibly", "perhaps", "probably"};
};

/// n requirements with all four labels, each property balanced to
/// exactly floor(n/2) or ceil(n/2) positives.
Dataset generate_synthetic(int n, std::uint64_t seed, const SignalSpec& spec = {});

}  // namespace reqrnn
