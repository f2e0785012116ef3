// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include "reqrnn/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "reqrnn/error.hpp"
#include "reqrnn/rng.hpp"

namespace reqrnn {
namespace {

using nlohmann::json;

constexpr std::uint64_t kFoldStream = 0xF01D;
constexpr std::uint64_t kSplitStream = 0x5B17;

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t") == std::string_view::npos;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& field,
                       const std::string& what) {
  std::ostringstream msg;
  msg << origin << ": line " << line;
  if (!field.empty()) msg << ", field \"" << field << "\"";
  msg << ": " << what;
  throw InputError(msg.str());
}

Requirement parse_record(std::string_view line, const std::string& origin, std::size_t lineno) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(origin, lineno, "", std::string("malformed JSON: ") + e.what());
  }
  if (!record.is_object()) fail(origin, lineno, "", "record must be a JSON object");

  for (const auto& [key, value] : record.items()) {
    if (key != "id" && key != "text" && key != "labels" && key != "source") {
      fail(origin, lineno, key, "unknown key");
    }
  }

  Requirement req;
  if (!record.contains("id")) fail(origin, lineno, "id", "missing");
  if (!record["id"].is_string()) fail(origin, lineno, "id", "must be a string");
  req.id = record["id"].get<std::string>();
  if (req.id.empty()) fail(origin, lineno, "id", "must be non-empty");

  if (!record.contains("text")) fail(origin, lineno, "text", "missing");
  if (!record["text"].is_string()) fail(origin, lineno, "text", "must be a string");
  req.text = record["text"].get<std::string>();
  if (trim(req.text).empty()) fail(origin, lineno, "text", "must be non-empty after trimming");

  if (record.contains("labels")) {
    const auto& labels = record["labels"];
    if (!labels.is_object()) fail(origin, lineno, "labels", "must be an object");
    for (const auto& [key, value] : labels.items()) {
      const auto prop = parse_property(key);
      if (!prop) fail(origin, lineno, "labels." + key, "unknown quality property");
      if (!value.is_boolean()) fail(origin, lineno, "labels." + key, "must be a boolean");
      req.labels.set(*prop, value.get<bool>());
    }
  }

  if (record.contains("source")) {
    const auto& source = record["source"];
    if (!source.is_string()) fail(origin, lineno, "source", "must be a string");
    req.source = source.get<std::string>();
  }
  return req;
}

std::vector<std::size_t> shuffled_labeled(const Dataset& dataset, PropertyName property,
                                          std::uint64_t seed, std::uint64_t stream) {
  auto indices = dataset.labeled_indices(property);
  Rng rng(seed, stream);
  shuffle(std::span<std::size_t>(indices), rng);
  return indices;
}

}  // namespace

std::string_view to_string(PropertyName p) {
  switch (p) {
    case PropertyName::kSingular: return "singular";
    case PropertyName::kComplete: return "complete";
    case PropertyName::kAppropriate: return "appropriate";
    case PropertyName::kCorrect: return "correct";
  }
  return "unknown";
}

std::optional<PropertyName> parse_property(std::string_view name) {
  for (auto p : kAllProperties) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::vector<std::size_t> Dataset::labeled_indices(PropertyName p) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < requirements.size(); ++i) {
    if (requirements[i].labels.has(p)) out.push_back(i);
  }
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.name = name;
  out.requirements.reserve(indices.size());
  for (auto i : indices) out.requirements.push_back(requirements.at(i));
  return out;
}

Dataset parse_dataset(std::string_view jsonl, const std::string& origin) {
  Dataset dataset;
  std::unordered_map<std::string, std::size_t> first_line;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    const auto eol = jsonl.find('\n', pos);
    const auto line = jsonl.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                       : eol - pos);
    pos = eol == std::string_view::npos ? jsonl.size() : eol + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') fail(origin, lineno, "", "CRLF line ending");
    if (is_blank(line)) continue;

    auto req = parse_record(line, origin, lineno);
    const auto [it, inserted] = first_line.emplace(req.id, lineno);
    if (!inserted) {
      fail(origin, lineno, "id",
           "duplicate id \"" + req.id + "\" (lines " + std::to_string(it->second) + " and " +
               std::to_string(lineno) + ")");
    }
    dataset.requirements.push_back(std::move(req));
  }
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open dataset: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto dataset = parse_dataset(buf.str(), path.string());
  dataset.name = path.stem().string();
  return dataset;
}

std::string dataset_to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const auto& req : dataset.requirements) {
    nlohmann::ordered_json record;
    record["id"] = req.id;
    record["text"] = req.text;
    auto labels = nlohmann::ordered_json::object();
    for (auto p : kAllProperties) {
      if (auto v = req.labels.get(p)) labels[std::string(to_string(p))] = *v;
    }
    record["labels"] = std::move(labels);
    if (req.source) record["source"] = *req.source;
    out += record.dump();
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write dataset: " + path.string());
  out << dataset_to_jsonl(dataset);
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != kUnassigned && assignments[i] != fold) out.push_back(i);
  }
  return out;
}

std::size_t FoldPlan::fold_size(int fold) const {
  return static_cast<std::size_t>(std::count(assignments.begin(), assignments.end(), fold));
}

FoldPlan make_folds(const Dataset& dataset, PropertyName property, int k, std::uint64_t seed) {
  if (k < 2) throw ParameterError("make_folds: k must be >= 2, got " + std::to_string(k));
  const auto order = shuffled_labeled(dataset, property, seed, kFoldStream);
  if (order.size() < static_cast<std::size_t>(k)) {
    throw ParameterError("make_folds: " + std::to_string(order.size()) + " requirements labeled " +
                         std::string(to_string(property)) + ", need at least k = " +
                         std::to_string(k));
  }
  FoldPlan plan;
  plan.k = k;
  plan.assignments.assign(dataset.size(), kUnassigned);
  for (std::size_t j = 0; j < order.size(); ++j) {
    plan.assignments[order[j]] = static_cast<int>(j % static_cast<std::size_t>(k));
  }
  plan.excluded = dataset.size() - order.size();
  return plan;
}

Split holdout_split(const Dataset& dataset, PropertyName property, double train_fraction,
                    std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ParameterError("holdout_split: train_fraction must lie in (0, 1), got " +
                         std::to_string(train_fraction));
  }
  const auto order = shuffled_labeled(dataset, property, seed, kSplitStream);
  if (order.empty()) {
    throw ParameterError("holdout_split: no requirements labeled " +
                         std::string(to_string(property)));
  }
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(order.size())));
  Split split;
  split.train = dataset.subset({order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train)});
  split.test = dataset.subset({order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end()});
  return split;
}

ThreeWaySplit three_way_split(const Dataset& dataset, PropertyName property,
                              double train_fraction, double validation_fraction,
                              std::uint64_t seed) {
  if (!(train_fraction > 0.0 && validation_fraction > 0.0 &&
        train_fraction + validation_fraction < 1.0)) {
    throw ParameterError(
        "three_way_split: need train > 0, validation > 0 and train + validation < 1");
  }
  const auto order = shuffled_labeled(dataset, property, seed, kSplitStream);
  if (order.empty()) {
    throw ParameterError("three_way_split: no requirements labeled " +
                         std::string(to_string(property)));
  }
  const double n = static_cast<double>(order.size());
  const auto n_train = static_cast<std::ptrdiff_t>(std::llround(train_fraction * n));
  const auto n_val = std::min<std::ptrdiff_t>(
      static_cast<std::ptrdiff_t>(std::llround(validation_fraction * n)),
      static_cast<std::ptrdiff_t>(order.size()) - n_train);
  ThreeWaySplit out;
  out.train = dataset.subset({order.begin(), order.begin() + n_train});
  out.validation = dataset.subset({order.begin() + n_train, order.begin() + n_train + n_val});
  out.test = dataset.subset({order.begin() + n_train + n_val, order.end()});
  return out;
}

}  // namespace reqrnn
