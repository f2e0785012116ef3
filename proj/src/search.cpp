// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include "reqrnn/search.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "reqrnn/error.hpp"
#include "reqrnn/model_io.hpp"
#include "reqrnn/rng.hpp"

namespace reqrnn {
namespace {

constexpr std::uint64_t kSampleStream = 0x5EA4;

template <class T>
void require_nonempty(const std::vector<T>& v, const char* name) {
  if (v.empty()) throw ParameterError(std::string("search space: \"") + name + "\" is empty");
}

template <class T>
bool member(const std::vector<T>& v, const T& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

template <class T>
std::vector<T> read_list(const nlohmann::json& j, const char* key, const std::vector<T>& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<std::vector<T>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("search space: \"") + key + "\": " + e.what());
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void SearchSpace::validate() const {
  require_nonempty(epochs, "epochs");
  require_nonempty(learning_rate, "learning_rate");
  require_nonempty(embedding_dim, "embedding_dim");
  require_nonempty(num_layers, "num_layers");
  require_nonempty(num_units, "num_units");
  require_nonempty(dropout, "dropout");
  require_nonempty(cell, "cell");
  for (int e : epochs) TrainConfig{.epochs = e}.validate();
  for (double lr : learning_rate) TrainConfig{.learning_rate = lr}.validate();
  for (int n : embedding_dim) ModelConfig{.embedding_dim = n}.validate();
  for (int l : num_layers) ModelConfig{.num_layers = l}.validate();
  for (int u : num_units) ModelConfig{.hidden_units = u}.validate();
  for (double d : dropout) ModelConfig{.dropout = d}.validate();
}

std::size_t SearchSpace::size() const {
  return epochs.size() * learning_rate.size() * embedding_dim.size() * num_layers.size() *
         num_units.size() * dropout.size() * cell.size();
}

TrialConfig SearchSpace::config_at(std::size_t index, const TrainConfig& base) const {
  if (index >= size()) {
    throw ParameterError("search space: index " + std::to_string(index) + " outside [0, " +
                         std::to_string(size()) + ")");
  }
  auto take = [&index](std::size_t radix) {
    const std::size_t digit = index % radix;
    index /= radix;
    return digit;
  };
  TrialConfig c;
  c.train = base;
  c.model.cell = cell[take(cell.size())];
  c.model.dropout = dropout[take(dropout.size())];
  c.model.hidden_units = num_units[take(num_units.size())];
  c.model.num_layers = num_layers[take(num_layers.size())];
  c.model.embedding_dim = embedding_dim[take(embedding_dim.size())];
  c.train.learning_rate = learning_rate[take(learning_rate.size())];
  c.train.epochs = epochs[take(epochs.size())];
  return c;
}

bool SearchSpace::contains(const TrialConfig& c) const {
  return member(epochs, c.train.epochs) && member(learning_rate, c.train.learning_rate) &&
         member(embedding_dim, c.model.embedding_dim) && member(num_layers, c.model.num_layers) &&
         member(num_units, c.model.hidden_units) && member(dropout, c.model.dropout) &&
         member(cell, c.model.cell);
}

std::string SearchSpace::to_json() const {
  nlohmann::ordered_json j;
  j["epochs"] = epochs;
  j["learning_rate"] = learning_rate;
  j["embedding_dim"] = embedding_dim;
  j["num_layers"] = num_layers;
  j["num_units"] = num_units;
  j["dropout"] = dropout;
  auto cells = nlohmann::ordered_json::array();
  for (auto c : cell) cells.push_back(to_string(c));
  j["cell"] = cells;
  return j.dump(2) + "\n";
}

SearchSpace SearchSpace::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("search space: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("search space: expected a JSON object");
  static const std::vector<std::string> known = {"epochs",    "learning_rate", "embedding_dim",
                                                 "num_layers", "num_units",    "dropout",
                                                 "cell",       "optimizer",    "loss"};
  for (const auto& [key, _] : j.items()) {
    if (!member(known, key)) throw InputError("search space: unknown field \"" + key + "\"");
  }
  if (j.contains("optimizer") && j["optimizer"] != "Adam") {
    throw InputError("search space: only the Adam optimizer is supported");
  }
  if (j.contains("loss") && j["loss"] != "binary_cross_entropy") {
    throw InputError("search space: only binary_cross_entropy loss is supported");
  }
  SearchSpace s;
  s.epochs = read_list(j, "epochs", s.epochs);
  s.learning_rate = read_list(j, "learning_rate", s.learning_rate);
  s.embedding_dim = read_list(j, "embedding_dim", s.embedding_dim);
  s.num_layers = read_list(j, "num_layers", s.num_layers);
  s.num_units = read_list(j, "num_units", s.num_units);
  s.dropout = read_list(j, "dropout", s.dropout);
  if (j.contains("cell")) {
    s.cell.clear();
    for (const auto& name : read_list<std::string>(j, "cell", {})) {
      const auto c = parse_cell(name);
      if (!c) throw InputError("search space: unknown cell \"" + name + "\"");
      s.cell.push_back(*c);
    }
  }
  s.validate();
  return s;
}

SearchSpace SearchSpace::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open search space: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string_view to_string(SearchMode mode) {
  return mode == SearchMode::kRandom ? "random" : "exhaustive";
}

std::vector<std::size_t> trial_indices(const SearchSpace& space, const SearchOptions& options) {
  const std::size_t n = space.size();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (options.mode == SearchMode::kExhaustive) return all;
  if (options.budget < 1) throw ParameterError("search: budget must be >= 1");
  if (options.budget > n) {
    throw ParameterError("search: budget " + std::to_string(options.budget) +
                         " exceeds the space size " + std::to_string(n) + " in random mode");
  }
  // Partial Fisher-Yates: the first `budget` slots are a uniform sample
  // without replacement.
  Rng rng(options.seed, kSampleStream);
  for (std::size_t i = 0; i < options.budget; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(all[i], all[j]);
  }
  all.resize(options.budget);
  return all;
}

SearchReport run_search(const Dataset& dataset, PropertyName property, const SearchSpace& space,
                        const SearchOptions& options) {
  space.validate();
  options.base.validate();
  const auto indices = trial_indices(space, options);
  const auto tags = tag_dataset(dataset, options.tagger);

  SearchReport report;
  report.space = space;
  report.options = options;
  report.property = property;
  for (std::size_t t = 0; t < indices.size(); ++t) {
    SearchTrial trial;
    trial.trial = t;
    trial.space_index = indices[t];
    trial.config = space.config_at(indices[t], options.base);
    trial.config.train.seed = Rng(options.seed, t).next_u64();
    const auto start = std::chrono::steady_clock::now();
    if (options.eval.kind == EvalProtocol::Kind::kCrossValidation) {
      const CvResult cv =
          cross_validate_tagged(dataset, tags, property, trial.config.model, trial.config.train,
                                options.eval.folds, trial.config.train.seed);
      trial.metrics = cv.aggregate;
    } else {
      trial.metrics = holdout_evaluate(dataset, property, trial.config.model, trial.config.train,
                                       options.eval.train_fraction, trial.config.train.seed,
                                       options.tagger)
                          .metrics;
    }
    trial.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double value = metric_value(trial.metrics, options.objective);
    trial.objective = options.objective == MetricName::kMse ? -value : value;
    if (t == 0 || trial.objective > report.trials[report.best].objective) report.best = t;
    report.trials.push_back(std::move(trial));
  }
  return report;
}

std::string SearchReport::trials_csv() const {
  std::string out =
      "trial,cell,epochs,lr,embedding,layers,units,dropout,precision,recall,accuracy,f1,mse,"
      "seconds\n";
  for (const auto& t : trials) {
    const auto& m = t.config.model;
    out += std::to_string(t.trial) + "," + std::string(reqrnn::to_string(m.cell)) + "," +
           std::to_string(t.config.train.epochs) + "," + fmt(t.config.train.learning_rate) + "," +
           std::to_string(m.embedding_dim) + "," + std::to_string(m.num_layers) + "," +
           std::to_string(m.hidden_units) + "," + fmt(m.dropout) + "," + fmt(t.metrics.precision) +
           "," + fmt(t.metrics.recall) + "," + fmt(t.metrics.accuracy) + "," + fmt(t.metrics.f1) +
           "," + fmt(t.metrics.mse) + "," + fmt(t.seconds) + "\n";
  }
  return out;
}

std::string SearchReport::to_json() const {
  using ojson = nlohmann::ordered_json;
  ojson j;
  j["property"] = reqrnn::to_string(property);
  j["mode"] = reqrnn::to_string(options.mode);
  j["budget"] = options.budget;
  j["eval"] = options.eval.kind == EvalProtocol::Kind::kCrossValidation
                  ? ojson{{"kind", "cv"}, {"folds", options.eval.folds}}
                  : ojson{{"kind", "holdout"}, {"train_fraction", options.eval.train_fraction}};
  j["objective"] = reqrnn::to_string(options.objective);
  j["seed"] = options.seed;
  j["space"] = ojson::parse(space.to_json());
  j["space_size"] = space.size();
  auto list = ojson::array();
  for (const auto& t : trials) {
    ojson tj;
    tj["trial"] = t.trial;
    tj["space_index"] = t.space_index;
    tj["model"] = reqrnn::to_json(t.config.model);
    tj["train"] = reqrnn::to_json(t.config.train);
    tj["metrics"] = ojson::parse(metrics_json(t.metrics));
    tj["objective"] = t.objective;
    list.push_back(std::move(tj));
  }
  j["trials"] = std::move(list);
  if (!trials.empty()) j["best_trial"] = best;
  return j.dump(2) + "\n";
}

TrialConfig preset_config(PropertyName property) {
  TrialConfig c;
  c.model.cell = CellType::kGru;
  c.model.num_layers = 1;
  switch (property) {
    case PropertyName::kComplete:
      c.train.learning_rate = 0.01;
      c.train.epochs = 5;
      c.model.dropout = 0.0;
      c.model.embedding_dim = 64;
      c.model.hidden_units = 256;
      break;
    case PropertyName::kSingular:
      c.train.learning_rate = 0.01;
      c.train.epochs = 40;
      c.model.dropout = 0.3;
      c.model.embedding_dim = 128;
      c.model.hidden_units = 64;
      break;
    case PropertyName::kAppropriate:
      c.train.learning_rate = 0.001;
      c.train.epochs = 100;
      c.model.dropout = 0.3;
      c.model.embedding_dim = 2048;
      c.model.hidden_units = 1024;
      break;
    case PropertyName::kCorrect:
      c.train.learning_rate = 0.01;
      c.train.epochs = 4;
      c.model.dropout = 0.0;
      c.model.embedding_dim = 128;
      c.model.hidden_units = 64;
      break;
  }
  return c;
}

}  // namespace reqrnn
