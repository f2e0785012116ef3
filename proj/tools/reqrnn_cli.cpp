// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// reqrnn command-line interface.
// Exit codes: 0 success, 1 check failed, 2 usage or input error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "reqrnn/corpus.hpp"
#include "reqrnn/error.hpp"
#include "reqrnn/eval.hpp"
#include "reqrnn/model_io.hpp"
#include "reqrnn/search.hpp"
#include "reqrnn/textpipe.hpp"
#include "reqrnn/train.hpp"

namespace fs = std::filesystem;
using namespace reqrnn;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

/// Hyperparameter flags shared by train, crossval and search.
struct ModelFlags {
  std::string preset;
  std::optional<std::string> cell;
  std::optional<int> epochs, embedding, layers, units, batch_size;
  std::optional<double> lr, dropout, clip_norm;
  bool no_clip = false;

  void add_to(CLI::App* cmd, bool with_preset = true) {
    if (with_preset) {
      cmd->add_option("--preset", preset, "Start from the published configuration")
          ->check(CLI::IsMember({"paper"}));
    }
    cmd->add_option("--cell", cell, "LSTM or GRU");
    cmd->add_option("--epochs", epochs);
    cmd->add_option("--lr", lr, "Learning rate");
    cmd->add_option("--embedding", embedding, "Embedding dimension");
    cmd->add_option("--layers", layers);
    cmd->add_option("--units", units, "Hidden units");
    cmd->add_option("--dropout", dropout);
    cmd->add_option("--batch-size", batch_size);
    cmd->add_option("--clip-norm", clip_norm);
    cmd->add_flag("--no-clip", no_clip, "Disable gradient clipping");
  }

  TrialConfig resolve(PropertyName property) const {
    TrialConfig c = preset == "paper" ? preset_config(property) : TrialConfig{};
    if (cell) {
      std::string upper = *cell;
      for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      const auto parsed = parse_cell(upper);
      if (!parsed) throw ParameterError("--cell must be LSTM or GRU, got " + *cell);
      c.model.cell = *parsed;
    }
    if (epochs) c.train.epochs = *epochs;
    if (lr) c.train.learning_rate = *lr;
    if (embedding) c.model.embedding_dim = *embedding;
    if (layers) c.model.num_layers = *layers;
    if (units) c.model.hidden_units = *units;
    if (dropout) c.model.dropout = *dropout;
    if (batch_size) c.train.batch_size = *batch_size;
    if (clip_norm) c.train.clip_norm = *clip_norm;
    if (no_clip) c.train.clip_norm.reset();
    c.train.validate();
    // vocab_size is fixed later from the data; validate the rest now.
    ModelConfig probe = c.model;
    probe.vocab_size = 3;
    probe.validate();
    return c;
  }
};

PropertyName property_arg(const std::string& name) {
  const auto p = parse_property(name);
  if (!p) throw ParameterError("unknown property \"" + name + "\"");
  return *p;
}

TaggerMode tagger_arg(const std::string& name) {
  const auto t = parse_tagger_mode(name);
  if (!t) throw ParameterError("unknown tagger \"" + name + "\"");
  return *t;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw InputError("input file not found: " + path);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

int cmd_synth(int n, std::uint64_t seed, const std::string& out) {
  const Dataset ds = generate_synthetic(n, seed);
  save_dataset(ds, out);
  std::cout << "synth: " << ds.size() << " requirements -> " << out << "\n";
  return kOk;
}

int cmd_preprocess(const std::string& input, const std::string& out, const std::string& vocab_out,
                   const std::string& vocab_in, const std::string& tagger_name) {
  require_file(input);
  if (vocab_out.empty() == vocab_in.empty()) {
    throw ParameterError("preprocess: give exactly one of --vocab-out or --vocab-in");
  }
  const TaggerMode tagger = tagger_arg(tagger_name);
  const Dataset ds = load_dataset(input);
  const auto tags = tag_dataset(ds, tagger);
  TagVocabulary vocab;
  if (!vocab_in.empty()) {
    require_file(vocab_in);
    vocab = TagVocabulary::load(vocab_in);
  } else {
    vocab = build_vocabulary(tags);
  }
  EncodeStats stats;
  std::map<std::string, std::size_t> freq;
  std::string jsonl;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (const auto& t : tags[i]) ++freq[t];
    const auto seq = encode(tags[i], vocab, &stats);
    nlohmann::ordered_json j;
    j["id"] = ds.requirements[i].id;
    j["tags"] = tags[i];
    j["ids"] = seq.ids;
    nlohmann::ordered_json labels = nlohmann::ordered_json::object();
    for (auto p : kAllProperties) {
      if (const auto v = ds.requirements[i].labels.get(p)) labels[std::string(to_string(p))] = *v;
    }
    j["labels"] = labels;
    jsonl += j.dump() + "\n";
  }
  write_text(out, jsonl);
  if (!vocab_out.empty()) vocab.save(vocab_out);

  std::cout << "tag frequencies:\n";
  for (const auto& [t, n] : freq) std::cout << "  " << t << " " << n << "\n";
  std::cout << "tokens " << stats.tokens << ", unknown " << stats.unknown << "\n";
  if (stats.unknown > 0) {
    std::cerr << "warning: " << stats.unknown << " tokens mapped to <UNK>:";
    for (const auto& [t, n] : stats.unknown_tags) std::cerr << " " << t << "(" << n << ")";
    std::cerr << "\n";
  }
  std::cout << "preprocess: " << ds.size() << " records -> " << out
            << (vocab_out.empty() ? "" : ", vocabulary -> " + vocab_out) << "\n";
  return kOk;
}

int cmd_train(const std::string& data, const std::string& property_name, const ModelFlags& flags,
              std::uint64_t seed, const std::string& out, std::string curve_path,
              const std::string& val_data, const std::string& tagger_name) {
  require_file(data);
  if (!val_data.empty()) require_file(val_data);
  const PropertyName property = property_arg(property_name);
  const TaggerMode tagger = tagger_arg(tagger_name);
  TrialConfig cfg = flags.resolve(property);
  cfg.train.seed = seed;

  const Dataset ds = load_dataset(data);
  const auto tags = tag_dataset(ds, tagger);
  std::vector<TagSequence> labeled_tags;
  for (auto i : ds.labeled_indices(property)) labeled_tags.push_back(tags[i]);
  if (labeled_tags.empty()) {
    throw InputError(data + ": no requirement is labeled for " + std::string(to_string(property)));
  }
  ModelArtifact artifact;
  artifact.property = property;
  artifact.tagger = tagger;
  artifact.vocabulary = build_vocabulary(labeled_tags);
  artifact.training_seed = seed;
  cfg.model.vocab_size = artifact.vocabulary.size();
  artifact.config = cfg.model;

  const auto train_items = encode_labeled(ds, tags, artifact.vocabulary, property);
  std::vector<LabeledSequence> val_items;
  if (!val_data.empty()) {
    const Dataset vds = load_dataset(val_data);
    val_items = encode_labeled(vds, tag_dataset(vds, tagger), artifact.vocabulary, property);
  }
  FitResult fitted = fit(train_items, cfg.model, cfg.train, val_items);
  artifact.params = std::move(fitted.params);
  save_model(artifact, out);
  if (curve_path.empty()) curve_path = out + ".loss.csv";
  fitted.curve.save(curve_path);
  const auto& last = fitted.curve.records.back();
  std::cout << "train: property=" << to_string(property) << " train_acc=" << fmt(last.train_acc)
            << " train_loss=" << fmt(last.train_loss) << " model=" << out
            << " curve=" << curve_path << "\n";
  return kOk;
}

int cmd_evaluate(const std::string& model_path, const std::string& data,
                 const std::string& property_name, const std::string& predictions_out,
                 const std::string& report_out) {
  require_file(model_path);
  require_file(data);
  const PropertyName property = property_arg(property_name);
  const ModelArtifact artifact = load_model(model_path);
  const EvaluationResult result = evaluate_model(artifact, load_dataset(data), property);
  if (!predictions_out.empty()) write_text(predictions_out, predictions_jsonl(result.predictions));
  std::string summary = "evaluate: property=" + std::string(to_string(property));
  if (result.metrics) {
    summary += " accuracy=" + fmt(result.metrics->accuracy) + " f1=" + fmt(result.metrics->f1);
    if (!report_out.empty()) write_text(report_out, metrics_json(*result.metrics));
  } else {
    summary += " (no labeled requirements; metrics omitted)";
  }
  if (!predictions_out.empty()) summary += " predictions=" + predictions_out;
  if (!report_out.empty() && result.metrics) summary += " report=" + report_out;
  std::cout << summary << "\n";
  return kOk;
}

int cmd_crossval(const std::string& data, const std::string& property_name,
                 const ModelFlags& flags, int folds, std::uint64_t seed,
                 const std::string& report_out, const std::string& tagger_name) {
  require_file(data);
  const PropertyName property = property_arg(property_name);
  const TrialConfig cfg = flags.resolve(property);
  EvalOptions options;
  options.tagger = tagger_arg(tagger_name);
  const CvResult cv =
      cross_validate(load_dataset(data), property, cfg.model, cfg.train, folds, seed, options);
  if (!report_out.empty()) write_text(report_out, cv_report_json(cv));
  std::cout << "crossval: property=" << to_string(property) << " folds=" << folds
            << " accuracy=" << fmt(cv.aggregate.accuracy) << " f1=" << fmt(cv.aggregate.f1)
            << " best_fold=" << cv.best_fold
            << (report_out.empty() ? "" : " report=" + report_out) << "\n";
  return kOk;
}

int cmd_search(const std::string& data, const std::string& property_name,
               const std::string& space_path, const std::string& mode, std::size_t budget,
               const std::string& eval, int folds, double train_fraction,
               const std::string& objective, std::uint64_t seed, const std::string& trials_out,
               const std::string& report_out, const std::string& tagger_name,
               std::optional<int> batch_size) {
  require_file(data);
  if (!space_path.empty()) require_file(space_path);
  const PropertyName property = property_arg(property_name);
  const SearchSpace space = space_path.empty() ? SearchSpace{} : SearchSpace::load(space_path);
  SearchOptions options;
  options.mode = mode == "exhaustive" ? SearchMode::kExhaustive : SearchMode::kRandom;
  options.budget = budget;
  options.eval.kind = eval == "holdout" ? EvalProtocol::Kind::kHoldout
                                        : EvalProtocol::Kind::kCrossValidation;
  options.eval.folds = folds;
  options.eval.train_fraction = train_fraction;
  const auto metric = parse_metric(objective);
  if (!metric) throw ParameterError("unknown objective \"" + objective + "\"");
  options.objective = *metric;
  options.seed = seed;
  options.tagger = tagger_arg(tagger_name);
  if (batch_size) options.base.batch_size = *batch_size;
  const SearchReport report = run_search(load_dataset(data), property, space, options);
  if (!trials_out.empty()) write_text(trials_out, report.trials_csv());
  if (!report_out.empty()) write_text(report_out, report.to_json());
  const auto& best = report.trials[report.best];
  std::cout << "search: property=" << to_string(property) << " trials=" << report.trials.size()
            << " best_trial=" << best.trial << " accuracy=" << fmt(best.metrics.accuracy)
            << " " << objective << "=" << fmt(metric_value(best.metrics, *metric))
            << (trials_out.empty() ? "" : " trials=" + trials_out)
            << (report_out.empty() ? "" : " report=" + report_out) << "\n";
  return kOk;
}

int cmd_predict(const std::string& model_path, const std::string& text, const std::string& input,
                const std::string& out) {
  require_file(model_path);
  if (text.empty() == input.empty()) throw ParameterError("predict: give exactly one of --text or --input");
  const ModelArtifact artifact = load_model(model_path);
  if (!text.empty()) {
    const Vector probs = predict_text(artifact, text);
    std::cout << "predict: property=" << to_string(artifact.property)
              << " satisfied=" << (classify(probs) == 0 ? "true" : "false")
              << " prob_positive=" << fmt(probs[0]) << "\n";
    return kOk;
  }
  require_file(input);
  const EvaluationResult result = evaluate_model(artifact, load_dataset(input), artifact.property);
  const std::string jsonl = predictions_jsonl(result.predictions);
  if (out.empty()) {
    std::cout << jsonl;
  } else {
    write_text(out, jsonl);
    std::cout << "predict: property=" << to_string(artifact.property) << " records="
              << result.predictions.size() << " predictions=" << out << "\n";
  }
  return kOk;
}

int cmd_gradcheck(const std::string& cell_name, double tol, int hidden, int embedding, int length,
                  int layers, int vocab, std::uint64_t seed) {
  std::string upper = cell_name;
  for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  const auto cell = parse_cell(upper);
  if (!cell) throw ParameterError("--cell must be lstm or gru, got " + cell_name);
  ModelConfig config;
  config.cell = *cell;
  config.hidden_units = hidden;
  config.embedding_dim = embedding;
  config.num_layers = layers;
  config.vocab_size = vocab;
  const auto report = gradient_check(config, length, seed, tol);
  std::cout << "gradcheck: cell=" << to_string(config.cell) << " checked=" << report.checked
            << " max_rel_error=" << report.max_relative_error
            << " worst=" << report.worst_parameter << "[" << report.worst_index << "] "
            << (report.passed ? "PASS" : "FAIL") << "\n";
  return report.passed ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reqrnn: POS-tag recurrent classifiers for requirement quality properties"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::uint64_t seed = 42;
  std::string data, property, out, tagger = "rules";

  auto* synth = app.add_subcommand("synth", "Generate a planted-signal synthetic dataset");
  int synth_n = 1000;
  synth->add_option("--n", synth_n, "Number of requirements")->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed);
  synth->add_option("--out", out)->required();

  auto* pre = app.add_subcommand("preprocess", "Tag and encode a dataset");
  std::string vocab_out, vocab_in;
  pre->add_option("--input", data)->required();
  pre->add_option("--out", out)->required();
  pre->add_option("--vocab-out", vocab_out);
  pre->add_option("--vocab-in", vocab_in);
  pre->add_option("--tagger", tagger)->check(CLI::IsMember({"rules", "pretagged"}));

  auto* train = app.add_subcommand("train", "Train one property model");
  ModelFlags train_flags;
  std::string curve, val_data;
  train->add_option("--data", data)->required();
  train->add_option("--property", property)->required();
  train->add_option("--seed", seed);
  train->add_option("--out", out)->required();
  train->add_option("--curve", curve, "Loss curve CSV (default <out>.loss.csv)");
  train->add_option("--val-data", val_data, "Validation dataset for the loss curve");
  train->add_option("--tagger", tagger)->check(CLI::IsMember({"rules", "pretagged"}));
  train_flags.add_to(train);

  auto* evaluate = app.add_subcommand("evaluate", "Score a saved model on a dataset");
  std::string model_path, predictions_out, report_out;
  evaluate->add_option("--model", model_path)->required();
  evaluate->add_option("--data", data)->required();
  evaluate->add_option("--property", property)->required();
  evaluate->add_option("--predictions", predictions_out, "Prediction JSONL output");
  evaluate->add_option("--report", report_out, "Metrics JSON output");

  auto* crossval = app.add_subcommand("crossval", "k-fold cross-validation");
  ModelFlags cv_flags;
  int folds = 10;
  crossval->add_option("--data", data)->required();
  crossval->add_option("--property", property)->required();
  crossval->add_option("--folds", folds)->check(CLI::Range(2, 1000));
  crossval->add_option("--seed", seed);
  crossval->add_option("--report", report_out, "Report JSON output");
  crossval->add_option("--tagger", tagger)->check(CLI::IsMember({"rules", "pretagged"}));
  cv_flags.add_to(crossval);

  auto* search = app.add_subcommand("search", "Hyperparameter search");
  std::string space_path, mode = "random", eval = "cv", objective = "accuracy", trials_out;
  std::size_t budget = 10;
  double train_fraction = 0.8;
  std::optional<int> search_batch;
  search->add_option("--data", data)->required();
  search->add_option("--property", property)->required();
  search->add_option("--space", space_path, "Search space JSON (default: full grid)");
  search->add_option("--mode", mode)->check(CLI::IsMember({"random", "exhaustive"}));
  search->add_option("--budget", budget)->check(CLI::PositiveNumber);
  search->add_option("--eval", eval)->check(CLI::IsMember({"cv", "holdout"}));
  search->add_option("--folds", folds)->check(CLI::Range(2, 1000));
  search->add_option("--train-fraction", train_fraction);
  search->add_option("--objective", objective)
      ->check(CLI::IsMember({"precision", "recall", "accuracy", "f1", "mse"}));
  search->add_option("--seed", seed);
  search->add_option("--trials", trials_out, "Trials CSV output");
  search->add_option("--report", report_out, "Report JSON output");
  search->add_option("--tagger", tagger)->check(CLI::IsMember({"rules", "pretagged"}));
  search->add_option("--batch-size", search_batch);

  auto* predict = app.add_subcommand("predict", "Classify requirement text");
  std::string text;
  predict->add_option("--model", model_path)->required();
  predict->add_option("--text", text);
  predict->add_option("--input", data, "Dataset JSONL to classify");
  predict->add_option("--out", out, "Prediction JSONL output (default stdout)");

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  std::string cell = "gru";
  double tol = 1e-5;
  int hidden = 4, embedding = 3, length = 3, layers = 1, vocab = 6;
  gradcheck->add_option("--cell", cell)->check(CLI::IsMember({"lstm", "gru", "LSTM", "GRU"}));
  gradcheck->add_option("--tol", tol);
  gradcheck->add_option("--hidden", hidden);
  gradcheck->add_option("--embedding", embedding);
  gradcheck->add_option("--length", length);
  gradcheck->add_option("--layers", layers);
  gradcheck->add_option("--vocab", vocab);
  gradcheck->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*synth) return cmd_synth(synth_n, seed, out);
    if (*pre) return cmd_preprocess(data, out, vocab_out, vocab_in, tagger);
    if (*train) {
      return cmd_train(data, property, train_flags, seed, out, curve, val_data, tagger);
    }
    if (*evaluate) return cmd_evaluate(model_path, data, property, predictions_out, report_out);
    if (*crossval) return cmd_crossval(data, property, cv_flags, folds, seed, report_out, tagger);
    if (*search) {
      return cmd_search(data, property, space_path, mode, budget, eval, folds, train_fraction,
                        objective, seed, trials_out, report_out, tagger, search_batch);
    }
    if (*predict) return cmd_predict(model_path, text, data, out);
    if (*gradcheck) {
      return cmd_gradcheck(cell, tol, hidden, embedding, length, layers, vocab, seed);
    }
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
