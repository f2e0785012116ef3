// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include "reqrnn/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "reqrnn/error.hpp"

namespace reqrnn {
namespace {

constexpr std::string_view kMagic = "RQRNN";
constexpr std::size_t kPrefix = 5 + 4 + 8;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <class T>
T get_le(std::string_view in, std::size_t at) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  }
  return static_cast<T>(v);
}

template <class J>
const J& require(const J& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("model header: missing \"") + key + "\"");
  return j.at(key);
}

}  // namespace

nlohmann::ordered_json to_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["cell"] = to_string(c.cell);
  j["vocab_size"] = c.vocab_size;
  j["embedding_dim"] = c.embedding_dim;
  j["hidden_units"] = c.hidden_units;
  j["num_layers"] = c.num_layers;
  j["dropout"] = c.dropout;
  j["num_classes"] = c.num_classes;
  return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    const auto cell = parse_cell(j.at("cell").get<std::string>());
    if (!cell) throw FormatError("model config: unknown cell " + j.at("cell").dump());
    c.cell = *cell;
    c.vocab_size = j.at("vocab_size").get<int>();
    c.embedding_dim = j.at("embedding_dim").get<int>();
    c.hidden_units = j.at("hidden_units").get<int>();
    c.num_layers = j.at("num_layers").get<int>();
    c.dropout = j.at("dropout").get<double>();
    c.num_classes = j.value("num_classes", 2);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::ordered_json to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_epsilon"] = c.adam_epsilon;
  j["clip_norm"] = c.clip_norm ? nlohmann::ordered_json(*c.clip_norm) : nlohmann::ordered_json();
  j["seed"] = c.seed;
  j["shuffle_each_epoch"] = c.shuffle_each_epoch;
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
    if (j.contains("clip_norm")) {
      c.clip_norm = j["clip_norm"].is_null() ? std::nullopt
                                             : std::optional<double>(j["clip_norm"].get<double>());
    }
    c.seed = j.value("seed", c.seed);
    c.shuffle_each_epoch = j.value("shuffle_each_epoch", c.shuffle_each_epoch);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string serialize_model(const ModelArtifact& a) {
  check_shapes(a.params, a.config);
  if (a.vocabulary.size() != a.config.vocab_size) {
    throw StructuralError("save_model: vocabulary has " + std::to_string(a.vocabulary.size()) +
                          " tags but config.vocab_size is " + std::to_string(a.config.vocab_size));
  }
  nlohmann::ordered_json header;
  header["format_version"] = kModelFormatVersion;
  header["property"] = to_string(a.property);
  header["config"] = to_json(a.config);
  header["tagger"] = to_string(a.tagger);
  header["lexicon"] = lexicon_version();
  header["vocabulary"] = nlohmann::ordered_json::parse(a.vocabulary.to_json());
  header["tool_version"] = a.tool_version;
  header["training_seed"] = a.training_seed;
  auto manifest = nlohmann::ordered_json::array();
  std::uint64_t offset = 0;
  const auto tensors = a.params.tensors();
  for (const auto& t : tensors) {
    manifest.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}, {"offset", offset}});
    offset += t.values.size() * sizeof(double);
  }
  header["manifest"] = std::move(manifest);
  header["payload_bytes"] = offset;

  const std::string text = header.dump();
  std::string out(kMagic);
  put_le<std::uint32_t>(out, kModelFormatVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  out.reserve(out.size() + offset);
  for (const auto& t : tensors) {
    for (double x : t.values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
  }
  return out;
}

ModelArtifact deserialize_model(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw FormatError("not a model file: missing RQRNN magic");
  }
  if (bytes.size() < kPrefix) {
    throw FormatError("truncated model file: expected at least " + std::to_string(kPrefix) +
                      " bytes, found " + std::to_string(bytes.size()));
  }
  const auto version = get_le<std::uint32_t>(bytes, 5);
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version) +
                      ", expected " + std::to_string(kModelFormatVersion));
  }
  const auto header_len = get_le<std::uint64_t>(bytes, 9);
  if (header_len > bytes.size() - kPrefix) {
    throw FormatError("truncated model header: expected " + std::to_string(header_len) +
                      " bytes, found " + std::to_string(bytes.size() - kPrefix));
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(kPrefix, header_len));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("model header: malformed JSON: ") + e.what());
  }

  ModelArtifact a;
  const auto header_version = require(header, "format_version").get<std::uint32_t>();
  if (header_version != kModelFormatVersion) {
    throw FormatError("model header version " + std::to_string(header_version) + ", expected " +
                      std::to_string(kModelFormatVersion));
  }
  const auto property = parse_property(require(header, "property").get<std::string>());
  if (!property) throw FormatError("model header: unknown property " + header["property"].dump());
  a.property = *property;
  a.config = model_config_from_json(require(header, "config"));
  const auto tagger = parse_tagger_mode(header.value("tagger", std::string("rules")));
  if (!tagger) throw FormatError("model header: unknown tagger " + header["tagger"].dump());
  a.tagger = *tagger;
  try {
    a.vocabulary = TagVocabulary::from_json(require(header, "vocabulary").dump());
  } catch (const InputError& e) {
    throw FormatError(std::string("model header: ") + e.what());
  }
  if (a.vocabulary.size() != a.config.vocab_size) {
    throw FormatError("model header: vocabulary size " + std::to_string(a.vocabulary.size()) +
                      " differs from config.vocab_size " + std::to_string(a.config.vocab_size));
  }
  a.tool_version = header.value("tool_version", std::string());
  a.training_seed = header.value("training_seed", std::uint64_t{0});

  a.params = ParameterSet::zeros(a.config);
  auto tensors = a.params.tensors();
  const auto& manifest = require(header, "manifest");
  if (!manifest.is_array() || manifest.size() != tensors.size()) {
    throw FormatError("model header: manifest lists " + std::to_string(manifest.size()) +
                      " tensors, expected " + std::to_string(tensors.size()));
  }
  const std::size_t payload_at = kPrefix + header_len;
  const std::size_t available = bytes.size() - payload_at;
  std::size_t expected = 0;
  for (const auto& t : tensors) expected += t.values.size() * sizeof(double);
  if (available != expected) {
    throw FormatError("model payload size mismatch: expected " + std::to_string(expected) +
                      " bytes, found " + std::to_string(available));
  }
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    const auto& entry = manifest[k];
    const auto name = entry.value("name", std::string());
    const auto rows = entry.value("rows", std::size_t{0});
    const auto cols = entry.value("cols", std::size_t{0});
    const auto offset = entry.value("offset", std::size_t{0});
    if (name != tensors[k].name || rows != tensors[k].rows || cols != tensors[k].cols) {
      throw FormatError("model manifest entry " + std::to_string(k) + " is " + name + " " +
                        std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
                        tensors[k].name + " " + std::to_string(tensors[k].rows) + "x" +
                        std::to_string(tensors[k].cols));
    }
    if (offset + tensors[k].values.size() * sizeof(double) > available) {
      throw FormatError("model manifest entry " + name + " runs past the payload");
    }
    auto dst = tensors[k].values;
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes, payload_at + offset + 8 * i));
      if (!std::isfinite(dst[i])) throw FormatError("model payload: non-finite value in " + name);
    }
  }
  return a;
}

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(artifact);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write model: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing model: " + path.string());
}

ModelArtifact load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize_model(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Vector predict_text(const ModelArtifact& artifact, std::string_view text) {
  std::vector<std::string> tags;
  for (auto& t : analyze(text, artifact.tagger)) tags.push_back(std::move(t.tag));
  const auto seq = encode(tags, artifact.vocabulary);
  return forward_with_mask(seq.ids, artifact.params, artifact.config, Vector{}).probs;
}

}  // namespace reqrnn
