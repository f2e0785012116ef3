// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Model files: "RQRNN", uint32 LE format version, uint64 LE header length,
// a JSON header, then the raw little-endian float64 payload in manifest
// order. The header carries the property, model config, tag vocabulary,
// parameter manifest (name, rows, cols, byte offset), tool version and
// training seed.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "reqrnn/corpus.hpp"
#include "reqrnn/nn.hpp"
#include "reqrnn/textpipe.hpp"
#include "reqrnn/train.hpp"

namespace reqrnn {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::uint32_t kModelFormatVersion = 1;

struct ModelArtifact {
  PropertyName property = PropertyName::kSingular;
  ModelConfig config;
  TagVocabulary vocabulary;
  ParameterSet params;
  TaggerMode tagger = TaggerMode::kRules;
  std::uint64_t training_seed = 0;
  std::string tool_version = std::string(kToolVersion);
};

std::string serialize_model(const ModelArtifact& artifact);
/// Validates magic, version and payload size before building the artifact.
ModelArtifact deserialize_model(std::string_view bytes);
void save_model(const ModelArtifact& artifact, const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

/// Infer-mode probabilities for raw requirement text.
Vector predict_text(const ModelArtifact& artifact, std::string_view text);

// JSON forms shared by model headers, reports and search files.
nlohmann::ordered_json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const TrainConfig& config);
/// Fields absent from `j` keep the values in `base`.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

}  // namespace reqrnn
