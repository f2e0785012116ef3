// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Requirement text -> Treebank tokens -> Penn POS tags -> vocabulary ids.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reqrnn/corpus.hpp"

namespace reqrnn {

/// Byte range of a token inside the source text.
struct TokenSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct Tokenization {
  std::string_view text;
  std::vector<TokenSpan> spans;

  std::vector<std::string> surfaces() const;
  /// separator(i) is the text between token i-1 and token i; separator(n)
  /// is the trailing text.
  std::string_view separator(std::size_t i) const;
  /// Concatenates separators and tokens; equals `text`.
  std::string reconstruct() const;
};

/// Treebank-style word tokenization (NLTK word_tokenize behavior, without
/// the quote rewriting, so every token is a substring of the input).
Tokenization tokenize_spans(std::string_view text);
std::vector<std::string> tokenize(std::string_view text);

struct Token {
  std::string surface;
  std::string tag;
  bool operator==(const Token&) const = default;
};

enum class TaggerMode { kRules, kPretagged };

std::string_view to_string(TaggerMode mode);
std::optional<TaggerMode> parse_tagger_mode(std::string_view name);

/// The 45-symbol Penn Treebank tagset emitted by the rules tagger.
std::span<const std::string_view> penn_tagset();
bool is_penn_tag(std::string_view tag);
/// Version string of the bundled lexicon.
std::string_view lexicon_version();

/// kRules: lexicon + suffix + context rules over plain surfaces.
/// kPretagged: every token must be "surface/TAG" (split at the last '/').
std::vector<Token> tag(std::span<const std::string> tokens, TaggerMode mode);

/// Requirement text -> tagged tokens. Pretagged text is split on whitespace.
std::vector<Token> analyze(std::string_view text, TaggerMode mode);

using TagSequence = std::vector<std::string>;

std::vector<TagSequence> tag_dataset(const Dataset& dataset, TaggerMode mode);

/// Dense tag <-> index map with PAD = 0 and UNK = 1 reserved.
class TagVocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr std::string_view kPadName = "<PAD>";
  static constexpr std::string_view kUnkName = "<UNK>";
  static constexpr int kFormatVersion = 1;

  TagVocabulary();

  int size() const { return static_cast<int>(tags_.size()); }
  /// Index of `tag`, or kUnk.
  int encode(std::string_view tag) const;
  bool contains(std::string_view tag) const;
  const std::string& decode(int index) const;
  /// Appends `tag` if absent; returns its index.
  int add(std::string_view tag);
  const std::vector<std::string>& tags() const { return tags_; }

  /// {"version": 1, "<PAD>": 0, "<UNK>": 1, "NN": 2, ...}
  std::string to_json() const;
  static TagVocabulary from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static TagVocabulary load(const std::filesystem::path& path);

  bool operator==(const TagVocabulary& other) const { return tags_ == other.tags_; }

 private:
  std::vector<std::string> tags_;
  std::unordered_map<std::string, int> index_;
};

/// Reserved slots, then tags in first-occurrence order.
TagVocabulary build_vocabulary(std::span<const TagSequence> tagged);

struct EncodedSequence {
  std::vector<int> ids;
  std::size_t length() const { return ids.size(); }
};

/// Out-of-vocabulary accounting for encode().
struct EncodeStats {
  std::size_t tokens = 0;
  std::size_t unknown = 0;
  std::map<std::string, std::size_t> unknown_tags;
};

EncodedSequence encode(std::span<const std::string> tags, const TagVocabulary& vocab,
                       EncodeStats* stats = nullptr);
EncodedSequence encode(std::span<const Token> tokens, const TagVocabulary& vocab,
                       EncodeStats* stats = nullptr);
TagSequence decode(const EncodedSequence& seq, const TagVocabulary& vocab);

}  // namespace reqrnn
