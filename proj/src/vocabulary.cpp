// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "reqrnn/error.hpp"
#include "reqrnn/textpipe.hpp"

namespace reqrnn {

TagVocabulary::TagVocabulary() {
  add(kPadName);
  add(kUnkName);
}

int TagVocabulary::encode(std::string_view tag) const {
  // A literal "<PAD>" tag in the input still encodes as UNK.
  const auto it = index_.find(std::string(tag));
  return it == index_.end() || it->second == kPad ? kUnk : it->second;
}

bool TagVocabulary::contains(std::string_view tag) const {
  return index_.count(std::string(tag)) > 0;
}

const std::string& TagVocabulary::decode(int index) const {
  if (index < 0 || index >= size()) {
    throw StructuralError("TagVocabulary::decode: index " + std::to_string(index) +
                          " outside [0, " + std::to_string(size()) + ")");
  }
  return tags_[static_cast<std::size_t>(index)];
}

int TagVocabulary::add(std::string_view tag) {
  if (tag.empty()) throw ParameterError("TagVocabulary: empty tag");
  const auto [it, inserted] = index_.emplace(std::string(tag), size());
  if (inserted) tags_.emplace_back(tag);
  return it->second;
}

std::string TagVocabulary::to_json() const {
  nlohmann::ordered_json out;
  out["version"] = kFormatVersion;
  for (int i = 0; i < size(); ++i) out[tags_[static_cast<std::size_t>(i)]] = i;
  return out.dump(2) + "\n";
}

TagVocabulary TagVocabulary::from_json(std::string_view text) {
  nlohmann::json in;
  try {
    in = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("vocabulary: malformed JSON: ") + e.what());
  }
  if (!in.is_object()) throw InputError("vocabulary: expected a JSON object");
  if (!in.contains("version") || !in["version"].is_number_integer()) {
    throw InputError("vocabulary: missing integer \"version\"");
  }
  if (in["version"].get<int>() != kFormatVersion) {
    throw InputError("vocabulary: unsupported version " + in["version"].dump() + ", expected " +
                     std::to_string(kFormatVersion));
  }
  std::vector<std::string> by_index(in.size() - 1);
  for (const auto& [tag, value] : in.items()) {
    if (tag == "version") continue;
    if (!value.is_number_integer()) throw InputError("vocabulary: index of \"" + tag + "\" is not an integer");
    const auto idx = value.get<long long>();
    if (idx < 0 || idx >= static_cast<long long>(by_index.size())) {
      throw InputError("vocabulary: index " + std::to_string(idx) + " of \"" + tag +
                       "\" is not dense");
    }
    auto& slot = by_index[static_cast<std::size_t>(idx)];
    if (!slot.empty()) throw InputError("vocabulary: index " + std::to_string(idx) + " used twice");
    slot = tag;
  }
  if (by_index.size() < 2 || by_index[kPad] != kPadName || by_index[kUnk] != kUnkName) {
    throw InputError("vocabulary: <PAD> must be 0 and <UNK> must be 1");
  }
  TagVocabulary vocab;
  for (std::size_t i = 2; i < by_index.size(); ++i) vocab.add(by_index[i]);
  return vocab;
}

void TagVocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write vocabulary: " + path.string());
  out << to_json();
}

TagVocabulary TagVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open vocabulary: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

TagVocabulary build_vocabulary(std::span<const TagSequence> tagged) {
  if (tagged.empty()) throw ParameterError("build_vocabulary: empty collection");
  TagVocabulary vocab;
  for (const auto& seq : tagged) {
    for (const auto& t : seq) vocab.add(t);
  }
  return vocab;
}

EncodedSequence encode(std::span<const std::string> tags, const TagVocabulary& vocab,
                       EncodeStats* stats) {
  if (tags.empty()) throw ParameterError("encode: empty tag sequence");
  EncodedSequence seq;
  seq.ids.reserve(tags.size());
  for (const auto& t : tags) {
    const int id = vocab.encode(t);
    seq.ids.push_back(id);
    if (stats) {
      ++stats->tokens;
      if (id == TagVocabulary::kUnk) {
        ++stats->unknown;
        ++stats->unknown_tags[t];
      }
    }
  }
  return seq;
}

EncodedSequence encode(std::span<const Token> tokens, const TagVocabulary& vocab,
                       EncodeStats* stats) {
  std::vector<std::string> tags;
  tags.reserve(tokens.size());
  for (const auto& t : tokens) tags.push_back(t.tag);
  return encode(tags, vocab, stats);
}

TagSequence decode(const EncodedSequence& seq, const TagVocabulary& vocab) {
  TagSequence out;
  out.reserve(seq.ids.size());
  for (int id : seq.ids) out.push_back(vocab.decode(id));
  return out;
}

}  // namespace reqrnn
