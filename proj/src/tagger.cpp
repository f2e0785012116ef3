// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <unordered_map>

#include "lexicon.hpp"
#include "reqrnn/error.hpp"
#include "reqrnn/textpipe.hpp"

namespace reqrnn {
namespace {

constexpr std::array<std::string_view, 45> kPennTags = {
    "CC",  "CD",  "DT",   "EX",  "FW",  "IN",  "JJ",  "JJR", "JJS",   "LS",    "MD",  "NN",
    "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR",   "RBS",   "RP",  "SYM",
    "TO",  "UH",  "VB",   "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT",  "WP",    "WP$", "WRB",
    "$",   "#",   "``",   "''",  "-LRB-", "-RRB-", ",", ".", ":"};

using Lexicon = std::unordered_map<std::string, std::vector<std::string>>;

const Lexicon& lexicon() {
  static const Lexicon table = [] {
    Lexicon out;
    std::istringstream in{std::string(detail::kLexiconData)};
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream fields(line);
      std::string word;
      if (!(fields >> word)) continue;
      std::vector<std::string> tags;
      for (std::string t; fields >> t;) tags.push_back(t);
      out.emplace(std::move(word), std::move(tags));
    }
    return out;
  }();
  return table;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_number(std::string_view s) {
  bool digit = false;
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != '.' && c != ',' && c != ':' && c != '/' && c != '-') {
      return false;
    }
  }
  return digit;
}

bool has_alpha(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; });
}

bool is_capitalized(std::string_view s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

bool is_all_caps(std::string_view s) {
  int letters = 0;
  for (char c : s) {
    if (std::islower(static_cast<unsigned char>(c))) return false;
    if (std::isupper(static_cast<unsigned char>(c))) ++letters;
  }
  return letters >= 2;
}

bool is_noun(std::string_view t) { return t == "NN" || t == "NNS" || t == "NNP" || t == "NNPS"; }

/// Punctuation and symbols have fixed tags; empty result = not punctuation.
std::string punctuation_tag(std::string_view s) {
  if (s == "." || s == "?" || s == "!") return ".";
  if (s == ",") return ",";
  if (s == ":" || s == ";" || s == "..." || s == "--" || s == "-") return ":";
  if (s == "(" || s == "[" || s == "{" || s == "<") return "-LRB-";
  if (s == ")" || s == "]" || s == "}" || s == ">") return "-RRB-";
  if (s == "$") return "$";
  if (s == "#") return "#";
  if (s == "``" || s == "`") return "``";
  if (s == "''") return "''";
  if (s == "%") return "NN";
  if (s == "&") return "CC";
  if (s == "@") return "IN";
  if (s.size() == 1 && !std::isalnum(static_cast<unsigned char>(s[0])) && s != "\"" && s != "'") {
    return "SYM";
  }
  return {};
}

/// Open-class guess from word shape and suffix.
std::string guess_tag(std::string_view word, bool sentence_initial) {
  if (is_number(word)) return "CD";
  if (!has_alpha(word)) return "SYM";
  if (is_all_caps(word)) return "NNP";
  if (is_capitalized(word) && !sentence_initial) return "NNP";
  const std::string w = lowercase(word);
  if (w.find('-') != std::string::npos) return "JJ";
  if (std::any_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return "NN";
  }
  if (ends_with(w, "ing")) return "VBG";
  if (ends_with(w, "ed")) return "VBN";
  if (ends_with(w, "ly")) return "RB";
  if (ends_with(w, "est") && w.size() > 5) return "JJS";
  for (auto suffix : {"tions", "sions", "ments", "nesses", "ities", "ers", "ors"}) {
    if (ends_with(w, suffix)) return "NNS";
  }
  for (auto suffix : {"tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship", "ism", "er",
                      "or", "ist", "age", "ure"}) {
    if (ends_with(w, suffix)) return "NN";
  }
  for (auto suffix : {"able", "ible", "al", "ful", "ous", "ive", "less", "ic", "ary", "ant", "ent"}) {
    if (ends_with(w, suffix)) return "JJ";
  }
  if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is")) {
    return "NNS";
  }
  return "NN";
}

bool contains(const std::vector<std::string>& tags, std::string_view t) {
  return std::find(tags.begin(), tags.end(), t) != tags.end();
}

std::vector<Token> tag_rules(std::span<const std::string> tokens) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  int open_quotes = 0;
  bool sentence_start = true;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& word = tokens[i];
    const std::string prev = out.empty() ? std::string() : out.back().tag;
    // Closest preceding non-adverb tag, for "shall possibly log".
    std::string head;
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (it->tag != "RB") {
        head = it->tag;
        break;
      }
    }

    std::string tag = punctuation_tag(word);
    if (tag.empty() && word == "\"") {
      tag = (open_quotes++ % 2 == 0) ? "``" : "''";
    } else if (tag.empty() && word == "'") {
      tag = (prev == "NNS" || prev == "NNPS") ? "POS" : "''";
    } else if (tag.empty() && (word == "'s" || word == "'S")) {
      tag = is_noun(prev) ? "POS" : "VBZ";
    } else if (tag.empty()) {
      const auto& lex = lexicon();
      auto it = lex.find(word);
      if (it == lex.end()) it = lex.find(lowercase(word));
      const bool known = it != lex.end();
      std::vector<std::string> candidates =
          known ? it->second : std::vector<std::string>{guess_tag(word, sentence_start)};

      tag = candidates.front();
      if (word == "that" && is_noun(prev)) {
        tag = "WDT";
      } else if (head == "MD" || head == "TO") {
        if (contains(candidates, "VB")) {
          tag = "VB";
        } else if (!known && tag != "NNP" && tag != "CD") {
          tag = "VB";
        }
      } else if (prev == "DT" || prev == "PRP$" || prev == "JJ" || prev == "POS" ||
                 prev == "CD") {
        for (const auto& c : candidates) {
          if (is_noun(c)) {
            tag = c;
            break;
          }
        }
      } else if ((prev == "NN" || prev == "NNP" || prev == "PRP") && contains(candidates, "VBZ")) {
        tag = "VBZ";
      } else if ((prev == "NNS" || prev == "PRP") && contains(candidates, "VBP")) {
        tag = "VBP";
      } else if (!known && tag == "VBN" && !(head == "VBZ" || head == "VBP" || head == "VBD" ||
                                             head == "VB" || head == "VBN")) {
        // "-ed" right after a subject reads as past tense.
        if (is_noun(prev) || prev == "PRP") tag = "VBD";
      }
    }
    out.push_back({word, tag});
    sentence_start = tag == "." || tag == ":";
  }
  return out;
}

std::vector<Token> tag_pretagged(std::span<const std::string> tokens) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const auto& item : tokens) {
    const auto slash = item.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == item.size()) {
      throw InputError("pretagged token \"" + item + "\" is missing its /TAG");
    }
    out.push_back({item.substr(0, slash), item.substr(slash + 1)});
  }
  return out;
}

}  // namespace

std::string_view to_string(TaggerMode mode) {
  return mode == TaggerMode::kRules ? "rules" : "pretagged";
}

std::optional<TaggerMode> parse_tagger_mode(std::string_view name) {
  if (name == "rules") return TaggerMode::kRules;
  if (name == "pretagged") return TaggerMode::kPretagged;
  return std::nullopt;
}

std::span<const std::string_view> penn_tagset() { return kPennTags; }

bool is_penn_tag(std::string_view tag) {
  return std::find(kPennTags.begin(), kPennTags.end(), tag) != kPennTags.end();
}

std::string_view lexicon_version() { return detail::kLexiconVersion; }

std::vector<Token> tag(std::span<const std::string> tokens, TaggerMode mode) {
  if (tokens.empty()) throw ParameterError("tag: token list is empty");
  return mode == TaggerMode::kRules ? tag_rules(tokens) : tag_pretagged(tokens);
}

std::vector<Token> analyze(std::string_view text, TaggerMode mode) {
  if (mode == TaggerMode::kRules) {
    const auto tokens = tokenize(text);
    return tag(tokens, mode);
  }
  std::vector<std::string> items;
  std::istringstream in{std::string(text)};
  for (std::string item; in >> item;) items.push_back(std::move(item));
  if (items.empty()) throw ParameterError("analyze: text is empty");
  return tag(items, mode);
}

std::vector<TagSequence> tag_dataset(const Dataset& dataset, TaggerMode mode) {
  std::vector<TagSequence> out;
  out.reserve(dataset.size());
  for (const auto& req : dataset.requirements) {
    TagSequence tags;
    try {
      for (auto& token : analyze(req.text, mode)) tags.push_back(std::move(token.tag));
    } catch (const InputError& e) {
      throw InputError("requirement " + req.id + ": " + e.what());
    }
    out.push_back(std::move(tags));
  }
  return out;
}

}  // namespace reqrnn
