// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Treebank word tokenizer over byte offsets. Follows the splitting rules of
// NLTK's word_tokenize (punctuation, brackets, "--", "...", clitics, the
// can|not / gon|na family) but never rewrites characters, so the input can
// always be rebuilt from tokens and separators.

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "reqrnn/error.hpp"
#include "reqrnn/textpipe.hpp"

namespace reqrnn {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) { return lower(x) == lower(y); });
}

bool iends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && iequals(s.substr(s.size() - suffix.size()), suffix);
}

bool is_open_bracket(char c) { return c == '(' || c == '[' || c == '{' || c == '<'; }
bool is_close_bracket(char c) { return c == ')' || c == ']' || c == '}' || c == '>'; }
bool is_always_split(char c) {
  return c == ';' || c == '@' || c == '#' || c == '$' || c == '%' || c == '&' || c == '?' ||
         c == '!' || c == '"' || is_open_bracket(c) || is_close_bracket(c);
}

constexpr std::array<std::string_view, 24> kAbbreviations = {
    "etc", "e.g", "i.e", "approx", "vs", "mr", "mrs", "ms", "dr", "no", "fig", "incl",
    "dept", "ref", "sec", "min", "max", "cf", "al", "jr", "sr", "st", "inc", "ltd"};

bool is_abbreviation(std::string_view word) {
  if (word.find('.') != std::string_view::npos) return true;  // e.g. "U.S"
  if (word.size() == 1 && is_alpha(word[0])) return true;     // initials
  return std::any_of(kAbbreviations.begin(), kAbbreviations.end(),
                     [&](std::string_view a) { return iequals(a, word); });
}

struct Chunk {
  std::size_t begin;
  std::size_t end;
};

class ChunkSplitter {
 public:
  ChunkSplitter(std::string_view text, std::vector<TokenSpan>& out) : text_(text), out_(out) {}

  void split(Chunk chunk, bool sentence_final) {
    std::size_t b = chunk.begin;
    std::size_t e = chunk.end;

    // Leading quotes and brackets.
    while (b < e) {
      if (text_.substr(b, 2) == "``") {
        emit(b, 2);
        b += 2;
      } else if (text_[b] == '"' || text_[b] == '`' || is_open_bracket(text_[b])) {
        emit(b, 1);
        b += 1;
      } else {
        break;
      }
    }

    // Trailing punctuation, collected right to left.
    std::vector<TokenSpan> tail;
    while (e > b) {
      const std::string_view rest = text_.substr(b, e - b);
      const char last = rest.back();
      std::size_t take = 0;
      if (rest.size() >= 3 && rest.substr(rest.size() - 3) == "...") {
        take = rest.size() == 3 ? 0 : 3;
      } else if (rest.size() >= 2 && rest.substr(rest.size() - 2) == "''") {
        take = 2;
      } else if (is_close_bracket(last) || last == '"' || last == ',' || last == ':' ||
                 last == ';' || last == '?' || last == '!') {
        take = 1;
      } else if (last == '\'' && rest.size() > 1 && rest[rest.size() - 2] != '\'') {
        take = 1;
      } else if (last == '.' && sentence_final && rest.size() > 1 &&
                 rest[rest.size() - 2] != '.') {
        take = 1;
      }
      if (take == 0 || take >= rest.size()) break;
      tail.push_back({e - take, take});
      e -= take;
    }

    split_interior(b, e);
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) out_.push_back(*it);
  }

 private:
  void emit(std::size_t offset, std::size_t length) {
    if (length > 0) out_.push_back({offset, length});
  }

  void split_interior(std::size_t b, std::size_t e) {
    std::size_t word_start = b;
    std::size_t i = b;
    auto flush_word = [&](std::size_t end) {
      if (end > word_start) split_clitics(word_start, end);
    };
    while (i < e) {
      const char c = text_[i];
      std::size_t take = 0;
      if (text_.substr(i, 3) == "..." && i + 3 <= e) {
        take = 3;
      } else if (text_.substr(i, 2) == "--" && i + 2 <= e) {
        take = 2;
      } else if (is_always_split(c)) {
        take = 1;
      } else if ((c == ',' || c == ':') && (i + 1 >= e || !is_digit(text_[i + 1]))) {
        take = 1;
      }
      if (take > 0) {
        flush_word(i);
        emit(i, take);
        i += take;
        word_start = i;
      } else {
        ++i;
      }
    }
    flush_word(e);
  }

  void split_clitics(std::size_t b, std::size_t e) {
    const std::string_view w = text_.substr(b, e - b);
    // Whole-word multi-part contractions.
    struct Pair {
      std::string_view word;
      std::size_t head;
    };
    static constexpr std::array<Pair, 9> kWhole = {{{"cannot", 3},
                                                    {"d'ye", 1},
                                                    {"gimme", 3},
                                                    {"gonna", 3},
                                                    {"gotta", 3},
                                                    {"lemme", 3},
                                                    {"more'n", 4},
                                                    {"wanna", 3},
                                                    {"'tis", 2}}};
    for (const auto& p : kWhole) {
      if (iequals(w, p.word)) {
        emit(b, p.head);
        emit(b + p.head, w.size() - p.head);
        return;
      }
    }
    if (iequals(w, "'twas")) {
      emit(b, 2);
      emit(b + 2, 3);
      return;
    }
    static constexpr std::array<std::string_view, 8> kSuffixes = {"n't", "'ll", "'re", "'ve",
                                                                  "'s",  "'m",  "'d",  "'"};
    for (auto suffix : kSuffixes) {
      if (w.size() > suffix.size() && iends_with(w, suffix)) {
        const char before = w[w.size() - suffix.size() - 1];
        if (before == '\'') continue;
        emit(b, w.size() - suffix.size());
        emit(e - suffix.size(), suffix.size());
        return;
      }
    }
    emit(b, w.size());
  }

  std::string_view text_;
  std::vector<TokenSpan>& out_;
};

bool ends_sentence(std::string_view text, const Chunk& chunk, const Chunk* next) {
  if (next == nullptr) return true;
  // Strip closers to find the period.
  std::size_t e = chunk.end;
  while (e > chunk.begin && (is_close_bracket(text[e - 1]) || text[e - 1] == '"' ||
                             text[e - 1] == '\'')) {
    --e;
  }
  if (e == chunk.begin || text[e - 1] != '.') return false;
  const char first = text[next->begin];
  if (!(is_upper(first) || first == '"' || first == '(' || first == '[')) return false;
  // Word preceding the period, without leading brackets/quotes.
  std::size_t b = chunk.begin;
  while (b < e && (is_open_bracket(text[b]) || text[b] == '"' || text[b] == '`')) ++b;
  if (e - 1 <= b) return true;
  return !is_abbreviation(text.substr(b, e - 1 - b));
}

}  // namespace

std::vector<std::string> Tokenization::surfaces() const {
  std::vector<std::string> out;
  out.reserve(spans.size());
  for (const auto& s : spans) out.emplace_back(text.substr(s.offset, s.length));
  return out;
}

std::string_view Tokenization::separator(std::size_t i) const {
  const std::size_t from = i == 0 ? 0 : spans[i - 1].offset + spans[i - 1].length;
  const std::size_t to = i < spans.size() ? spans[i].offset : text.size();
  return text.substr(from, to - from);
}

std::string Tokenization::reconstruct() const {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    out += separator(i);
    out += text.substr(spans[i].offset, spans[i].length);
  }
  out += separator(spans.size());
  return out;
}

Tokenization tokenize_spans(std::string_view text) {
  std::vector<Chunk> chunks;
  for (std::size_t i = 0; i < text.size();) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) chunks.push_back({start, i});
  }
  if (chunks.empty()) throw ParameterError("tokenize: text is empty");

  Tokenization result;
  result.text = text;
  ChunkSplitter splitter(text, result.spans);
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    const Chunk* next = c + 1 < chunks.size() ? &chunks[c + 1] : nullptr;
    splitter.split(chunks[c], ends_sentence(text, chunks[c], next));
  }
  return result;
}

std::vector<std::string> tokenize(std::string_view text) { return tokenize_spans(text).surfaces(); }

}  // namespace reqrnn
