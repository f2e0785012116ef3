// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "reqrnn/corpus.hpp"
#include "reqrnn/error.hpp"
#include "reqrnn/rng.hpp"

namespace reqrnn {
namespace {

constexpr std::array kSubjects = {
    "The system",    "The application", "The server",  "The portal",  "The module",
    "The controller", "The scheduler",  "The gateway", "The client",  "The service",
};

constexpr std::array kVerbs = {
    "log",     "store",  "display", "validate", "export", "encrypt", "record", "send",
    "update",  "delete", "generate", "archive", "print",  "verify",  "process", "track",
};

constexpr std::array kObjects = {
    "errors",          "the report",      "all transactions", "user data",
    "the audit trail", "invoices",        "each request",     "customer records",
    "the results",     "the configuration", "new accounts",   "the schedule",
    "payment details", "the event log",   "every message",    "pending orders",
};

constexpr std::array kAdjuncts = {
    "in the database",         "to the administrator", "for each session",
    "after every update",      "within five seconds",  "on the main screen",
    "at the end of the day",   "for authorized users", "when a session expires",
    "before the nightly batch",
};

constexpr std::array kTechnologies = {
    "a MySQL database", "the Java runtime", "an Oracle server", "a REST endpoint",
    "the XML parser",   "a Redis cache",
};

template <class Array>
const char* pick(const Array& items, Rng& rng) {
  return items[static_cast<std::size_t>(rng.below(items.size()))];
}

/// ceil(n/2) true values at seeded positions.
std::vector<bool> balanced_labels(int n, Rng& rng) {
  std::vector<char> flags(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < (n + 1) / 2; ++i) flags[static_cast<std::size_t>(i)] = 1;
  shuffle(std::span<char>(flags), rng);
  return {flags.begin(), flags.end()};
}

std::string clause(const SignalSpec& spec, const std::string& hedge, Rng& rng) {
  std::string out = spec.modal;
  if (!hedge.empty()) out += " " + hedge;
  out += " ";
  out += pick(kVerbs, rng);
  out += " ";
  out += pick(kObjects, rng);
  return out;
}

}  // namespace

Dataset generate_synthetic(int n, std::uint64_t seed, const SignalSpec& spec) {
  if (n < 1) throw ParameterError("generate_synthetic: n must be >= 1, got " + std::to_string(n));
  if (spec.singular_min_clauses < 2) {
    throw ParameterError("generate_synthetic: singular_min_clauses must be >= 2");
  }
  if (spec.correct_markers.empty()) {
    throw ParameterError("generate_synthetic: need at least one correct marker");
  }

  std::array<std::vector<bool>, 4> labels;
  for (auto p : kAllProperties) {
    Rng label_rng(seed, 0x1AB0 + static_cast<std::uint64_t>(p));
    labels[static_cast<std::size_t>(p)] = balanced_labels(n, label_rng);
  }
  Rng text_rng(seed, 0x7E47);

  const int width = static_cast<int>(std::to_string(n).size());
  Dataset dataset;
  dataset.name = "synthetic-" + std::to_string(seed);
  dataset.requirements.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto at = static_cast<std::size_t>(i);
    const bool singular = labels[0][at];
    const bool complete = labels[1][at];
    const bool appropriate = labels[2][at];
    const bool correct = labels[3][at];

    const std::string hedge =
        correct ? std::string()
                : spec.correct_markers[text_rng.below(spec.correct_markers.size())];

    std::string text = pick(kSubjects, text_rng);
    text += " " + clause(spec, hedge, text_rng);
    if (!singular) {
      for (int c = 1; c < spec.singular_min_clauses; ++c) {
        text += " and " + clause(spec, "", text_rng);
      }
    }
    if (!complete) {
      text += ", ";
      text += pick(kObjects, text_rng);
      text += ", " + spec.complete_marker;
    }
    std::string tail;
    if (text_rng.bernoulli(0.5)) {
      tail += " ";
      tail += pick(kAdjuncts, text_rng);
    }
    if (!appropriate) {
      tail += " " + spec.appropriate_marker + " ";
      tail += pick(kTechnologies, text_rng);
    }
    // The open list reads "..., etc. within five seconds" when more follows.
    if (!complete && !tail.empty()) text += ".";
    text += tail;
    text += ".";

    char id[32];
    std::snprintf(id, sizeof id, "syn-%0*d", width, i + 1);
    Requirement req;
    req.id = id;
    req.text = std::move(text);
    req.labels.set(PropertyName::kSingular, singular);
    req.labels.set(PropertyName::kComplete, complete);
    req.labels.set(PropertyName::kAppropriate, appropriate);
    req.labels.set(PropertyName::kCorrect, correct);
    req.source = "synthetic";
    dataset.requirements.push_back(std::move(req));
  }
  return dataset;
}

}  // namespace reqrnn
