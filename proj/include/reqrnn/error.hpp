// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#pragma once

#include <stdexcept>
#include <string>

namespace reqrnn {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside its documented domain (k < 2, fraction not in (0,1), ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Shapes or indices disagree.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// External input (dataset line, pretagged token, file) is malformed.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Training diverged (non-finite loss or gradient).
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// A persisted model file is unreadable, truncated or has the wrong version.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace reqrnn
