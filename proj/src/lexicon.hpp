// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#pragma once

#include <string_view>

namespace reqrnn::detail {

extern const std::string_view kLexiconVersion;
extern const std::string_view kLexiconData;

}  // namespace reqrnn::detail
