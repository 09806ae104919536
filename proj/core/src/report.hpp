// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "json.hpp"

namespace settle::report {

using Json = nlohmann::json;

/// Rounds to 12 significant digits.
double round12(double v);

/// Serializes with sorted keys and every float rounded to 12 significant digits.
std::string dump(const Json& j, int indent = 2);

}  // namespace settle::report
