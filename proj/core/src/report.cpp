// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace settle::report {

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

namespace {

Json rounded(const Json& j) {
  if (j.is_number_float()) return round12(j.get<double>());
  if (j.is_array() || j.is_object()) {
    Json out = j;
    for (auto& v : out) v = rounded(v);
    return out;
  }
  return j;
}

}  // namespace

std::string dump(const Json& j, int indent) { return rounded(j).dump(indent) + "\n"; }

}  // namespace settle::report
