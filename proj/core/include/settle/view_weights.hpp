// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

namespace settle::view {

/// What a pixel sees. SKY is the absence of a hit.
enum class Category : std::uint8_t { kSky = 0, kWater = 1, kGround = 2, kHouse = 3 };

std::string_view to_string(Category c);

struct ViewWeights {
  double w_house = 0.1;
  double w_ground = 0.7;
  double L_km = 0.17;

  /// Throws ValidationError unless every weight and L are positive and finite.
  void validate() const;
};

/// Pixel weight. WATER and SKY weigh 1; HOUSE and GROUND weigh
/// 2 s(w l / L) - 1 with the logistic s. `l_km` must be >= 0 for hits; it is
/// ignored for SKY. Throws ValidationError on a negative or NaN distance.
double sigma(Category c, double l_km, const ViewWeights& w = {});

}  // namespace settle::view
