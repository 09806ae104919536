// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
//
// View valuation: mean pixel weight of one image, the cardinal direction
// weight and the N-image panorama estimate.
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "settle/raster.hpp"
#include "settle/view_weights.hpp"

namespace settle::view {

struct ViewResult {
  double V = 0.0;
  /// Pixel fractions indexed by Category (sky, water, ground, house).
  std::array<double, 4> fractions{};
  int width = 0;
  int height = 0;
};

/// Plain mean of the sigma buffer. Throws ValidationError on an empty buffer.
ViewResult view_value(const raster::ViewBuffers& buffers);

/// 1 + sin(theta - 3 pi / 2) / 2, with theta = 0 facing south.
double direction_weight(double theta);

/// Unit horizontal viewing direction for angle theta: (sin theta, -cos theta, 0).
Vec3 panorama_direction(double theta);

struct PanoramaOptions {
  int n_images = 32;
  double d = 1.0;
  double half_vfov = 0.5235987755982988;  // 30 degrees
  /// Pixel rows per image; columns follow from square pixels, at least one.
  int pixels_y = 64;
  /// Worker threads; 0 picks hardware concurrency capped by SETTLE_THREADS.
  unsigned threads = 0;
  ViewWeights weights{};

  void validate() const;
};

struct PanoramaResult {
  double V360 = 0.0;
  std::vector<double> angles;
  std::vector<double> values;
  std::vector<double> weights;  // D(angle) / N
};

/// Camera of image `i` in an N-image sweep around `point`.
raster::Camera panorama_camera(Vec3 point, int i, const PanoramaOptions& opt);

/// Throws ValidationError with "n must be >= 3" for fewer than three images.
PanoramaResult view_360(const raster::Scene& scene, Vec3 point, const PanoramaOptions& opt = {});

/// Thread budget: hardware concurrency, lowered by SETTLE_THREADS when set.
unsigned default_threads();

/// JSON with sorted keys and 12 significant digits.
std::string format_view_report(const ViewResult& r, const std::string& camera_name);
std::string format_panorama_report(const PanoramaResult& r, Vec3 point, const PanoramaOptions& opt);

}  // namespace settle::view
