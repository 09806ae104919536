// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
//
// Software rasterizer: pinhole projection, top-point scanline fill and a
// nearest-distance buffer per pixel.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "settle/vec.hpp"
#include "settle/view_weights.hpp"

namespace settle::raster {

using view::Category;

/// Pinhole camera. The image plane sits `d` meters in front of `position`,
/// spans `image_width` x `image_height` meters and is sampled by
/// `pixels_x` x `pixels_y` pixels. Row 0 is the top row.
struct Camera {
  Vec3 position{};
  Vec3 direction{0.0, 1.0, 0.0};
  Vec3 up{0.0, 0.0, 1.0};
  double d = 1.0;
  double image_width = 2.0;
  double image_height = 2.0;
  int pixels_x = 64;
  int pixels_y = 64;

  /// Normalizes `direction`, orthogonalizes `up` against it and checks the
  /// remaining fields. Throws ValidationError.
  Camera normalized() const;
  Vec3 right() const;
};

struct Scene {
  std::vector<std::array<Vec3, 3>> triangles;
  std::vector<Category> categories;

  void add(const std::array<Vec3, 3>& t, Category c) {
    triangles.push_back(t);
    categories.push_back(c);
  }
  /// Throws ValidationError on non-finite vertices, SKY triangles or a size mismatch.
  void validate() const;
};

/// Per-pixel buffers, row-major with row 0 at the top.
struct ViewBuffers {
  int width = 0;
  int height = 0;
  std::vector<Category> category;
  std::vector<double> distance;  // meters, +inf for sky
  std::vector<double> sigma;
  std::vector<std::int32_t> triangle;  // winning triangle, -1 for sky

  ViewBuffers() = default;
  ViewBuffers(int w, int h);
  std::size_t index(int col, int row) const { return static_cast<std::size_t>(row) * width + col; }
  std::size_t size() const { return category.size(); }
};

struct Projected {
  Vec2 plane{};    // image-plane coordinates (m), x right, y up, origin at the center
  double z = 0.0;  // distance along the viewing direction
  double depth = 0.0;  // Euclidean distance from the camera
};

/// Returns nullopt when `x` lies on or behind the camera plane.
std::optional<Projected> project_vertex(const Camera& cam, Vec3 x);

/// Screen-space vertex: continuous pixel coordinates (col, row) and the
/// camera-space forward distance used for perspective-correct depth.
struct ScreenVertex {
  double col = 0.0;
  double row = 0.0;
  double z = 0.0;
};

struct FillPayload {
  Category category = Category::kGround;
  std::int32_t triangle = 0;
};

/// Writes every pixel whose center lies inside the triangle and whose
/// interpolated distance is strictly smaller than the stored one (ties go to
/// the lower triangle index). Visits the bounding box exhaustively when it is
/// at most two pixels wide or tall, otherwise expands row by row from the top
/// vertex and stops each row at the first outside pixel past the span. Sigma
/// is not touched. Zero-area triangles are ignored. Returns pixels written.
std::size_t fill_triangle(const Camera& cam, const std::array<ScreenVertex, 3>& tri, const FillPayload& payload,
                          ViewBuffers& buffers);

/// Projects, near-clips (at d * 1e-3) and fills every scene triangle, then
/// computes sigma per pixel.
ViewBuffers rasterize_scene(const Scene& scene, const Camera& cam, const view::ViewWeights& weights = {});

/// Binary PPM (P6) of the category buffer: WATER blue, SKY light blue,
/// GROUND green, HOUSE red.
std::string format_category_ppm(const ViewBuffers& b);
/// Binary PPM (P6) with grey level round(255 * sigma).
std::string format_sigma_ppm(const ViewBuffers& b);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace settle::raster
