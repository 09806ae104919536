// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "settle/error.hpp"
#include "settle/raster.hpp"
#include "settle/view.hpp"

using namespace settle;
using namespace settle::raster;

namespace {

Camera make_camera(const oracle::PinholeCamera& o) {
  Camera c;
  c.position = o.position;
  c.direction = o.direction;
  c.up = o.up;
  c.d = o.d;
  c.image_width = o.width;
  c.image_height = o.height;
  c.pixels_x = o.px;
  c.pixels_y = o.py;
  return c;
}

/// Share of pixels where category and distance agree with the ray caster.
double agreement(const Scene& scene, const oracle::PinholeCamera& o) {
  const auto buf = rasterize_scene(scene, make_camera(o));
  std::size_t ok = 0;
  for (int row = 0; row < o.py; ++row)
    for (int col = 0; col < o.px; ++col) {
      const auto hit = oracle::cast(o.position, o.ray(col, row), scene.triangles);
      const auto k = buf.index(col, row);
      if (hit.triangle < 0)
        ok += buf.category[k] == Category::kSky;
      else
        ok += buf.category[k] == scene.categories[hit.triangle] &&
              std::abs(buf.distance[k] - hit.distance) <= 1e-9 * hit.distance;
    }
  return static_cast<double>(ok) / (o.px * o.py);
}

Scene wall(double y, Category c = Category::kHouse) {
  Scene s;
  s.add({Vec3{-50, y, -50}, Vec3{50, y, -50}, Vec3{50, y, 50}}, c);
  s.add({Vec3{-50, y, -50}, Vec3{50, y, 50}, Vec3{-50, y, 50}}, c);
  return s;
}

}  // namespace

TEST(Project, Example) {
  Camera c;
  auto p = project_vertex(c, {1.0, 2.0, 0.5});
  ASSERT_TRUE(p);
  EXPECT_DOUBLE_EQ(p->plane.x, 0.5);
  EXPECT_DOUBLE_EQ(p->plane.y, 0.25);
  EXPECT_DOUBLE_EQ(p->z, 2.0);
  EXPECT_DOUBLE_EQ(p->depth, std::sqrt(1.0 + 4.0 + 0.25));
  EXPECT_FALSE(project_vertex(c, {0.0, -1.0, 0.0}));
  EXPECT_FALSE(project_vertex(c, {1.0, 0.0, 0.0}));
}

TEST(Project, RotatedCamera) {
  Camera c;
  c.position = {10, 0, 2};
  c.direction = {-1, 0, 0};
  auto p = project_vertex(c, {7, 1, 2});
  ASSERT_TRUE(p);
  // Looking along -x with +z up puts +y on the right.
  EXPECT_NEAR(p->plane.x, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(p->plane.y, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(p->z, 3.0);
}

TEST(CameraTest, Validation) {
  Camera c;
  c.up = {0, 2, 0};
  EXPECT_THROW(c.normalized(), ValidationError);
  c = {};
  c.d = 0;
  EXPECT_THROW(c.normalized(), ValidationError);
  c = {};
  c.pixels_x = 0;
  EXPECT_THROW(c.normalized(), ValidationError);
}

TEST(Rasterize, EmptySceneIsSky) {
  Camera c;
  c.pixels_x = 8;
  c.pixels_y = 4;
  auto b = rasterize_scene({}, c);
  ASSERT_EQ(b.size(), 32u);
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_EQ(b.category[i], Category::kSky);
    EXPECT_EQ(b.triangle[i], -1);
    EXPECT_EQ(b.sigma[i], 1.0);
    EXPECT_TRUE(std::isinf(b.distance[i]));
  }
  EXPECT_EQ(view::view_value(b).V, 1.0);
}

TEST(Rasterize, FrameFillingWallDistances) {
  oracle::PinholeCamera o;
  o.px = o.py = 32;
  auto b = rasterize_scene(wall(1.0), make_camera(o));
  for (int row = 0; row < o.py; ++row)
    for (int col = 0; col < o.px; ++col) {
      const Vec3 r = o.ray(col, row);
      const auto k = b.index(col, row);
      ASSERT_EQ(b.category[k], Category::kHouse);
      EXPECT_NEAR(b.distance[k], 1.0 / r.y, 1e-6);
    }
}

TEST(Rasterize, CoincidentTrianglesLowerIndexWins) {
  Scene s;
  const std::array<Vec3, 3> t{Vec3{-5, 3, -5}, Vec3{5, 3, -5}, Vec3{0, 3, 5}};
  s.add(t, Category::kGround);
  s.add(t, Category::kHouse);
  Camera c;
  c.pixels_x = c.pixels_y = 16;
  auto b = rasterize_scene(s, c);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.triangle[i] >= 0) {
      EXPECT_EQ(b.triangle[i], 0);
      EXPECT_EQ(b.category[i], Category::kGround);
      ++covered;
    }
  EXPECT_GT(covered, 0u);
}

TEST(Rasterize, NearerTriangleWinsRegardlessOfOrder) {
  Scene s = wall(5.0, Category::kGround);
  Scene near = wall(2.0, Category::kWater);
  for (std::size_t i = 0; i < near.triangles.size(); ++i) s.add(near.triangles[i], near.categories[i]);
  Camera c;
  c.pixels_x = c.pixels_y = 8;
  auto b = rasterize_scene(s, c);
  for (auto cat : b.category) EXPECT_EQ(cat, Category::kWater);
}

TEST(Rasterize, MatchesRayCasting) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int scene = 0; scene < 8; ++scene) {
    Scene s;
    for (int i = 0; i < 20; ++i) {
      std::array<Vec3, 3> t;
      for (auto& v : t) v = {3 * U(rng), 4 + 3 * U(rng), 3 * U(rng)};
      s.add(t, static_cast<Category>(1 + i % 3));
    }
    oracle::PinholeCamera o;
    EXPECT_GE(agreement(s, o), 0.99);
  }
}

TEST(Rasterize, NearClippedTriangleMatchesRayCasting) {
  Scene s;
  // Crosses the camera plane; only the front part may be drawn.
  s.add({Vec3{-3, -2, -1}, Vec3{3, -2, -1}, Vec3{0, 6, -1}}, Category::kGround);
  s.add({Vec3{-1, 3, 0}, Vec3{1, 3, 0}, Vec3{0, -4, 3}}, Category::kHouse);
  oracle::PinholeCamera o;
  o.direction = {0.2, 1, -0.1};
  EXPECT_GE(agreement(s, o), 0.99);
}

TEST(Rasterize, RandomCamerasMatchRayCasting) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int scene = 0; scene < 5; ++scene) {
    oracle::PinholeCamera o;
    o.position = {U(rng), U(rng), U(rng)};
    o.direction = {U(rng), U(rng), 0.3 * U(rng)};
    o.width = 1.0 + std::abs(U(rng));
    o.px = 48;
    o.py = 40;
    Scene s;
    for (int i = 0; i < 15; ++i) {
      std::array<Vec3, 3> t;
      const Vec3 c = o.position + 4.0 * normalized(o.direction) + Vec3{U(rng), U(rng), U(rng)};
      for (auto& v : t) v = c + 2.0 * Vec3{U(rng), U(rng), U(rng)};
      s.add(t, static_cast<Category>(1 + i % 3));
    }
    EXPECT_GE(agreement(s, o), 0.99);
  }
}

TEST(Rasterize, SceneValidation) {
  Scene s;
  s.add({Vec3{0, 1, 0}, Vec3{1, 1, 0}, Vec3{0, 1, 1}}, Category::kSky);
  EXPECT_THROW(rasterize_scene(s, Camera{}), ValidationError);
  Scene n;
  n.add({Vec3{0, 1, 0}, Vec3{1, 1, std::nan("")}, Vec3{0, 1, 1}}, Category::kHouse);
  EXPECT_THROW(rasterize_scene(n, Camera{}), ValidationError);
}

TEST(FillTriangle, ZeroAreaWritesNothing) {
  Camera c;
  ViewBuffers b(4, 4);
  std::array<ScreenVertex, 3> tri{ScreenVertex{0, 0, 1}, ScreenVertex{2, 2, 1}, ScreenVertex{4, 4, 1}};
  EXPECT_EQ(fill_triangle(c.normalized(), tri, {Category::kHouse, 0}, b), 0u);
}

TEST(Ppm, CategoryBytes) {
  ViewBuffers b(2, 1);
  b.category = {Category::kWater, Category::kHouse};
  const auto ppm = format_category_ppm(b);
  const std::string header = "P6\n2 1\n255\n";
  ASSERT_EQ(ppm.size(), header.size() + 6);
  EXPECT_EQ(ppm.substr(0, header.size()), header);
  const std::string px = ppm.substr(header.size());
  EXPECT_EQ(px, std::string("\x00\x00\xff\xff\x00\x00", 6));
}

TEST(Ppm, SigmaGrey) {
  ViewBuffers b(2, 1);
  b.sigma = {0.0, 0.5};
  const auto ppm = format_sigma_ppm(b);
  const std::string px = ppm.substr(ppm.size() - 6);
  EXPECT_EQ(static_cast<unsigned char>(px[0]), 0);
  EXPECT_EQ(static_cast<unsigned char>(px[3]), 128);
}

TEST(Rasterize, FarVerticesInNarrowImage) {
  // Projected corners land far beyond the int range of pixel indices.
  Scene s;
  s.add({Vec3{-1e4, -1e4, 0}, Vec3{1e4, -1e4, 0}, Vec3{1e4, 1e4, 0}}, Category::kGround);
  s.add({Vec3{-1e4, -1e4, 0}, Vec3{1e4, 1e4, 0}, Vec3{-1e4, 1e4, 0}}, Category::kGround);
  oracle::PinholeCamera o;
  o.position = {0, 0, 2};
  o.direction = {1, 1.02, 0};
  o.width = 0.006;
  o.height = 1.15;
  o.px = 1;
  o.py = 32;
  EXPECT_GE(agreement(s, o), 0.99);
}
