// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "settle/error.hpp"
#include "settle/raster.hpp"
#include "settle/view.hpp"

using namespace settle;
using namespace settle::view;
constexpr double kPi = std::numbers::pi;

namespace {

raster::Scene water_plane() {
  raster::Scene s;
  s.add({Vec3{-1e4, -1e4, 0}, Vec3{1e4, -1e4, 0}, Vec3{1e4, 1e4, 0}}, Category::kWater);
  s.add({Vec3{-1e4, -1e4, 0}, Vec3{1e4, 1e4, 0}, Vec3{-1e4, 1e4, 0}}, Category::kWater);
  return s;
}

/// Ground plane plus a 20 m wide HOUSE wall 30 m from the origin in direction `heading`.
raster::Scene wall_scene(Vec2 heading) {
  raster::Scene s;
  s.add({Vec3{-1e4, -1e4, 0}, Vec3{1e4, -1e4, 0}, Vec3{1e4, 1e4, 0}}, Category::kGround);
  s.add({Vec3{-1e4, -1e4, 0}, Vec3{1e4, 1e4, 0}, Vec3{-1e4, 1e4, 0}}, Category::kGround);
  const Vec2 c = 30.0 * heading, t{-heading.y, heading.x};
  const Vec2 a = c - 10.0 * t, b = c + 10.0 * t;
  s.add({Vec3{a.x, a.y, 0}, Vec3{b.x, b.y, 0}, Vec3{b.x, b.y, 12}}, Category::kHouse);
  s.add({Vec3{a.x, a.y, 0}, Vec3{b.x, b.y, 12}, Vec3{a.x, a.y, 12}}, Category::kHouse);
  return s;
}

}  // namespace

TEST(Sigma, MatchesLogisticDefinition) {
  const ViewWeights w;
  for (double l : {0.0, 0.01, 0.17, 1.0, 5.0, 30.0}) {
    EXPECT_NEAR(sigma(Category::kGround, l), oracle::sigma_direct(w.w_ground, l, w.L_km), 1e-14);
    EXPECT_NEAR(sigma(Category::kHouse, l), oracle::sigma_direct(w.w_house, l, w.L_km), 1e-14);
  }
  EXPECT_NEAR(sigma(Category::kGround, 0.17), 0.33638, 5e-6);
  EXPECT_EQ(sigma(Category::kGround, 0.0), 0.0);
  EXPECT_EQ(sigma(Category::kWater, 0.001), 1.0);
  EXPECT_EQ(sigma(Category::kSky, INFINITY), 1.0);
  EXPECT_THROW(sigma(Category::kHouse, -1.0), ValidationError);
  EXPECT_THROW(sigma(Category::kHouse, std::nan("")), ValidationError);
}

TEST(Sigma, MonotoneInDistance) {
  double prev = -1.0;
  for (double l = 0.0; l < 10.0; l += 0.05) {
    const double s = sigma(Category::kHouse, l);
    EXPECT_GT(s, prev);
    EXPECT_LT(s, 1.0);
    prev = s;
  }
}

TEST(Sigma, CustomWeights) {
  ViewWeights w{0.2, 0.5, 0.3};
  EXPECT_NEAR(sigma(Category::kHouse, 1.0, w), oracle::sigma_direct(0.2, 1.0, 0.3), 1e-14);
  w.L_km = 0.0;
  EXPECT_THROW(w.validate(), ValidationError);
}

TEST(DirectionWeight, RatioAndNormalization) {
  EXPECT_NEAR(direction_weight(0.0) / direction_weight(kPi), 3.0, 1e-15);
  EXPECT_NEAR(direction_weight(0.5 * kPi), 1.0, 1e-15);
  for (int n : {3, 4, 5, 8, 32, 100}) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += direction_weight(2.0 * kPi * i / n) / n;
    EXPECT_NEAR(sum, 1.0, 1e-12) << n;
  }
}

TEST(Panorama, DirectionsAndCameras) {
  const Vec3 s = panorama_direction(0.0), e = panorama_direction(0.5 * kPi);
  EXPECT_NEAR(s.y, -1.0, 1e-15);
  EXPECT_NEAR(e.x, 1.0, 1e-15);
  PanoramaOptions opt;
  opt.n_images = 8;
  auto cam = panorama_camera({1, 2, 3}, 2, opt);
  EXPECT_NEAR(cam.image_width, 2.0 * std::tan(kPi / 8), 1e-15);
  EXPECT_NEAR(cam.direction.x, 1.0, 1e-15);
  EXPECT_EQ(cam.position, (Vec3{1, 2, 3}));
}

TEST(Panorama, RejectsTooFewImages) {
  PanoramaOptions opt;
  opt.n_images = 2;
  try {
    view_360(water_plane(), {0, 0, 10}, opt);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "n must be ≥ 3");
  }
}

TEST(Panorama, AllWaterIsExactlyOne) {
  for (int n : {3, 4, 8, 32}) {
    PanoramaOptions opt;
    opt.n_images = n;
    opt.pixels_y = 16;
    auto r = view_360(water_plane(), {0, 0, 10}, opt);
    EXPECT_NEAR(r.V360, 1.0, 1e-12);
    ASSERT_EQ(r.values.size(), static_cast<std::size_t>(n));
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    EXPECT_NEAR(wsum, 1.0, 1e-12);
  }
}

TEST(Panorama, WeightedSumOfImageValues) {
  PanoramaOptions opt;
  opt.n_images = 6;
  opt.pixels_y = 24;
  auto r = view_360(wall_scene({0, -1}), {0, 0, 2}, opt);
  double v = 0.0;
  for (int i = 0; i < opt.n_images; ++i) {
    EXPECT_NEAR(r.weights[i], direction_weight(2 * kPi * i / 6) / 6, 1e-15);
    auto cam = panorama_camera({0, 0, 2}, i, opt);
    v += r.weights[i] * view_value(raster::rasterize_scene(wall_scene({0, -1}), cam)).V;
  }
  EXPECT_NEAR(r.V360, v, 1e-14);
}

TEST(Panorama, SouthWallCostsMoreThanNorthWall) {
  PanoramaOptions opt;
  opt.pixels_y = 32;
  const double south = view_360(wall_scene({0, -1}), {0, 0, 2}, opt).V360;
  const double north = view_360(wall_scene({0, 1}), {0, 0, 2}, opt).V360;
  EXPECT_LT(south, north);
}

TEST(Panorama, ConvergesToDenseSampling) {
  for (Vec2 heading : {Vec2{0, -1}, Vec2{0, 1}}) {
    PanoramaOptions coarse;
    coarse.pixels_y = 32;
    PanoramaOptions dense = coarse;
    dense.n_images = 1024;
    const auto scene = wall_scene(heading);
    EXPECT_NEAR(view_360(scene, {0, 0, 2}, coarse).V360, view_360(scene, {0, 0, 2}, dense).V360, 0.01);
  }
}

TEST(Panorama, ThreadCountDoesNotChangeResult) {
  PanoramaOptions a;
  a.pixels_y = 16;
  a.threads = 1;
  PanoramaOptions b = a;
  b.threads = 4;
  const auto scene = wall_scene({1, 0});
  EXPECT_EQ(view_360(scene, {0, 0, 2}, a).V360, view_360(scene, {0, 0, 2}, b).V360);
}

TEST(ViewValue, ResolutionInvariance) {
  raster::Camera c;
  c.position = {0, 0, 2};
  c.direction = {0, -1, 0};
  const auto scene = wall_scene({0, -1});
  c.pixels_x = c.pixels_y = 128;
  const double lo = view_value(raster::rasterize_scene(scene, c)).V;
  c.pixels_x = c.pixels_y = 512;
  const double hi = view_value(raster::rasterize_scene(scene, c)).V;
  EXPECT_NEAR(lo, hi, 0.01);
}

TEST(ViewValue, MeanAndFractions) {
  raster::ViewBuffers b(2, 2);
  b.category = {Category::kSky, Category::kHouse, Category::kHouse, Category::kGround};
  b.sigma = {1.0, 0.2, 0.4, 0.6};
  auto r = view_value(b);
  EXPECT_DOUBLE_EQ(r.V, 0.55);
  EXPECT_DOUBLE_EQ(r.fractions[static_cast<int>(Category::kHouse)], 0.5);
  EXPECT_DOUBLE_EQ(r.fractions[static_cast<int>(Category::kWater)], 0.0);
  EXPECT_THROW(view_value(raster::ViewBuffers{}), ValidationError);
}

TEST(Reports, ViewJsonKeys) {
  raster::ViewBuffers b(1, 1);
  auto text = format_view_report(view_value(b), "cam");
  EXPECT_NE(text.find("\"V\": 1"), std::string::npos);
  EXPECT_NE(text.find("\"camera\": \"cam\""), std::string::npos);
  EXPECT_NE(text.find("\"fractions\""), std::string::npos);
}
