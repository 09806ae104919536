// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include "settle/view.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <thread>

#include "settle/error.hpp"
#include "report.hpp"

namespace settle::view {

using raster::Camera;
using raster::ViewBuffers;

std::string_view to_string(Category c) {
  switch (c) {
    case Category::kSky: return "sky";
    case Category::kWater: return "water";
    case Category::kGround: return "ground";
    case Category::kHouse: return "house";
  }
  return "unknown";
}

void ViewWeights::validate() const {
  for (double v : {w_house, w_ground, L_km}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("view weights and L must be positive and finite");
  }
}

double sigma(Category c, double l_km, const ViewWeights& w) {
  if (c == Category::kSky) return 1.0;
  if (!(l_km >= 0.0)) throw ValidationError("sigma: distance must be non-negative");
  if (c == Category::kWater) return 1.0;
  const double weight = c == Category::kHouse ? w.w_house : w.w_ground;
  // 2 s(t) - 1 == tanh(t / 2), without cancellation near t = 0.
  return std::tanh(0.5 * weight * l_km / w.L_km);
}

ViewResult view_value(const ViewBuffers& b) {
  if (b.sigma.empty()) throw ValidationError("view: empty buffer");
  ViewResult r;
  r.width = b.width;
  r.height = b.height;
  double sum = 0.0;
  std::array<std::size_t, 4> counts{};
  for (std::size_t k = 0; k < b.sigma.size(); ++k) {
    sum += b.sigma[k];
    ++counts[static_cast<std::size_t>(b.category[k])];
  }
  const auto n = static_cast<double>(b.sigma.size());
  r.V = sum / n;
  for (std::size_t i = 0; i < 4; ++i) r.fractions[i] = static_cast<double>(counts[i]) / n;
  return r;
}

double direction_weight(double theta) { return 1.0 + 0.5 * std::sin(theta - 1.5 * std::numbers::pi); }

Vec3 panorama_direction(double theta) { return {std::sin(theta), -std::cos(theta), 0.0}; }

void PanoramaOptions::validate() const {
  if (n_images < 3) throw ValidationError("n must be ≥ 3");
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("d must be positive");
  if (!(half_vfov > 0.0) || !(half_vfov < 0.5 * std::numbers::pi)) throw ValidationError("vertical field of view out of range");
  if (pixels_y < 1) throw ValidationError("pixel rows must be >= 1");
  weights.validate();
}

Camera panorama_camera(Vec3 point, int i, const PanoramaOptions& opt) {
  const double theta = 2.0 * std::numbers::pi * i / opt.n_images;
  Camera cam;
  cam.position = point;
  cam.direction = panorama_direction(theta);
  cam.up = {0.0, 0.0, 1.0};
  cam.d = opt.d;
  cam.image_width = 2.0 * opt.d * std::tan(std::numbers::pi / opt.n_images);
  cam.image_height = 2.0 * opt.d * std::tan(opt.half_vfov);
  cam.pixels_y = opt.pixels_y;
  cam.pixels_x = std::max(1, static_cast<int>(std::lround(opt.pixels_y * cam.image_width / cam.image_height)));
  return cam;
}

unsigned default_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SETTLE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

PanoramaResult view_360(const raster::Scene& scene, Vec3 point, const PanoramaOptions& opt) {
  opt.validate();
  scene.validate();
  const int n = opt.n_images;
  PanoramaResult r;
  r.angles.resize(n);
  r.values.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.angles[i] = 2.0 * std::numbers::pi * i / n;
    r.weights[i] = direction_weight(r.angles[i]) / n;
  }

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (int i = next++; i < n && !failed; i = next++) {
      try {
        r.values[i] = view_value(raster::rasterize_scene(scene, panorama_camera(point, i, opt), opt.weights)).V;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::clamp(opt.threads ? opt.threads : default_threads(), 1u, static_cast<unsigned>(n));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  double v = 0.0;
  for (int i = 0; i < n; ++i) v += r.weights[i] * r.values[i];
  r.V360 = v;
  return r;
}

std::string format_view_report(const ViewResult& r, const std::string& camera_name) {
  report::Json f = report::Json::object();
  for (std::size_t i = 0; i < 4; ++i) f[std::string(to_string(static_cast<Category>(i)))] = r.fractions[i];
  report::Json o = {{"V", r.V}, {"camera", camera_name}, {"fractions", f}, {"height", r.height}, {"width", r.width}};
  return report::dump(o);
}

std::string format_panorama_report(const PanoramaResult& r, Vec3 point, const PanoramaOptions& opt) {
  report::Json o = {{"V360", r.V360},
                    {"angles", r.angles},
                    {"d", opt.d},
                    {"n", opt.n_images},
                    {"point", {point.x, point.y, point.z}},
                    {"values", r.values},
                    {"weights", r.weights}};
  return report::dump(o);
}

}  // namespace settle::view
