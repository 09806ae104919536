// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include "settle/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "settle/error.hpp"

namespace settle::raster {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(Vec3 v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

struct CameraFrame {
  Vec3 forward, right, up;
};

CameraFrame frame_of(const Camera& cam) {
  const Vec3 f = normalized(cam.direction);
  const Vec3 r = normalized(cross(f, cam.up));
  return {f, r, cross(r, f)};
}

// Camera-space coordinates (right, up, forward).
Vec3 to_camera(const CameraFrame& fr, Vec3 origin, Vec3 x) {
  const Vec3 d = x - origin;
  return {dot(d, fr.right), dot(d, fr.up), dot(d, fr.forward)};
}

double edge(double ax, double ay, double bx, double by, double px, double py) {
  return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Sutherland-Hodgman against z >= z_near in camera space.
std::vector<Vec3> clip_near(const std::array<Vec3, 3>& t, double z_near) {
  std::vector<Vec3> out;
  for (int i = 0; i < 3; ++i) {
    const Vec3 a = t[i], b = t[(i + 1) % 3];
    const bool ain = a.z >= z_near, bin = b.z >= z_near;
    if (ain) out.push_back(a);
    if (ain != bin) {
      const double s = (z_near - a.z) / (b.z - a.z);
      Vec3 p = a + s * (b - a);
      p.z = z_near;
      out.push_back(p);
    }
  }
  return out;
}

std::string ppm_header(const ViewBuffers& b) {
  return "P6\n" + std::to_string(b.width) + " " + std::to_string(b.height) + "\n255\n";
}

}  // namespace

Camera Camera::normalized() const {
  if (!finite(position) || !finite(direction) || !finite(up)) throw ValidationError("camera: non-finite vector");
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("camera: d must be positive");
  if (!(image_width > 0.0) || !(image_height > 0.0) || !std::isfinite(image_width) || !std::isfinite(image_height))
    throw ValidationError("camera: image size must be positive");
  if (pixels_x < 1 || pixels_y < 1) throw ValidationError("camera: pixel counts must be >= 1");
  const double dn = norm(direction);
  if (!(dn > 0.0)) throw ValidationError("camera: zero direction");
  Camera c = *this;
  c.direction = direction / dn;
  Vec3 u = up - dot(up, c.direction) * c.direction;
  if (!(norm(u) > 1e-9 * norm(up))) throw ValidationError("camera: up is parallel to direction");
  c.up = settle::normalized(u);
  return c;
}

Vec3 Camera::right() const { return settle::normalized(cross(direction, up)); }

void Scene::validate() const {
  if (triangles.size() != categories.size()) throw ValidationError("scene: category count does not match triangles");
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    for (const Vec3& v : triangles[i]) {
      if (!finite(v)) throw ValidationError("scene: triangle " + std::to_string(i) + " has a non-finite vertex");
    }
    if (categories[i] == Category::kSky) throw ValidationError("scene: triangle " + std::to_string(i) + " tagged SKY");
  }
}

ViewBuffers::ViewBuffers(int w, int h) : width(w), height(h) {
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  category.assign(n, Category::kSky);
  distance.assign(n, kInf);
  sigma.assign(n, 1.0);
  triangle.assign(n, -1);
}

std::optional<Projected> project_vertex(const Camera& cam, Vec3 x) {
  const Vec3 c = to_camera(frame_of(cam), cam.position, x);
  if (!(c.z > 0.0)) return std::nullopt;
  Projected p;
  p.z = c.z;
  p.plane = {cam.d * c.x / c.z, cam.d * c.y / c.z};
  p.depth = norm(x - cam.position);
  return p;
}

std::size_t fill_triangle(const Camera& cam, const std::array<ScreenVertex, 3>& tri, const FillPayload& payload,
                          ViewBuffers& buf) {
  const auto& [a, b, c] = tri;
  const double area = edge(a.col, a.row, b.col, b.row, c.col, c.row);
  if (!(std::abs(area) > 0.0) || !std::isfinite(area)) return 0;
  // Screen rows grow downwards; normalize so the edge functions are positive inside.
  const double sgn = area > 0.0 ? 1.0 : -1.0;
  const double inv_area = 1.0 / std::abs(area);

  const double pw = cam.image_width / buf.width, ph = cam.image_height / buf.height;
  const double d2 = cam.d * cam.d;

  auto try_pixel = [&](int col, int row) -> int {
    const double px = col + 0.5, py = row + 0.5;
    const double w0 = sgn * edge(b.col, b.row, c.col, c.row, px, py);
    const double w1 = sgn * edge(c.col, c.row, a.col, a.row, px, py);
    const double w2 = sgn * edge(a.col, a.row, b.col, b.row, px, py);
    if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) return 0;
    // 1/z is affine in screen space.
    const double inv_z = (w0 / a.z + w1 / b.z + w2 / c.z) * inv_area;
    const double z = 1.0 / inv_z;
    const double x = (px * pw - 0.5 * cam.image_width), y = (0.5 * cam.image_height - py * ph);
    const double l = z * std::sqrt(d2 + x * x + y * y) / cam.d;
    const std::size_t k = buf.index(col, row);
    if (l < buf.distance[k] || (l == buf.distance[k] && payload.triangle < buf.triangle[k])) {
      buf.distance[k] = l;
      buf.category[k] = payload.category;
      buf.triangle[k] = payload.triangle;
      return 2;
    }
    return 1;
  };

  const double min_c = std::min({a.col, b.col, c.col}), max_c = std::max({a.col, b.col, c.col});
  const double min_r = std::min({a.row, b.row, c.row}), max_r = std::max({a.row, b.row, c.row});
  // Bounding box rounded to the nearest pixel centers.
  // Clamp in floating point first; far vertices overflow int.
  auto lo = [](double v, int n) { return static_cast<int>(std::clamp(std::ceil(v - 0.5), 0.0, double(n))); };
  auto hi = [](double v, int n) { return static_cast<int>(std::clamp(std::floor(v - 0.5), -1.0, double(n - 1))); };
  const int c0 = lo(min_c, buf.width), c1 = hi(max_c, buf.width);
  const int r0 = lo(min_r, buf.height), r1 = hi(max_r, buf.height);
  if (c0 > c1 || r0 > r1) return 0;

  std::size_t written = 0;
  if (c1 - c0 < 2 || r1 - r0 < 2) {
    for (int r = r0; r <= r1; ++r)
      for (int col = c0; col <= c1; ++col) written += try_pixel(col, r) == 2;
    return written;
  }

  // Top point: smallest row, leftmost on ties.
  const ScreenVertex* top = &a;
  for (const ScreenVertex* v : {&b, &c}) {
    if (v->row < top->row || (v->row == top->row && v->col < top->col)) top = v;
  }
  int ref = static_cast<int>(std::clamp(std::floor(top->col), double(c0), double(c1)));
  for (int r = r0; r <= r1; ++r) {
    int first = -1, last = -1;
    bool seen = false;
    for (int col = ref; col <= c1; ++col) {
      const int hit = try_pixel(col, r);
      if (hit) {
        seen = true;
        written += hit == 2;
        if (first < 0) first = col;
        last = col;
      } else if (seen) {
        break;
      }
    }
    const bool ref_inside = first == ref;
    seen = ref_inside;
    if (ref_inside || first < 0) {
      for (int col = ref - 1; col >= c0; --col) {
        const int hit = try_pixel(col, r);
        if (hit) {
          seen = true;
          written += hit == 2;
          first = col;
          if (last < 0) last = col;
        } else if (seen) {
          break;
        }
      }
    }
    if (first >= 0) ref = (first + last) / 2;
  }
  return written;
}

ViewBuffers rasterize_scene(const Scene& scene, const Camera& camera, const view::ViewWeights& weights) {
  scene.validate();
  weights.validate();
  const Camera cam = camera.normalized();
  const CameraFrame fr = frame_of(cam);
  ViewBuffers buf(cam.pixels_x, cam.pixels_y);
  const double z_near = cam.d * 1e-3;
  const double sx = cam.pixels_x / cam.image_width, sy = cam.pixels_y / cam.image_height;
  auto to_screen = [&](Vec3 p) {
    return ScreenVertex{(cam.d * p.x / p.z + 0.5 * cam.image_width) * sx,
                        (0.5 * cam.image_height - cam.d * p.y / p.z) * sy, p.z};
  };

  for (std::size_t i = 0; i < scene.triangles.size(); ++i) {
    const auto& t = scene.triangles[i];
    std::array<Vec3, 3> ct{to_camera(fr, cam.position, t[0]), to_camera(fr, cam.position, t[1]),
                           to_camera(fr, cam.position, t[2])};
    const FillPayload payload{scene.categories[i], static_cast<std::int32_t>(i)};
    if (ct[0].z >= z_near && ct[1].z >= z_near && ct[2].z >= z_near) {
      fill_triangle(cam, {to_screen(ct[0]), to_screen(ct[1]), to_screen(ct[2])}, payload, buf);
      continue;
    }
    const auto poly = clip_near(ct, z_near);
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
      fill_triangle(cam, {to_screen(poly[0]), to_screen(poly[k]), to_screen(poly[k + 1])}, payload, buf);
    }
  }
  for (std::size_t k = 0; k < buf.size(); ++k) {
    buf.sigma[k] = view::sigma(buf.category[k], buf.category[k] == Category::kSky ? 0.0 : buf.distance[k] / 1000.0, weights);
  }
  return buf;
}

std::string format_category_ppm(const ViewBuffers& b) {
  std::string out = ppm_header(b);
  out.reserve(out.size() + 3 * b.size());
  for (Category c : b.category) {
    unsigned char rgb[3];
    switch (c) {
      case Category::kWater: rgb[0] = 0, rgb[1] = 0, rgb[2] = 255; break;
      case Category::kSky: rgb[0] = 135, rgb[1] = 206, rgb[2] = 235; break;
      case Category::kGround: rgb[0] = 0, rgb[1] = 128, rgb[2] = 0; break;
      case Category::kHouse: rgb[0] = 255, rgb[1] = 0, rgb[2] = 0; break;
    }
    out.append(reinterpret_cast<const char*>(rgb), 3);
  }
  return out;
}

std::string format_sigma_ppm(const ViewBuffers& b) {
  std::string out = ppm_header(b);
  out.reserve(out.size() + 3 * b.size());
  for (double s : b.sigma) {
    const auto g = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::clamp(s, 0.0, 1.0))));
    out.append(3, g);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace settle::raster
