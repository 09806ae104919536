// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include "settle/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "settle/error.hpp"

namespace settle::mesh {

using geometry::Box2;

Box2 Mesh::bounds() const {
  std::vector<Vec2> pts;
  pts.reserve(vertices.size());
  for (std::size_t v = 0; v < vertices.size(); ++v) pts.push_back(point(v));
  return Box2::of(pts);
}

double Mesh::measure() const {
  double total = 0.0;
  for (const auto& c : cells) {
    if (dim == 2) {
      total += geometry::Triangle2{{point(c[0]), point(c[1]), point(c[2])}}.area();
    } else {
      total += 0.5 * norm(cross(vertices[c[1]] - vertices[c[0]], vertices[c[2]] - vertices[c[0]]));
    }
  }
  return total;
}

void Mesh::validate() const {
  if (dim != 2 && dim != 3) throw ValidationError("mesh: dim must be 2 or 3");
  if (!cell_markers.empty() && cell_markers.size() != cells.size())
    throw ValidationError("mesh: cell marker count does not match cell count");
  for (const Vec3& v : vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
      throw ValidationError("mesh: non-finite vertex coordinate");
  }
  std::set<std::array<std::size_t, 3>> seen;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto key = cells[c];
    for (std::size_t i : key) {
      if (i >= vertices.size()) throw ValidationError("mesh: cell " + std::to_string(c) + " index out of range");
    }
    if (dim == 2 && !(triangle(c).signed_area() > 0.0))
      throw ValidationError("mesh: cell " + std::to_string(c) + " is not positively oriented");
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) throw ValidationError("mesh: duplicate cell " + std::to_string(c));
  }
  for (const FacetMarker& f : facet_markers) {
    if (f.cell >= cells.size() || f.local_facet < 0 || f.local_facet > 2)
      throw ValidationError("mesh: facet marker references a missing facet");
  }
}

Topology Topology::build(const Mesh& mesh) {
  Topology t;
  t.cell_edges.resize(mesh.num_cells());
  t.vertex_cells.resize(mesh.num_vertices());
  std::map<std::array<std::size_t, 2>, std::size_t> index;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    for (int k = 0; k < 3; ++k) {
      t.vertex_cells[cell[k]].push_back(c);
      std::array<std::size_t, 2> key{cell[(k + 1) % 3], cell[(k + 2) % 3]};
      if (key[0] > key[1]) std::swap(key[0], key[1]);
      auto [it, inserted] = index.emplace(key, t.edges.size());
      if (inserted) {
        t.edges.push_back(key);
        t.edge_cells.push_back({static_cast<std::ptrdiff_t>(c), -1});
      } else {
        t.edge_cells[it->second][1] = static_cast<std::ptrdiff_t>(c);
      }
      t.cell_edges[c][k] = it->second;
    }
  }
  return t;
}

int Topology::local_facet(std::size_t cell, std::size_t edge) const {
  for (int k = 0; k < 3; ++k) {
    if (cell_edges[cell][k] == edge) return k;
  }
  return -1;
}

std::vector<int> Topology::edge_markers(const Mesh& mesh) const {
  std::vector<int> markers(edges.size(), 0);
  for (const FacetMarker& f : mesh.facet_markers) markers[cell_edges[f.cell][f.local_facet]] = f.marker;
  return markers;
}

double HeightProfile::at(double xq) const {
  if (x.empty()) return 0.0;
  if (xq <= x.front()) return height.front();
  if (xq >= x.back()) return height.back();
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double t = (xq - x[i - 1]) / (x[i] - x[i - 1]);
  return (1.0 - t) * height[i - 1] + t * height[i];
}

double HeightProfile::min() const { return *std::min_element(height.begin(), height.end()); }
double HeightProfile::max() const { return *std::max_element(height.begin(), height.end()); }

Mesh generate_column_mesh(std::span<const double> xs, const std::vector<std::vector<double>>& columns) {
  if (xs.size() < 2) throw ValidationError("column mesh: need at least one cell per direction");
  if (columns.size() != xs.size()) throw ValidationError("column mesh: one row list per x station required");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw ValidationError("column mesh: x stations must increase");
  }
  const std::size_t nx = xs.size() - 1, ny = columns.front().size() - 1;
  if (columns.front().size() < 2) throw ValidationError("column mesh: need at least one cell per direction");
  for (const auto& col : columns) {
    if (col.size() != ny + 1) throw ValidationError("column mesh: columns differ in row count");
    for (std::size_t j = 1; j < col.size(); ++j) {
      if (!(col[j] > col[j - 1])) throw ValidationError("column mesh: rows must increase within a column");
    }
  }
  auto corner = [&](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
  auto center = [&](std::size_t i, std::size_t j) { return (nx + 1) * (ny + 1) + j * nx + i; };

  Mesh m;
  m.dim = 2;
  m.vertices.resize((nx + 1) * (ny + 1) + nx * ny);
  for (std::size_t j = 0; j <= ny; ++j) {
    for (std::size_t i = 0; i <= nx; ++i) m.vertices[corner(i, j)] = {xs[i], columns[i][j], 0.0};
  }
  m.cells.reserve(4 * nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t v00 = corner(i, j), v10 = corner(i + 1, j), v11 = corner(i + 1, j + 1),
                        v01 = corner(i, j + 1), c = center(i, j);
      m.vertices[c] = 0.25 * (m.vertices[v00] + m.vertices[v10] + m.vertices[v11] + m.vertices[v01]);
      const std::size_t first = m.cells.size();
      m.cells.push_back({v00, v10, c});  // bottom
      m.cells.push_back({v10, v11, c});  // right
      m.cells.push_back({v11, v01, c});  // top
      m.cells.push_back({v01, v00, c});  // left
      // facet opposite the center vertex is local facet 2
      if (j == 0) m.facet_markers.push_back({first + 0, 2, kBottom});
      if (i == nx - 1) m.facet_markers.push_back({first + 1, 2, kRight});
      if (j == ny - 1) m.facet_markers.push_back({first + 2, 2, kTop});
      if (i == 0) m.facet_markers.push_back({first + 3, 2, kLeft});
    }
  }
  return m;
}

Mesh generate_grid_mesh(std::span<const double> xs, std::span<const double> ys,
                        const std::optional<HeightProfile>& bottom) {
  if (xs.size() < 2 || ys.size() < 2) throw ValidationError("grid mesh: need at least one cell per direction");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw ValidationError("grid mesh: x stations must increase");
  }
  for (std::size_t j = 1; j < ys.size(); ++j) {
    if (!(ys[j] > ys[j - 1])) throw ValidationError("grid mesh: y stations must increase");
  }
  const double y0 = ys.front(), y1 = ys.back();
  if (bottom) {
    if (bottom->x.size() < 2 || bottom->x.size() != bottom->height.size())
      throw ValidationError("grid mesh: bottom profile needs at least two stations");
    if (bottom->min() < y0 || !(bottom->max() < y1))
      throw ValidationError("grid mesh: bottom profile exceeds the box height");
  }
  std::vector<std::vector<double>> columns(xs.size(), std::vector<double>(ys.begin(), ys.end()));
  if (bottom) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double b = bottom->at(xs[i]);
      for (std::size_t j = 0; j < ys.size(); ++j) columns[i][j] = b + (ys[j] - y0) / (y1 - y0) * (y1 - b);
    }
  }
  return generate_column_mesh(xs, columns);
}

Mesh generate_rect_mesh(const Box2& bbox, std::size_t nx, std::size_t ny, const std::optional<HeightProfile>& bottom) {
  if (nx < 1 || ny < 1) throw ValidationError("rect mesh: nx and ny must be at least 1");
  if (!(bbox.hi.x > bbox.lo.x) || !(bbox.hi.y > bbox.lo.y)) throw ValidationError("rect mesh: empty box");
  std::vector<double> xs(nx + 1), ys(ny + 1);
  for (std::size_t i = 0; i <= nx; ++i) xs[i] = bbox.lo.x + (bbox.hi.x - bbox.lo.x) * static_cast<double>(i) / nx;
  for (std::size_t j = 0; j <= ny; ++j) ys[j] = bbox.lo.y + (bbox.hi.y - bbox.lo.y) * static_cast<double>(j) / ny;
  xs.back() = bbox.hi.x;
  ys.back() = bbox.hi.y;
  return generate_grid_mesh(xs, ys, bottom);
}

Vec2 RigidTransform2D::apply(Vec2 p) const {
  const double c = std::cos(rotation), s = std::sin(rotation);
  return Vec2{c * p.x - s * p.y, s * p.x + c * p.y} + translation;
}

RigidTransform2D RigidTransform2D::then(const RigidTransform2D& next) const {
  return {next.apply(translation), rotation + next.rotation};
}

RigidTransform2D RigidTransform2D::inverse() const {
  const RigidTransform2D rot_only{{0.0, 0.0}, -rotation};
  return {-rot_only.apply(translation), -rotation};
}

Mesh transform_mesh(const Mesh& mesh, const RigidTransform2D& t) {
  if (mesh.dim != 2) throw ValidationError("transform_mesh: 2D meshes only");
  Mesh out = mesh;
  if (t.rotation == 0.0 && t.translation == Vec2{}) return out;
  for (Vec3& v : out.vertices) {
    const Vec2 p = t.apply({v.x, v.y});
    v.x = p.x;
    v.y = p.y;
  }
  return out;
}

}  // namespace settle::mesh
