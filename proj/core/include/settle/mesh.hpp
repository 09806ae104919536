// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "settle/geometry.hpp"
#include "settle/vec.hpp"

namespace settle::mesh {

/// Boundary tags written by the structured generator.
enum BoundaryTag : int { kBottom = 1, kLeft = 2, kRight = 3, kTop = 4 };

/// Marker on local facet `local_facet` of `cell`. Local facet k is the edge
/// opposite local vertex k.
struct FacetMarker {
  std::size_t cell = 0;
  int local_facet = 0;
  int marker = 0;
  friend bool operator==(const FacetMarker&, const FacetMarker&) = default;
};

/// Simplicial mesh: 2D triangles (z = 0) or a 3D triangulated surface.
struct Mesh {
  int dim = 2;
  std::vector<Vec3> vertices;
  std::vector<std::array<std::size_t, 3>> cells;
  std::vector<int> cell_markers;  // empty, or one entry per cell
  std::vector<FacetMarker> facet_markers;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_cells() const { return cells.size(); }
  Vec2 point(std::size_t v) const { return {vertices[v].x, vertices[v].y}; }
  geometry::Triangle2 triangle(std::size_t c) const {
    return {{point(cells[c][0]), point(cells[c][1]), point(cells[c][2])}};
  }
  int cell_marker(std::size_t c) const { return cell_markers.empty() ? 0 : cell_markers[c]; }
  geometry::Box2 bounds() const;
  /// Sum of cell areas (surface area for dim 3).
  double measure() const;

  /// Throws ValidationError when indices are out of range, 2D cells are not
  /// positively oriented, cells repeat, or markers reference missing facets.
  void validate() const;

  friend bool operator==(const Mesh&, const Mesh&) = default;
};

/// Edge connectivity derived from the cells of a 2D mesh.
struct Topology {
  std::vector<std::array<std::size_t, 2>> edges;       // ascending vertex pair
  std::vector<std::array<std::size_t, 3>> cell_edges;  // [c][k]: edge opposite local vertex k
  std::vector<std::array<std::ptrdiff_t, 2>> edge_cells;  // second is -1 on the boundary
  std::vector<std::vector<std::size_t>> vertex_cells;

  static Topology build(const Mesh& mesh);
  std::size_t num_edges() const { return edges.size(); }
  bool on_boundary(std::size_t e) const { return edge_cells[e][1] < 0; }
  int local_facet(std::size_t cell, std::size_t edge) const;
  /// Marker per edge (0 when unmarked) from the mesh's facet markers.
  std::vector<int> edge_markers(const Mesh& mesh) const;
};

/// Piecewise-linear height function sampled at increasing stations.
struct HeightProfile {
  std::vector<double> x;
  std::vector<double> height;

  double at(double xq) const;
  double min() const;
  double max() const;
};

/// Crossed-pattern mesh (four triangles around a center vertex per quad) on
/// the tensor grid `xs` x `ys`. When `bottom` is given, each vertex column is
/// stretched linearly so the first row follows the profile.
Mesh generate_grid_mesh(std::span<const double> xs, std::span<const double> ys,
                        const std::optional<HeightProfile>& bottom = std::nullopt);

/// Crossed-pattern mesh whose vertex column i sits at x = xs[i] with the
/// increasing heights columns[i]; every column has the same row count. Quads
/// are trapezoids, so rows may follow arbitrary piecewise-linear curves.
/// Boundary facets are tagged as in generate_rect_mesh.
Mesh generate_column_mesh(std::span<const double> xs, const std::vector<std::vector<double>>& columns);

/// Uniform crossed-pattern mesh on `bbox` with nx * ny quads, 4 nx ny cells.
/// Boundary facets tagged bottom=1, left=2, right=3, top=4.
Mesh generate_rect_mesh(const geometry::Box2& bbox, std::size_t nx, std::size_t ny,
                        const std::optional<HeightProfile>& bottom = std::nullopt);

struct RigidTransform2D {
  Vec2 translation{};
  double rotation = 0.0;  // radians, counter-clockwise

  Vec2 apply(Vec2 p) const;
  /// The transform that applies `*this` first, then `next`.
  RigidTransform2D then(const RigidTransform2D& next) const;
  RigidTransform2D inverse() const;
};

/// Rotation about the origin followed by translation. Connectivity and
/// markers are copied unchanged.
Mesh transform_mesh(const Mesh& mesh, const RigidTransform2D& t);

// Text format:
//   mesh <dim> <nvertices> <ncells>
//   v <x> <y> [<z>]
//   c <i> <j> <k> [marker]
//   f <cell> <local_facet> <marker>
Mesh read_mesh(const std::filesystem::path& path);
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);
Mesh parse_mesh(std::string_view text);
std::string format_mesh(const Mesh& mesh);

struct StlImport {
  Mesh mesh;  // dim 3, shared vertices merged by exact coordinate match
  std::size_t dropped_degenerate = 0;
  std::size_t facets_in_file = 0;
};

/// Binary or ASCII STL. Zero-area facets are dropped and counted.
StlImport read_stl(const std::filesystem::path& path);

}  // namespace settle::mesh
