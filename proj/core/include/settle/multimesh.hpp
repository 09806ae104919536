// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
//
// Overlapping-mesh hierarchy: one background mesh (part 0) with any number of
// pairwise disjoint overlapping meshes placed on top of it. Building the
// hierarchy classifies every background cell, caches quadrature for the
// visible and overlapped parts of cut cells, and splits the overlapping-mesh
// boundaries into interface segments.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "settle/geometry.hpp"
#include "settle/mesh.hpp"

namespace settle::multimesh {

enum class CellState : std::uint8_t { kActive, kCut, kCovered };

/// Position of an overlapping-part cell relative to the background domain.
enum class Containment : std::uint8_t { kInside, kBoundary, kOutside };

/// Intersection of one cut background cell with one overlapping cell.
struct OverlapPiece {
  std::size_t background_cell = 0;
  std::size_t part = 0;  // overlapping part index (>= 1)
  std::size_t cell = 0;  // cell in that part
  double area = 0.0;
  geometry::QuadRule quadrature;
};

/// Piece of an overlapping-mesh boundary lying inside exactly one background
/// cell and one overlapping cell. `normal` points out of the overlapping part.
struct InterfaceSegment {
  Vec2 a{};
  Vec2 b{};
  Vec2 normal{};
  std::size_t part = 0;
  std::size_t background_cell = 0;
  std::size_t overlap_cell = 0;
  std::size_t overlap_edge = 0;  // boundary edge of the overlapping part
  geometry::QuadRule quadrature;

  double length() const { return norm(b - a); }
};

struct Location {
  std::size_t part = 0;
  std::size_t cell = 0;
  friend bool operator==(const Location&, const Location&) = default;
};

struct BuildOptions {
  /// Reference rule for cut-cell quadrature; degree 4 integrates P2*P2 exactly.
  int volume_degree = 4;
  /// Gauss points per interface sub-segment; 3 points are exact to degree 5.
  int interface_points = 3;
};

class MultiMesh {
 public:
  /// Throws ValidationError when `meshes` is empty, a mesh is not 2D, two
  /// overlapping meshes intersect each other, or an overlapping mesh does not
  /// intersect the background at all.
  static MultiMesh build(std::vector<mesh::Mesh> meshes, const BuildOptions& options = {});

  std::size_t num_parts() const { return parts_.size(); }
  const mesh::Mesh& part(std::size_t i) const { return parts_[i].mesh; }
  const mesh::Topology& topology(std::size_t i) const { return parts_[i].topology; }
  const geometry::AabbTree& tree(std::size_t i) const { return parts_[i].tree; }

  /// Overlapping parts are always fully active.
  CellState state(std::size_t part, std::size_t cell) const;
  std::size_t count(CellState s) const;

  /// Visible-part rule of a background cell: the full cell for ACTIVE cells,
  /// the residual outside all overlapping meshes for CUT cells, empty for
  /// COVERED cells.
  const geometry::QuadRule& visible_quadrature(std::size_t background_cell) const;
  /// Full-cell rule of any cell.
  const geometry::QuadRule& cell_quadrature(std::size_t part, std::size_t cell) const;

  /// Convex pieces making up the visible part of a CUT background cell.
  const std::vector<geometry::ConvexPolygon>& visible_polygons(std::size_t background_cell) const {
    return visible_polygons_[background_cell];
  }
  /// Whether an overlapping-part cell lies inside, across the boundary of, or
  /// outside the background domain. Background cells report kInside.
  Containment containment(std::size_t part, std::size_t cell) const;

  double visible_area(std::size_t background_cell) const { return visible_area_[background_cell]; }
  double overlapped_area(std::size_t background_cell) const { return overlapped_area_[background_cell]; }

  /// Overlapped parts of CUT background cells (pieces of COVERED cells are not kept).
  const std::vector<OverlapPiece>& overlap_pieces() const { return overlap_; }
  /// All interface segments of all overlapping parts.
  const std::vector<InterfaceSegment>& interface() const { return interface_; }
  std::vector<InterfaceSegment> interface_segments(std::size_t part) const;

  /// Topmost part whose domain contains `x`, and the containing cell.
  std::optional<Location> locate_point(Vec2 x) const;

  /// Degeneracy tolerance: 1e-12 * (background bounding-box diagonal)^2.
  double area_tolerance() const { return area_eps_; }

 private:
  struct Part {
    mesh::Mesh mesh;
    mesh::Topology topology;
    geometry::AabbTree tree;
    std::vector<geometry::QuadRule> cell_rules;
    std::vector<Containment> containment;
  };

  std::vector<Part> parts_;
  std::vector<CellState> state_;  // background cells
  std::vector<double> visible_area_;
  std::vector<double> overlapped_area_;
  std::vector<geometry::QuadRule> visible_rules_;  // background cells (empty for COVERED)
  std::vector<std::vector<geometry::ConvexPolygon>> visible_polygons_;
  std::vector<OverlapPiece> overlap_;
  std::vector<InterfaceSegment> interface_;
  double area_eps_ = 0.0;
};

}  // namespace settle::multimesh
