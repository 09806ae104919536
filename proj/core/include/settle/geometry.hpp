// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
//
// 2D computational geometry kernel used by the multimesh builder:
// bounding-box trees, convex clipping of triangles, fan triangulation and
// affine mapping of reference quadrature rules.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "settle/vec.hpp"

namespace settle::geometry {

struct Box2 {
  Vec2 lo{};
  Vec2 hi{};

  static Box2 of(std::span<const Vec2> points);
  bool intersects(const Box2& o) const {
    return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y;
  }
  bool contains(Vec2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
  Box2 merged(const Box2& o) const;
  Box2 inflated(double pad) const { return {{lo.x - pad, lo.y - pad}, {hi.x + pad, hi.y + pad}}; }
  double diagonal() const { return norm(hi - lo); }
  Vec2 center() const { return 0.5 * (lo + hi); }
};

/// Balanced bounding-volume hierarchy over a fixed list of boxes. Leaves carry
/// the index of the input box. Immutable after construction.
class AabbTree {
 public:
  /// Throws GeometryError on empty input or non-finite coordinates.
  static AabbTree build(std::span<const Box2> boxes);

  /// Indices of all boxes intersecting `query` (closed-box test), ascending.
  std::vector<std::size_t> query(const Box2& query) const;
  std::vector<std::size_t> query(Vec2 point) const { return query(Box2{point, point}); }

  std::size_t size() const { return leaf_count_; }
  /// Number of edges on the longest root-to-leaf path; 0 for a single leaf.
  std::size_t depth() const;
  const Box2& bounds() const { return nodes_.front().box; }

 private:
  struct Node {
    Box2 box;
    int left = -1;   // child node indices; -1 for leaves
    int right = -1;
    std::size_t item = 0;
  };
  int build_range(std::vector<std::size_t>& order, std::span<const Box2> boxes, std::size_t begin,
                  std::size_t end);

  std::vector<Node> nodes_;
  std::size_t leaf_count_ = 0;
};

struct Triangle2 {
  std::array<Vec2, 3> v{};

  double signed_area() const { return 0.5 * cross(v[1] - v[0], v[2] - v[0]); }
  double area() const;
  Vec2 centroid() const { return (v[0] + v[1] + v[2]) / 3.0; }
  Box2 bounds() const { return Box2::of(v); }
};

/// Convex polygon with counter-clockwise vertices, duplicates and collinear
/// interior vertices removed.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  /// Canonicalizes `points` (assumed to describe a convex region in cyclic
  /// order, either orientation). Vertices closer than `snap` are merged.
  static ConvexPolygon from_points(std::vector<Vec2> points, double snap = 0.0);
  static ConvexPolygon from_triangle(const Triangle2& t) { return from_points({t.v.begin(), t.v.end()}); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.size() < 3; }
  double area() const;
  Box2 bounds() const { return Box2::of(vertices_); }

 private:
  std::vector<Vec2> vertices_;
};

struct ClipResult {
  std::vector<ConvexPolygon> inside;
  std::vector<ConvexPolygon> outside;
};

/// Splits `subject` into the part inside the convex `clipper` and a list of
/// convex parts outside it (one per clipper edge that cuts the subject).
/// Slivers with area below 1e-12 * diag^2 are not split off; they stay with
/// the piece they are attached to, so measure is preserved exactly.
ClipResult clip_triangle(const Triangle2& subject, const ConvexPolygon& clipper);
/// Same as clip_triangle for an arbitrary convex subject.
ClipResult clip_polygon(const ConvexPolygon& subject, const ConvexPolygon& clipper);

/// Fan triangulation from the first vertex. Throws for fewer than 3 vertices.
std::vector<Triangle2> triangulate(const ConvexPolygon& poly);

/// Parameter interval [t0, t1] of the segment a + t (b - a), t in [0,1], that
/// lies inside the triangle. Returns false when the intersection is empty or
/// a single point.
bool clip_segment(Vec2 a, Vec2 b, const Triangle2& tri, double& t0, double& t1);

/// Barycentric coordinates of `p` with respect to `t`.
std::array<double, 3> barycentric(const Triangle2& t, Vec2 p);
/// Closed containment test with relative tolerance on the barycentric coordinates.
bool contains(const Triangle2& t, Vec2 p, double tol = 1e-12);

/// Quadrature rule in physical coordinates. Weights are measures (length or area).
struct QuadRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  double measure() const;
  void append(const QuadRule& other);
};

/// Rule on the reference triangle (0,0),(1,0),(0,1); weights sum to 1/2.
struct ReferenceTriangleRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Rule on the unit interval [0,1]; weights sum to 1.
struct ReferenceSegmentRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Symmetric rule exact for polynomials of total degree `degree` (1..5 use
/// closed-form Dunavant/Radon rules, higher degrees a collapsed Gauss product).
ReferenceTriangleRule triangle_rule(int degree);
/// Gauss-Legendre with `points` nodes, exact to degree 2*points-1.
ReferenceSegmentRule gauss_segment_rule(int points);
/// Collapsed (Duffy) Gauss product rule with n*n points, exact to degree 2n-2.
ReferenceTriangleRule collapsed_gauss_rule(int n);

/// Affine map of a reference rule onto a physical triangle. Throws
/// GeometryError if the triangle is degenerate.
QuadRule map_quadrature(const ReferenceTriangleRule& ref, const Triangle2& cell);
/// Affine map of a reference rule onto the segment [a, b].
QuadRule map_quadrature(const ReferenceSegmentRule& ref, Vec2 a, Vec2 b);

}  // namespace settle::geometry
