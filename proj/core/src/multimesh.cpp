// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include "settle/multimesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "settle/error.hpp"

namespace settle::multimesh {

using geometry::AabbTree;
using geometry::Box2;
using geometry::ConvexPolygon;
using geometry::QuadRule;
using geometry::Triangle2;

namespace {

std::vector<Box2> cell_boxes(const mesh::Mesh& m) {
  std::vector<Box2> boxes(m.num_cells());
  for (std::size_t c = 0; c < m.num_cells(); ++c) boxes[c] = m.triangle(c).bounds();
  return boxes;
}

// Appends the quadrature of a convex polygon; skips collinear fan triangles.
void add_polygon_rule(const ConvexPolygon& poly, const geometry::ReferenceTriangleRule& ref, QuadRule& out) {
  if (poly.empty()) return;
  for (const Triangle2& t : geometry::triangulate(poly)) {
    const double d = t.bounds().diagonal();
    if (!(t.area() > 1e-12 * d * d)) continue;
    out.append(geometry::map_quadrature(ref, t));
  }
}

}  // namespace

MultiMesh MultiMesh::build(std::vector<mesh::Mesh> meshes, const BuildOptions& options) {
  if (meshes.empty()) throw ValidationError("multimesh: no meshes");
  const auto ref = geometry::triangle_rule(options.volume_degree);
  const auto seg_ref = geometry::gauss_segment_rule(options.interface_points);

  MultiMesh mm;
  mm.parts_.reserve(meshes.size());
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    mesh::Mesh& m = meshes[i];
    if (m.dim != 2) throw ValidationError("multimesh: part " + std::to_string(i) + " is not a 2D mesh");
    if (m.cells.empty()) throw ValidationError("multimesh: part " + std::to_string(i) + " has no cells");
    m.validate();
    Part p{std::move(m), {}, {}, {}, {}};
    p.topology = mesh::Topology::build(p.mesh);
    const auto boxes = cell_boxes(p.mesh);
    p.tree = AabbTree::build(boxes);
    p.cell_rules.reserve(p.mesh.num_cells());
    for (std::size_t c = 0; c < p.mesh.num_cells(); ++c) p.cell_rules.push_back(geometry::map_quadrature(ref, p.mesh.triangle(c)));
    mm.parts_.push_back(std::move(p));
  }
  const double diag = mm.parts_[0].tree.bounds().diagonal();
  mm.area_eps_ = 1e-12 * diag * diag;
  const std::size_t n_parts = mm.parts_.size();

  // Overlapping meshes must be pairwise disjoint.
  for (std::size_t i = 1; i < n_parts; ++i) {
    for (std::size_t j = i + 1; j < n_parts; ++j) {
      if (!mm.parts_[i].tree.bounds().intersects(mm.parts_[j].tree.bounds())) continue;
      const mesh::Mesh& mi = mm.parts_[i].mesh;
      const mesh::Mesh& mj = mm.parts_[j].mesh;
      for (std::size_t ci = 0; ci < mi.num_cells(); ++ci) {
        const Triangle2 ti = mi.triangle(ci);
        for (std::size_t cj : mm.parts_[j].tree.query(ti.bounds())) {
          const auto r = geometry::clip_triangle(ti, ConvexPolygon::from_triangle(mj.triangle(cj)));
          if (!r.inside.empty() && r.inside.front().area() > mm.area_eps_) {
            throw ValidationError("multimesh: overlapping meshes " + std::to_string(i) + " and " + std::to_string(j) +
                                  " intersect");
          }
        }
      }
    }
  }

  const mesh::Mesh& bg = mm.parts_[0].mesh;
  const std::size_t n_bg = bg.num_cells();
  mm.state_.assign(n_bg, CellState::kActive);
  mm.visible_area_.assign(n_bg, 0.0);
  mm.overlapped_area_.assign(n_bg, 0.0);
  mm.visible_rules_.assign(n_bg, {});
  mm.visible_polygons_.assign(n_bg, {});
  std::vector<double> part_overlap(n_parts, 0.0);

  for (std::size_t c = 0; c < n_bg; ++c) {
    const Triangle2 tri = bg.triangle(c);
    const Box2 box = tri.bounds();
    const double cell_area = tri.area();
    std::vector<ConvexPolygon> visible{ConvexPolygon::from_triangle(tri)};
    std::map<std::pair<std::size_t, std::size_t>, std::vector<ConvexPolygon>> covered_by;
    for (std::size_t k = 1; k < n_parts; ++k) {
      const Part& part = mm.parts_[k];
      if (!part.tree.bounds().intersects(box)) continue;
      for (std::size_t j : part.tree.query(box)) {
        const ConvexPolygon clipper = ConvexPolygon::from_triangle(part.mesh.triangle(j));
        std::vector<ConvexPolygon> next;
        for (ConvexPolygon& piece : visible) {
          if (!piece.bounds().intersects(clipper.bounds())) {
            next.push_back(std::move(piece));
            continue;
          }
          auto r = geometry::clip_polygon(piece, clipper);
          for (auto& in : r.inside) covered_by[{k, j}].push_back(std::move(in));
          for (auto& out : r.outside) next.push_back(std::move(out));
        }
        visible = std::move(next);
      }
    }
    double overlapped = 0.0;
    for (const auto& [key, polys] : covered_by) {
      for (const auto& p : polys) overlapped += p.area();
    }
    double vis = 0.0;
    for (const auto& p : visible) vis += p.area();

    if (covered_by.empty() || overlapped <= mm.area_eps_) {
      mm.state_[c] = CellState::kActive;
      mm.visible_area_[c] = cell_area;
      mm.visible_rules_[c] = mm.parts_[0].cell_rules[c];
      continue;
    }
    for (const auto& [key, polys] : covered_by) {
      for (const auto& p : polys) part_overlap[key.first] += p.area();
    }
    if (vis < mm.area_eps_) {
      mm.state_[c] = CellState::kCovered;
      mm.overlapped_area_[c] = overlapped + vis;
      continue;
    }
    mm.state_[c] = CellState::kCut;
    mm.visible_area_[c] = vis;
    mm.overlapped_area_[c] = overlapped;
    for (const auto& p : visible) add_polygon_rule(p, ref, mm.visible_rules_[c]);
    mm.visible_polygons_[c] = std::move(visible);
    for (const auto& [key, polys] : covered_by) {
      OverlapPiece piece;
      piece.background_cell = c;
      piece.part = key.first;
      piece.cell = key.second;
      for (const auto& p : polys) {
        piece.area += p.area();
        add_polygon_rule(p, ref, piece.quadrature);
      }
      if (!piece.quadrature.empty()) mm.overlap_.push_back(std::move(piece));
    }
  }
  for (std::size_t k = 1; k < n_parts; ++k) {
    if (!(part_overlap[k] > mm.area_eps_))
      throw ValidationError("multimesh: overlapping mesh " + std::to_string(k) + " does not intersect the background");
  }

  // Containment of overlapping cells in the background domain.
  for (std::size_t k = 1; k < n_parts; ++k) {
    Part& part = mm.parts_[k];
    part.containment.assign(part.mesh.num_cells(), Containment::kOutside);
    for (std::size_t c = 0; c < part.mesh.num_cells(); ++c) {
      const Triangle2 tri = part.mesh.triangle(c);
      const double area = tri.area();
      const ConvexPolygon subject = ConvexPolygon::from_triangle(tri);
      double inside = 0.0;
      for (std::size_t bc : mm.parts_[0].tree.query(tri.bounds())) {
        const auto r = geometry::clip_polygon(subject, ConvexPolygon::from_triangle(bg.triangle(bc)));
        for (const auto& p : r.inside) inside += p.area();
      }
      const double tol = 1e-10 * area;
      if (inside >= area - tol) part.containment[c] = Containment::kInside;
      else if (inside > tol) part.containment[c] = Containment::kBoundary;
    }
  }

  // Interface: boundary edges of each overlapping part, split per background cell.
  const AabbTree& bg_tree = mm.parts_[0].tree;
  for (std::size_t k = 1; k < n_parts; ++k) {
    const Part& part = mm.parts_[k];
    const mesh::Topology& topo = part.topology;
    for (std::size_t e = 0; e < topo.num_edges(); ++e) {
      if (!topo.on_boundary(e)) continue;
      const auto cell = static_cast<std::size_t>(topo.edge_cells[e][0]);
      const int lf = topo.local_facet(cell, e);
      const auto& cv = part.mesh.cells[cell];
      const Vec2 a = part.mesh.point(cv[(lf + 1) % 3]);
      const Vec2 b = part.mesh.point(cv[(lf + 2) % 3]);
      const Vec2 d = b - a;
      const double len = norm(d);
      const Vec2 normal{d.y / len, -d.x / len};
      Box2 sbox = Box2::of(std::vector<Vec2>{a, b});
      const auto cands = bg_tree.query(sbox.inflated(1e-12 * diag));
      if (cands.empty()) continue;
      std::vector<double> breaks{0.0, 1.0};
      for (std::size_t bc : cands) {
        double t0 = 0.0, t1 = 0.0;
        if (geometry::clip_segment(a, b, bg.triangle(bc), t0, t1)) {
          breaks.push_back(std::clamp(t0, 0.0, 1.0));
          breaks.push_back(std::clamp(t1, 0.0, 1.0));
        }
      }
      std::sort(breaks.begin(), breaks.end());
      std::vector<double> uniq;
      for (double t : breaks) {
        if (uniq.empty() || (t - uniq.back()) * len > 1e-12 * diag) uniq.push_back(t);
      }
      uniq.back() = 1.0;
      for (std::size_t s = 0; s + 1 < uniq.size(); ++s) {
        const Vec2 pa = a + uniq[s] * d, pb = a + uniq[s + 1] * d;
        const Vec2 mid = 0.5 * (pa + pb);
        // Prefer the background cell on the outer side of the interface.
        const Vec2 probe = mid + (1e-7 * norm(pb - pa)) * normal;
        std::ptrdiff_t found = -1;
        for (const Vec2 q : {probe, mid}) {
          for (std::size_t bc : cands) {
            if (geometry::contains(bg.triangle(bc), q)) {
              found = static_cast<std::ptrdiff_t>(bc);
              break;
            }
          }
          if (found >= 0) break;
        }
        if (found < 0) continue;
        InterfaceSegment seg;
        seg.a = pa;
        seg.b = pb;
        seg.normal = normal;
        seg.part = k;
        seg.background_cell = static_cast<std::size_t>(found);
        seg.overlap_cell = cell;
        seg.overlap_edge = e;
        seg.quadrature = geometry::map_quadrature(seg_ref, pa, pb);
        mm.interface_.push_back(std::move(seg));
      }
    }
  }
  return mm;
}

CellState MultiMesh::state(std::size_t part, std::size_t cell) const {
  return part == 0 ? state_[cell] : CellState::kActive;
}

Containment MultiMesh::containment(std::size_t part, std::size_t cell) const {
  return part == 0 ? Containment::kInside : parts_[part].containment[cell];
}

std::size_t MultiMesh::count(CellState s) const {
  return static_cast<std::size_t>(std::count(state_.begin(), state_.end(), s));
}

const QuadRule& MultiMesh::visible_quadrature(std::size_t background_cell) const { return visible_rules_[background_cell]; }

const QuadRule& MultiMesh::cell_quadrature(std::size_t part, std::size_t cell) const {
  return parts_[part].cell_rules[cell];
}

std::vector<InterfaceSegment> MultiMesh::interface_segments(std::size_t part) const {
  std::vector<InterfaceSegment> out;
  for (const auto& s : interface_) {
    if (s.part == part) out.push_back(s);
  }
  return out;
}

std::optional<Location> MultiMesh::locate_point(Vec2 x) const {
  for (std::size_t k = parts_.size(); k-- > 0;) {
    const Part& p = parts_[k];
    if (!p.tree.bounds().contains(x)) continue;
    for (std::size_t c : p.tree.query(x)) {
      if (geometry::contains(p.mesh.triangle(c), x)) return Location{k, c};
    }
  }
  return std::nullopt;
}

}  // namespace settle::multimesh
