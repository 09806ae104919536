// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include "settle/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "settle/error.hpp"

namespace settle::geometry {

namespace {

constexpr double kRelTol = 1e-12;

bool finite(const Box2& b) {
  return std::isfinite(b.lo.x) && std::isfinite(b.lo.y) && std::isfinite(b.hi.x) && std::isfinite(b.hi.y);
}

// Splits a convex vertex loop by the line through `a` with direction `dir`
// (unit). Positive side (left) goes to `in`, negative side to `out`.
void split_by_line(const std::vector<Vec2>& poly, Vec2 a, Vec2 dir, double snap, std::vector<Vec2>& in,
                   std::vector<Vec2>& out, int& n_pos, int& n_neg) {
  const std::size_t n = poly.size();
  std::vector<double> s(n);
  n_pos = n_neg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = cross(dir, poly[i] - a);
    if (std::abs(d) <= snap) d = 0.0;
    s[i] = d;
    n_pos += d > 0.0;
    n_neg += d < 0.0;
  }
  in.clear();
  out.clear();
  if (n_neg == 0 || n_pos == 0) return;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const Vec2 p = poly[i], q = poly[j];
    if (s[i] >= 0.0) in.push_back(p);
    if (s[i] <= 0.0) out.push_back(p);
    if ((s[i] > 0.0 && s[j] < 0.0) || (s[i] < 0.0 && s[j] > 0.0)) {
      const double t = s[i] / (s[i] - s[j]);
      const Vec2 x = p + t * (q - p);
      in.push_back(x);
      out.push_back(x);
    }
  }
}

std::vector<double> legendre_nodes(int n, std::vector<double>& weights) {
  std::vector<double> x(n);
  weights.assign(n, 0.0);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // map from [-1,1] to [0,1]
    x[i] = 0.5 * (1.0 - z);
    weights[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Box2 / AabbTree

Box2 Box2::of(std::span<const Vec2> points) {
  Box2 b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
         {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const Vec2& p : points) {
    b.lo.x = std::min(b.lo.x, p.x);
    b.lo.y = std::min(b.lo.y, p.y);
    b.hi.x = std::max(b.hi.x, p.x);
    b.hi.y = std::max(b.hi.y, p.y);
  }
  return b;
}

Box2 Box2::merged(const Box2& o) const {
  return {{std::min(lo.x, o.lo.x), std::min(lo.y, o.lo.y)}, {std::max(hi.x, o.hi.x), std::max(hi.y, o.hi.y)}};
}

AabbTree AabbTree::build(std::span<const Box2> boxes) {
  if (boxes.empty()) throw GeometryError("aabb_build: no boxes");
  for (const Box2& b : boxes) {
    if (!finite(b)) throw GeometryError("aabb_build: non-finite box");
  }
  AabbTree tree;
  tree.leaf_count_ = boxes.size();
  tree.nodes_.reserve(2 * boxes.size());
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  tree.build_range(order, boxes, 0, boxes.size());
  return tree;
}

int AabbTree::build_range(std::vector<std::size_t>& order, std::span<const Box2> boxes, std::size_t begin,
                          std::size_t end) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin == 1) {
    nodes_[index].box = boxes[order[begin]];
    nodes_[index].item = order[begin];
    return index;
  }
  Box2 centers{boxes[order[begin]].center(), boxes[order[begin]].center()};
  for (std::size_t i = begin; i < end; ++i) {
    const Vec2 c = boxes[order[i]].center();
    centers = centers.merged(Box2{c, c});
  }
  const bool split_x = (centers.hi.x - centers.lo.x) >= (centers.hi.y - centers.lo.y);
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(mid),
                   order.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     const Vec2 ca = boxes[a].center(), cb = boxes[b].center();
                     const double ka = split_x ? ca.x : ca.y, kb = split_x ? cb.x : cb.y;
                     return ka < kb || (ka == kb && a < b);
                   });
  const int left = build_range(order, boxes, begin, mid);
  const int right = build_range(order, boxes, mid, end);
  nodes_[index].left = left;
  nodes_[index].right = right;
  nodes_[index].box = nodes_[left].box.merged(nodes_[right].box);
  return index;
}

std::vector<std::size_t> AabbTree::query(const Box2& q) const {
  std::vector<std::size_t> hits;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!node.box.intersects(q)) continue;
    if (node.left < 0) {
      hits.push_back(node.item);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  std::sort(hits.begin(), hits.end());
  return hits;
}

std::size_t AabbTree::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes_[i].left >= 0) {
      stack.push_back({nodes_[i].left, d + 1});
      stack.push_back({nodes_[i].right, d + 1});
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Polygons

double Triangle2::area() const { return std::abs(signed_area()); }

ConvexPolygon ConvexPolygon::from_points(std::vector<Vec2> pts, double snap) {
  ConvexPolygon poly;
  // merge near-duplicates, including the wrap-around pair
  std::vector<Vec2> uniq;
  uniq.reserve(pts.size());
  for (const Vec2& p : pts) {
    if (uniq.empty() || norm(p - uniq.back()) > snap) uniq.push_back(p);
  }
  while (uniq.size() > 1 && norm(uniq.front() - uniq.back()) <= snap) uniq.pop_back();
  if (uniq.size() < 3) return poly;

  double twice_area = 0.0;
  for (std::size_t i = 1; i + 1 < uniq.size(); ++i) twice_area += cross(uniq[i] - uniq[0], uniq[i + 1] - uniq[0]);
  if (twice_area < 0.0) std::reverse(uniq.begin(), uniq.end());

  bool changed = true;
  while (changed && uniq.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < uniq.size(); ++i) {
      const Vec2 prev = uniq[(i + uniq.size() - 1) % uniq.size()];
      const Vec2 next = uniq[(i + 1) % uniq.size()];
      const Vec2 a = uniq[i] - prev, b = next - uniq[i];
      if (std::abs(cross(a, b)) <= kRelTol * norm(a) * norm(b)) {
        uniq.erase(uniq.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (uniq.size() >= 3) poly.vertices_ = std::move(uniq);
  return poly;
}

double ConvexPolygon::area() const {
  if (empty()) return 0.0;
  double a = 0.0;
  const Vec2 o = vertices_.front();
  for (std::size_t i = 1; i + 1 < vertices_.size(); ++i) a += cross(vertices_[i] - o, vertices_[i + 1] - o);
  return 0.5 * a;
}

ClipResult clip_polygon(const ConvexPolygon& subject, const ConvexPolygon& clipper) {
  if (clipper.empty()) throw GeometryError("clip: degenerate clipper");
  ClipResult result;
  if (subject.empty()) return result;

  const double scale = subject.bounds().merged(clipper.bounds()).diagonal();
  const double snap = kRelTol * scale;
  const double area_eps = kRelTol * scale * scale;
  if (clipper.area() <= area_eps) throw GeometryError("clip: degenerate clipper");

  // cheap reject
  if (!subject.bounds().intersects(clipper.bounds())) {
    result.outside.push_back(subject);
    return result;
  }

  std::vector<Vec2> current = subject.vertices();
  std::vector<Vec2> in, out;
  const auto& cv = clipper.vertices();
  for (std::size_t e = 0; e < cv.size(); ++e) {
    const Vec2 a = cv[e];
    const Vec2 d = cv[(e + 1) % cv.size()] - a;
    const Vec2 dir = d / norm(d);
    int n_pos = 0, n_neg = 0;
    split_by_line(current, a, dir, snap, in, out, n_pos, n_neg);
    if (n_neg == 0) continue;
    if (n_pos == 0) {
      result.outside.push_back(ConvexPolygon::from_points(current, snap));
      return result;
    }
    ConvexPolygon in_poly = ConvexPolygon::from_points(in, snap);
    ConvexPolygon out_poly = ConvexPolygon::from_points(out, snap);
    if (out_poly.area() < area_eps) continue;  // sliver stays attached
    if (in_poly.area() < area_eps) {
      result.outside.push_back(ConvexPolygon::from_points(current, snap));
      return result;
    }
    result.outside.push_back(std::move(out_poly));
    current = in_poly.vertices();
  }
  result.inside.push_back(ConvexPolygon::from_points(current, snap));
  return result;
}

ClipResult clip_triangle(const Triangle2& subject, const ConvexPolygon& clipper) {
  const double scale = subject.bounds().diagonal();
  if (!(subject.area() > kRelTol * scale * scale)) throw GeometryError("clip_triangle: degenerate subject");
  return clip_polygon(ConvexPolygon::from_triangle(subject), clipper);
}

std::vector<Triangle2> triangulate(const ConvexPolygon& poly) {
  if (poly.size() < 3) throw GeometryError("triangulate: polygon has fewer than 3 vertices");
  const auto& v = poly.vertices();
  std::vector<Triangle2> tris;
  tris.reserve(v.size() - 2);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) tris.push_back({{v[0], v[i], v[i + 1]}});
  return tris;
}

bool clip_segment(Vec2 a, Vec2 b, const Triangle2& tri, double& t0, double& t1) {
  Triangle2 t = tri;
  if (t.signed_area() < 0.0) std::swap(t.v[1], t.v[2]);
  t0 = 0.0;
  t1 = 1.0;
  const Vec2 d = b - a;
  const double scale = std::max(norm(d), tri.bounds().diagonal());
  for (int e = 0; e < 3; ++e) {
    const Vec2 p = t.v[e];
    const Vec2 edge = t.v[(e + 1) % 3] - p;
    const double len = norm(edge);
    // distance to the left of the edge: f(t) = f0 + t * df
    const double f0 = cross(edge, a - p) / len;
    const double df = cross(edge, d) / len;
    const double tol = kRelTol * scale;
    if (df == 0.0) {
      if (f0 < -tol) return false;
      continue;
    }
    const double tc = (-tol - f0) / df;  // where f(t) = -tol
    if (df > 0.0) t0 = std::max(t0, tc);
    else t1 = std::min(t1, tc);
    if (t0 >= t1) return false;
  }
  return t1 - t0 > 0.0;
}

std::array<double, 3> barycentric(const Triangle2& t, Vec2 p) {
  const double det = cross(t.v[1] - t.v[0], t.v[2] - t.v[0]);
  const double l1 = cross(p - t.v[0], t.v[2] - t.v[0]) / det;
  const double l2 = cross(t.v[1] - t.v[0], p - t.v[0]) / det;
  return {1.0 - l1 - l2, l1, l2};
}

bool contains(const Triangle2& t, Vec2 p, double tol) {
  const auto l = barycentric(t, p);
  return l[0] >= -tol && l[1] >= -tol && l[2] >= -tol;
}

// ---------------------------------------------------------------------------
// Quadrature

double QuadRule::measure() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

void QuadRule::append(const QuadRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

ReferenceSegmentRule gauss_segment_rule(int n) {
  if (n < 1) throw GeometryError("gauss_segment_rule: need at least one point");
  ReferenceSegmentRule rule;
  rule.points = legendre_nodes(n, rule.weights);
  rule.degree = 2 * n - 1;
  return rule;
}

ReferenceTriangleRule collapsed_gauss_rule(int n) {
  const ReferenceSegmentRule g = gauss_segment_rule(n);
  ReferenceTriangleRule rule;
  rule.degree = 2 * n - 2;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = g.points[i], t = g.points[j];
      rule.points.push_back({s, t * (1.0 - s)});
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - s));
    }
  }
  return rule;
}

ReferenceTriangleRule triangle_rule(int degree) {
  ReferenceTriangleRule rule;
  auto add_orbit = [&rule](double a, double b, double w) {
    // barycentric (b, a, a) and its permutations, mapped to (l1, l2)
    rule.points.push_back({a, a});
    rule.points.push_back({b, a});
    rule.points.push_back({a, b});
    for (int k = 0; k < 3; ++k) rule.weights.push_back(0.5 * w);
  };
  if (degree <= 1) {
    rule.points = {{1.0 / 3.0, 1.0 / 3.0}};
    rule.weights = {0.5};
    rule.degree = 1;
  } else if (degree == 2) {
    add_orbit(1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0);
    rule.degree = 2;
  } else if (degree <= 4) {
    // Dunavant, 6 points
    add_orbit(0.445948490915964886318329253883, 0.108103018168070227363341492234,
              0.223381589678011465944827736259);
    add_orbit(0.091576213509770743459571463402, 0.816847572980458513080857073196,
              0.109951743655321867388505597074);
    rule.degree = 4;
  } else if (degree == 5) {
    // Radon, 7 points
    const double r15 = std::sqrt(15.0);
    rule.points.push_back({1.0 / 3.0, 1.0 / 3.0});
    rule.weights.push_back(0.5 * 0.225);
    add_orbit((6.0 - r15) / 21.0, (9.0 + 2.0 * r15) / 21.0, (155.0 - r15) / 1200.0);
    add_orbit((6.0 + r15) / 21.0, (9.0 - 2.0 * r15) / 21.0, (155.0 + r15) / 1200.0);
    rule.degree = 5;
  } else {
    return collapsed_gauss_rule((degree + 3) / 2);
  }
  return rule;
}

QuadRule map_quadrature(const ReferenceTriangleRule& ref, const Triangle2& cell) {
  const double scale = cell.bounds().diagonal();
  const double area = cell.area();
  if (!(area > kRelTol * scale * scale)) throw GeometryError("map_quadrature: degenerate cell");
  QuadRule q;
  q.points.reserve(ref.points.size());
  q.weights.reserve(ref.points.size());
  const Vec2 e1 = cell.v[1] - cell.v[0], e2 = cell.v[2] - cell.v[0];
  for (std::size_t i = 0; i < ref.points.size(); ++i) {
    q.points.push_back(cell.v[0] + ref.points[i].x * e1 + ref.points[i].y * e2);
    q.weights.push_back(ref.weights[i] * 2.0 * area);
  }
  return q;
}

QuadRule map_quadrature(const ReferenceSegmentRule& ref, Vec2 a, Vec2 b) {
  const double len = norm(b - a);
  if (!(len > 0.0)) throw GeometryError("map_quadrature: degenerate segment");
  QuadRule q;
  for (std::size_t i = 0; i < ref.points.size(); ++i) {
    q.points.push_back(a + ref.points[i] * (b - a));
    q.weights.push_back(ref.weights[i] * len);
  }
  return q;
}

}  // namespace settle::geometry
