// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "settle/error.hpp"
#include "settle/geometry.hpp"

using namespace settle;
using namespace settle::geometry;

namespace {

double total_area(const std::vector<ConvexPolygon>& ps) {
  double a = 0.0;
  for (const auto& p : ps) a += p.area();
  return a;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST(Clip, SquareInsideTriangle) {
  Triangle2 t{{Vec2{0, 0}, Vec2{2, 0}, Vec2{0, 2}}};
  auto sq = ConvexPolygon::from_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  auto r = clip_triangle(t, sq);
  EXPECT_NEAR(total_area(r.inside), 1.0, 1e-15);
  EXPECT_NEAR(total_area(r.outside), 1.0, 1e-15);
}

TEST(Clip, CornerPiece) {
  Triangle2 t{{Vec2{0, 0}, Vec2{2, 0}, Vec2{0, 2}}};
  auto sq = ConvexPolygon::from_points({{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}});
  auto r = clip_triangle(t, sq);
  EXPECT_NEAR(total_area(r.inside), 0.5, 1e-15);
  EXPECT_NEAR(total_area(r.outside), 1.5, 1e-15);
  for (const auto& p : r.outside) EXPECT_GT(p.area(), 0.0);
}

TEST(Clip, DisjointLeavesSubjectOutside) {
  Triangle2 t{{Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}}};
  auto sq = ConvexPolygon::from_points({{5, 5}, {6, 5}, {6, 6}, {5, 6}});
  auto r = clip_triangle(t, sq);
  EXPECT_TRUE(r.inside.empty());
  EXPECT_NEAR(total_area(r.outside), 0.5, 1e-15);
}

TEST(Clip, RandomMeasureConservation) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    Triangle2 t{{Vec2{U(rng), U(rng)}, Vec2{U(rng), U(rng)}, Vec2{U(rng), U(rng)}}};
    if (std::abs(oracle::polygon_area({t.v.begin(), t.v.end()})) < 1e-3) continue;
    const double a = U(rng) * 3.0, s = 0.3 + 0.5 * std::abs(U(rng));
    const Vec2 c{U(rng) * 0.5, U(rng) * 0.5}, ex{std::cos(a), std::sin(a)}, ey{-ex.y, ex.x};
    auto sq = ConvexPolygon::from_points({c - s * ex - s * ey, c + s * ex - s * ey, c + s * ex + s * ey,
                                          c - s * ex + s * ey});
    auto r = clip_triangle(t, sq);
    const double want = std::abs(oracle::polygon_area({t.v.begin(), t.v.end()}));
    EXPECT_NEAR(total_area(r.inside) + total_area(r.outside), want, 1e-13);
  }
}

TEST(Clip, DegenerateClipperThrows) {
  Triangle2 t{{Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}}};
  auto line = ConvexPolygon::from_points({{0, 0}, {1, 1}, {2, 2}});
  EXPECT_THROW(clip_triangle(t, line), GeometryError);
}

TEST(ConvexPolygonTest, CanonicalOrientation) {
  auto cw = ConvexPolygon::from_points({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_DOUBLE_EQ(cw.area(), 1.0);
  EXPECT_GT(oracle::polygon_area(cw.vertices()), 0.0);
  auto col = ConvexPolygon::from_points({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}});
  EXPECT_EQ(col.size(), 4u);
}

TEST(Triangulate, FanCoversPolygon) {
  auto hex = ConvexPolygon::from_points({{1, 0}, {2, 0}, {3, 1}, {2, 2}, {1, 2}, {0, 1}});
  auto tris = triangulate(hex);
  EXPECT_EQ(tris.size(), 4u);
  double a = 0.0;
  for (const auto& t : tris) a += t.area();
  EXPECT_NEAR(a, 4.0, 1e-15);
  EXPECT_THROW(triangulate(ConvexPolygon{}), GeometryError);
}

TEST(Aabb, QueryMatchesBruteForce) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0.0, 10.0);
  std::vector<Box2> boxes;
  for (int i = 0; i < 300; ++i) {
    const Vec2 lo{U(rng), U(rng)};
    boxes.push_back({lo, lo + Vec2{U(rng) * 0.3, U(rng) * 0.3}});
  }
  auto tree = AabbTree::build(boxes);
  for (int q = 0; q < 100; ++q) {
    const Vec2 lo{U(rng), U(rng)};
    const Box2 query{lo, lo + Vec2{1.0, 0.5}};
    auto got = tree.query(query);
    std::sort(got.begin(), got.end());
    std::vector<std::size_t> want;
    for (std::size_t i = 0; i < boxes.size(); ++i)
      if (boxes[i].lo.x <= query.hi.x && query.lo.x <= boxes[i].hi.x && boxes[i].lo.y <= query.hi.y &&
          query.lo.y <= boxes[i].hi.y)
        want.push_back(i);
    EXPECT_EQ(got, want);
  }
  EXPECT_LE(tree.depth(), 20u);
  EXPECT_THROW(AabbTree::build({}), GeometryError);
}

TEST(Quadrature, TriangleRulesExactForMonomials) {
  for (int degree = 1; degree <= 10; ++degree) {
    auto rule = triangle_rule(degree);
    EXPECT_GE(rule.degree, degree);
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        double got = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q)
          got += rule.weights[q] * std::pow(rule.points[q].x, a) * std::pow(rule.points[q].y, b);
        const double want = factorial(a) * factorial(b) / factorial(a + b + 2);
        EXPECT_NEAR(got, want, 1e-14) << "degree " << degree << " x^" << a << " y^" << b;
      }
  }
}

TEST(Quadrature, GaussSegmentExactness) {
  for (int n = 1; n <= 6; ++n) {
    auto rule = gauss_segment_rule(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double got = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) got += rule.weights[q] * std::pow(rule.points[q], k);
      EXPECT_NEAR(got, 1.0 / (k + 1), 1e-14);
    }
  }
  EXPECT_THROW(gauss_segment_rule(0), GeometryError);
}

TEST(Quadrature, MappedRuleMeasure) {
  Triangle2 t{{Vec2{1, 1}, Vec2{4, 2}, Vec2{2, 5}}};
  auto q = map_quadrature(triangle_rule(4), t);
  EXPECT_NEAR(q.measure(), 0.5 * 11.0, 1e-13);
  // Integral of x over the triangle equals area times centroid x.
  double ix = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) ix += q.weights[i] * q.points[i].x;
  EXPECT_NEAR(ix, 5.5 * 7.0 / 3.0, 1e-12);
  auto s = map_quadrature(gauss_segment_rule(2), Vec2{0, 0}, Vec2{3, 4});
  EXPECT_NEAR(s.measure(), 5.0, 1e-14);
}

TEST(Barycentric, RoundTripAndContainment) {
  Triangle2 t{{Vec2{0, 0}, Vec2{2, 0}, Vec2{0, 1}}};
  auto b = barycentric(t, {0.5, 0.25});
  EXPECT_NEAR(b[0], 0.5, 1e-15);
  EXPECT_NEAR(b[1], 0.25, 1e-15);
  EXPECT_NEAR(b[2], 0.25, 1e-15);
  EXPECT_TRUE(contains(t, {1.0, 0.5}));  // on the hypotenuse
  EXPECT_FALSE(contains(t, {1.0, 0.6}));
}

TEST(ClipSegment, Interval) {
  Triangle2 t{{Vec2{0, 0}, Vec2{2, 0}, Vec2{0, 2}}};
  double t0 = 0, t1 = 0;
  ASSERT_TRUE(clip_segment({-1, 0.5}, {3, 0.5}, t, t0, t1));
  EXPECT_NEAR(t0, 0.25, 1e-11);
  EXPECT_NEAR(t1, 0.625, 1e-11);
  EXPECT_FALSE(clip_segment({-1, 3}, {3, 3}, t, t0, t1));
}
