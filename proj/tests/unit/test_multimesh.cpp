// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "problems.hpp"
#include "settle/error.hpp"
#include "settle/multimesh.hpp"

using namespace settle;
using multimesh::CellState;
using multimesh::MultiMesh;

namespace {

MultiMesh unit_with_patch(std::size_t n, const problems::Placement& p) {
  return MultiMesh::build({mesh::generate_rect_mesh({{0, 0}, {1, 1}}, n, n), problems::square_patch(p)});
}

}  // namespace

TEST(MultiMeshTest, BackgroundOnlyIsAllActive) {
  auto mm = MultiMesh::build({mesh::generate_rect_mesh({{0, 0}, {1, 1}}, 4, 4)});
  EXPECT_EQ(mm.count(CellState::kActive), 64u);
  EXPECT_EQ(mm.count(CellState::kCut), 0u);
  EXPECT_TRUE(mm.interface().empty());
}

TEST(MultiMeshTest, AreaAndPerimeterIdentities) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    problems::Placement p{{0.2 + 0.3 * U(rng), 0.1 + 0.3 * U(rng)}, U(rng), 0.3, 5};
    auto mm = unit_with_patch(16, p);
    const double cell_area = 1.0 / (16.0 * 16.0 * 4.0);
    double covered = 0.0;
    for (std::size_t c = 0; c < mm.part(0).num_cells(); ++c) {
      covered += mm.overlapped_area(c);
      if (mm.state(0, c) == CellState::kCut) {
        EXPECT_NEAR((mm.visible_area(c) + mm.overlapped_area(c)) / cell_area, 1.0, 1e-12);
        EXPECT_NEAR(mm.visible_quadrature(c).measure(), mm.visible_area(c), 1e-15);
      }
    }
    EXPECT_NEAR(covered, p.side * p.side, 1e-13);
    double len = 0.0;
    for (const auto& s : mm.interface()) len += s.length();
    EXPECT_NEAR(len, 4.0 * p.side, 1e-12);
    EXPECT_GT(mm.count(CellState::kCovered), 0u);
  }
}

TEST(MultiMeshTest, InterfaceNormalsPointOutward) {
  problems::Placement p{{0.3, 0.3}, 0.4, 0.3, 4};
  auto mm = unit_with_patch(8, p);
  const Vec2 center = mesh::RigidTransform2D{p.origin, p.rotation}.apply({0.5 * p.side, 0.5 * p.side});
  for (const auto& s : mm.interface()) {
    EXPECT_NEAR(norm(s.normal), 1.0, 1e-14);
    EXPECT_GT(dot(s.normal, 0.5 * (s.a + s.b) - center), 0.0);
  }
}

TEST(MultiMeshTest, LocatePrefersTopPart) {
  problems::Placement p{{0.25, 0.25}, 0.0, 0.5, 4};
  auto mm = unit_with_patch(4, p);
  auto in = mm.locate_point({0.5, 0.5});
  ASSERT_TRUE(in);
  EXPECT_EQ(in->part, 1u);
  auto out = mm.locate_point({0.1, 0.9});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->part, 0u);
  EXPECT_FALSE(mm.locate_point({2.0, 2.0}));
}

TEST(MultiMeshTest, PatchAcrossBoundaryReportsContainment) {
  problems::Placement p{{0.83, 0.4}, 0.0, 0.4, 4};
  auto mm = unit_with_patch(8, p);
  std::size_t inside = 0, boundary = 0, outside = 0;
  for (std::size_t c = 0; c < mm.part(1).num_cells(); ++c) switch (mm.containment(1, c)) {
      case multimesh::Containment::kInside: ++inside; break;
      case multimesh::Containment::kBoundary: ++boundary; break;
      case multimesh::Containment::kOutside: ++outside; break;
    }
  EXPECT_GT(inside, 0u);
  EXPECT_GT(boundary, 0u);
  EXPECT_GT(outside, 0u);
  // Only the part of the boundary inside the background is interface.
  double len = 0.0;
  for (const auto& s : mm.interface()) len += s.length();
  EXPECT_NEAR(len, 0.17 + 0.4 + 0.17, 1e-12);
}

TEST(MultiMeshTest, BuildRejectsInvalidHierarchies) {
  auto bg = mesh::generate_rect_mesh({{0, 0}, {1, 1}}, 4, 4);
  EXPECT_THROW(MultiMesh::build({}), ValidationError);
  auto far = problems::square_patch({{5, 5}, 0.0, 0.2, 2});
  EXPECT_THROW(MultiMesh::build({bg, far}), ValidationError);
  auto a = problems::square_patch({{0.2, 0.2}, 0.0, 0.3, 2});
  auto b = problems::square_patch({{0.3, 0.3}, 0.0, 0.3, 2});
  EXPECT_THROW(MultiMesh::build({bg, a, b}), ValidationError);
  auto c = problems::square_patch({{0.6, 0.6}, 0.0, 0.3, 2});
  EXPECT_NO_THROW(MultiMesh::build({bg, a, c}));
}
