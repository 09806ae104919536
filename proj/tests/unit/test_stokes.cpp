// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "problems.hpp"
#include "settle/error.hpp"
#include "settle/stokes.hpp"

using namespace settle;
using multimesh::MultiMesh;

TEST(Space, DofCountSingleMesh) {
  auto m = mesh::generate_rect_mesh({{0, 0}, {1, 1}}, 3, 2);
  auto mm = MultiMesh::build({m});
  fem::TaylorHoodSpace space(mm);
  const auto edges = mesh::Topology::build(m).num_edges();
  EXPECT_EQ(space.size(), 2 * (m.num_vertices() + edges) + m.num_vertices());
  EXPECT_EQ(space.num_active_p1_vertices(), m.num_vertices());
}

TEST(Space, CoveredDofsDropped) {
  auto mm = MultiMesh::build({mesh::generate_rect_mesh({{0, 0}, {1, 1}}, 16, 16),
                              problems::square_patch({{0.2, 0.2}, 0.1, 0.6, 4})});
  fem::TaylorHoodSpace space(mm);
  std::size_t dropped = 0;
  for (std::size_t n = 0; n < space.num_nodes(0); ++n) dropped += space.velocity_dof(0, n, 0) < 0;
  EXPECT_GT(dropped, 0u);
  for (std::size_t c = 0; c < mm.part(0).num_cells(); ++c) {
    if (mm.state(0, c) == multimesh::CellState::kCovered) continue;
    for (auto d : space.cell_dofs(0, c)) EXPECT_GE(d, 0);
  }
}

TEST(Poiseuille, SingleMeshExact) {
  auto r = problems::solve_poiseuille({}, 8, 2);
  EXPECT_LT(r.max_velocity_error, 1e-10);
  EXPECT_LT(r.max_pressure_error, 1e-9);
  EXPECT_LT(r.residual, 1e-8);
}

TEST(Poiseuille, WithPatchExact) {
  auto patch = mesh::transform_mesh(mesh::generate_rect_mesh({{0, 0}, {0.4, 0.3}}, 4, 3), {{1.37, 0.31}, 0.3});
  for (double gamma : {1e8, 1.0}) {
    auto r = problems::solve_poiseuille({patch}, 32, 8, gamma);
    EXPECT_LT(r.max_velocity_error, 1e-8) << "gamma " << gamma;
    EXPECT_LT(r.max_pressure_error, 1e-8) << "gamma " << gamma;
  }
}

TEST(Evaluate, ReproducesInterpolatedQuadratic) {
  auto mm = MultiMesh::build({mesh::generate_rect_mesh({{0, 0}, {1, 1}}, 4, 4),
                              problems::square_patch({{0.3, 0.2}, 0.5, 0.4, 3})});
  fem::TaylorHoodSpace space(mm);
  auto ux = [](Vec2 x) { return 1.0 + x.x * x.y - 2.0 * x.y * x.y; };
  auto uy = [](Vec2 x) { return x.x * x.x - 0.5 * x.y; };
  auto p = [](Vec2 x) { return 3.0 - x.x + 2.0 * x.y; };
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
  for (std::size_t k = 0; k < mm.num_parts(); ++k)
    for (std::size_t n = 0; n < space.num_nodes(k); ++n) {
      const Vec2 x = space.node_point(k, n);
      if (auto d = space.velocity_dof(k, n, 0); d >= 0) coeffs[d] = ux(x);
      if (auto d = space.velocity_dof(k, n, 1); d >= 0) coeffs[d] = uy(x);
      if (n < mm.part(k).num_vertices())
        if (auto d = space.pressure_dof(k, n); d >= 0) coeffs[d] = p(x);
    }
  for (Vec2 x : {Vec2{0.1, 0.1}, Vec2{0.45, 0.4}, Vec2{0.9, 0.7}}) {
    auto v = fem::evaluate_solution(mm, space, coeffs, x);
    EXPECT_NEAR(v.u.x, ux(x), 1e-13);
    EXPECT_NEAR(v.u.y, uy(x), 1e-13);
    EXPECT_NEAR(v.p, p(x), 1e-13);
  }
  EXPECT_EQ(fem::evaluate_solution(mm, space, coeffs, {0.45, 0.4}).location.part, 1u);
  auto e = fem::l2_errors(mm, space, coeffs, [&](Vec2 x) { return Vec2{ux(x), uy(x)}; }, p);
  EXPECT_LT(e.velocity, 1e-13);
  EXPECT_LT(e.pressure, 1e-13);
  EXPECT_THROW(fem::evaluate_solution(mm, space, coeffs, {3.0, 3.0}), Error);
}

TEST(Dirichlet, UnknownMarkerThrows) {
  auto mm = MultiMesh::build({mesh::generate_rect_mesh({{0, 0}, {1, 1}}, 2, 2)});
  fem::TaylorHoodSpace space(mm);
  auto sys = fem::assemble_system(mm, space, {});
  fem::DirichletBC bc;
  bc.marker = 42;
  std::vector<fem::DirichletBC> bcs{bc};
  EXPECT_THROW(fem::apply_dirichlet(sys, mm, space, bcs), ValidationError);
}

TEST(Dirichlet, RowsBecomeIdentity) {
  auto mm = MultiMesh::build({mesh::generate_rect_mesh({{0, 0}, {1, 1}}, 2, 2)});
  fem::TaylorHoodSpace space(mm);
  fem::DirichletBC bc;
  bc.marker = mesh::kLeft;
  bc.value = [](Vec2 x, int c) { return c == 0 ? 2.0 + x.y : -1.0; };
  std::vector<fem::DirichletBC> bcs{bc};
  auto sys = fem::apply_dirichlet(fem::assemble_system(mm, space, {}), mm, space, bcs);
  std::size_t n = 0;
  for (std::size_t node = 0; node < space.num_nodes(0); ++node) {
    const Vec2 x = space.node_point(0, node);
    if (x.x != 0.0) continue;
    const auto d = space.velocity_dof(0, node, 0);
    ASSERT_TRUE(sys.constrained[d]);
    EXPECT_DOUBLE_EQ(sys.A.coeff(d, d), 1.0);
    EXPECT_DOUBLE_EQ(sys.A.row(d).sum(), 1.0);
    EXPECT_DOUBLE_EQ(sys.b[d], 2.0 + x.y);
    EXPECT_DOUBLE_EQ(sys.b[space.velocity_dof(0, node, 1)], -1.0);
    ++n;
  }
  EXPECT_EQ(n, 5u);  // 3 vertices and 2 edge midpoints
}

TEST(Params, RejectsNegativePenalties) {
  fem::StokesParams p;
  p.beta = -1.0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.gamma = std::nan("");
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(NoSlipMarking, InteriorPatchKeepsTaggedFacetsOnly) {
  auto patch = problems::square_patch({{0.3, 0.3}, 0.2, 0.3, 4});
  auto mm = MultiMesh::build({mesh::generate_rect_mesh({{0, 0}, {1, 1}}, 8, 8), patch});
  auto facets = fem::mark_house_noslip_facets(mm, 1, mesh::kBottom);
  EXPECT_EQ(facets.size(), 4u);
  const auto& topo = mm.topology(1);
  const auto markers = topo.edge_markers(mm.part(1));
  for (auto e : facets) EXPECT_EQ(markers[e], mesh::kBottom);
}

TEST(NoSlipMarking, CellMarkerAddsSolidFacets) {
  auto patch = problems::square_patch({{0.3, 0.3}, 0.0, 0.3, 2});
  patch.cell_markers.assign(patch.num_cells(), 0);
  patch.cell_markers[0] = 1;
  auto mm = MultiMesh::build({mesh::generate_rect_mesh({{0, 0}, {1, 1}}, 8, 8), patch});
  auto facets = fem::mark_house_noslip_facets(mm, 1, 99, 1);
  EXPECT_EQ(facets.size(), 3u);
}

TEST(NoSlipMarking, BoundaryCrossingCellsReAdded) {
  auto patch = problems::square_patch({{0.8, 0.3}, 0.0, 0.4, 4});
  auto mm = MultiMesh::build({mesh::generate_rect_mesh({{0, 0}, {1, 1}}, 8, 8), patch});
  auto facets = fem::mark_house_noslip_facets(mm, 1, 99);
  EXPECT_FALSE(facets.empty());
  const auto& topo = mm.topology(1);
  for (auto e : facets) {
    bool touches = false;
    for (auto c : topo.edge_cells[e])
      if (c >= 0 && mm.containment(1, static_cast<std::size_t>(c)) != multimesh::Containment::kInside) touches = true;
    EXPECT_TRUE(touches);
  }
}

TEST(Manufactured, ErrorDecreasesWithoutPatch) {
  auto a = problems::solve_manufactured(4, {}, 1e8);
  auto b = problems::solve_manufactured(8, {}, 1e8);
  EXPECT_GT(std::log2(a.errors.velocity / b.errors.velocity), 2.5);
  EXPECT_GT(std::log2(a.errors.pressure / b.errors.pressure), 1.5);
}

TEST(Vtk, HeaderAndCounts) {
  auto mm = MultiMesh::build({mesh::generate_rect_mesh({{0, 0}, {1, 1}}, 2, 2)});
  fem::TaylorHoodSpace space(mm);
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
  const auto vtk = fem::format_vtk(mm, space, coeffs);
  EXPECT_EQ(vtk.rfind("# vtk DataFile Version", 0), 0u);
  EXPECT_NE(vtk.find("CELLS 16 112"), std::string::npos);
  EXPECT_NE(vtk.find("VECTORS velocity"), std::string::npos);
}
