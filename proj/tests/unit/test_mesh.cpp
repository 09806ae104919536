// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "settle/error.hpp"
#include "settle/mesh.hpp"

using namespace settle;
using namespace settle::mesh;

namespace {

std::map<int, double> marker_lengths(const Mesh& m) {
  std::map<int, double> out;
  for (const auto& f : m.facet_markers) {
    const auto& c = m.cells[f.cell];
    const Vec2 a = m.point(c[(f.local_facet + 1) % 3]), b = m.point(c[(f.local_facet + 2) % 3]);
    out[f.marker] += norm(b - a);
  }
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("settle_test_" + name);
}

}  // namespace

TEST(RectMesh, CountsAndTags) {
  auto m = generate_rect_mesh({{0, 0}, {4, 1}}, 8, 3);
  EXPECT_EQ(m.num_cells(), 4u * 8 * 3);
  EXPECT_EQ(m.num_vertices(), 9u * 4 + 8 * 3);
  EXPECT_NEAR(m.measure(), 4.0, 1e-14);
  auto len = marker_lengths(m);
  EXPECT_NEAR(len[kBottom], 4.0, 1e-14);
  EXPECT_NEAR(len[kTop], 4.0, 1e-14);
  EXPECT_NEAR(len[kLeft], 1.0, 1e-14);
  EXPECT_NEAR(len[kRight], 1.0, 1e-14);
  EXPECT_EQ(m.facet_markers.size(), 2u * (8 + 3));
  EXPECT_NO_THROW(m.validate());
}

TEST(RectMesh, TopologyEulerCharacteristic) {
  auto m = generate_rect_mesh({{0, 0}, {1, 1}}, 5, 7);
  auto t = Topology::build(m);
  // V - E + F = 1 for a disc.
  EXPECT_EQ(static_cast<long>(m.num_vertices()) - static_cast<long>(t.num_edges()) + static_cast<long>(m.num_cells()),
            1);
  std::size_t boundary = 0;
  for (std::size_t e = 0; e < t.num_edges(); ++e) boundary += t.on_boundary(e);
  EXPECT_EQ(boundary, 2u * (5 + 7));
}

TEST(RectMesh, BottomProfileStretchesColumns) {
  HeightProfile bottom{{0.0, 2.0}, {0.0, 1.0}};
  auto m = generate_rect_mesh({{0, 0}, {2, 3}}, 4, 4, bottom);
  // Trapezoid between z = x / 2 and z = 3.
  EXPECT_NEAR(m.measure(), 2.0 * 3.0 - 1.0, 1e-13);
  EXPECT_NEAR(marker_lengths(m)[kBottom], std::sqrt(5.0), 1e-13);
}

TEST(ColumnMesh, TrapezoidArea) {
  std::vector<double> xs{0.0, 1.0, 3.0};
  std::vector<std::vector<double>> cols{{0.0, 1.0, 2.0}, {0.5, 1.0, 3.0}, {0.0, 2.0, 2.5}};
  auto m = generate_column_mesh(xs, cols);
  const double want = 1.0 * (2.0 + 2.5) / 2 + 2.0 * (2.5 + 2.5) / 2;
  EXPECT_NEAR(m.measure(), want, 1e-14);
  EXPECT_EQ(m.num_cells(), 4u * 2 * 2);
  EXPECT_NO_THROW(m.validate());
}

TEST(HeightProfileTest, LinearInterpolationAndClamp) {
  HeightProfile p{{0.0, 1.0, 3.0}, {2.0, 4.0, 0.0}};
  EXPECT_DOUBLE_EQ(p.at(0.5), 3.0);
  EXPECT_DOUBLE_EQ(p.at(2.0), 2.0);
  EXPECT_DOUBLE_EQ(p.min(), 0.0);
  EXPECT_DOUBLE_EQ(p.max(), 4.0);
}

TEST(Transform, PreservesMeasureAndComposes) {
  auto m = generate_rect_mesh({{0, 0}, {0.5, 0.3}}, 3, 2);
  RigidTransform2D t{{1.0, -2.0}, 0.7};
  auto moved = transform_mesh(m, t);
  EXPECT_NEAR(moved.measure(), m.measure(), 1e-15);
  const Vec2 p{0.2, 0.1};
  const Vec2 back = t.inverse().apply(t.apply(p));
  EXPECT_NEAR(back.x, p.x, 1e-15);
  EXPECT_NEAR(back.y, p.y, 1e-15);
  const Vec2 q = t.then(t).apply(p), r = t.apply(t.apply(p));
  EXPECT_NEAR(q.x, r.x, 1e-14);
  EXPECT_NEAR(q.y, r.y, 1e-14);
  const Vec2 rot = RigidTransform2D{{}, std::numbers::pi / 2}.apply({1, 0});
  EXPECT_NEAR(rot.x, 0.0, 1e-16);
  EXPECT_NEAR(rot.y, 1.0, 1e-16);
}

TEST(Validate, RejectsBadMeshes) {
  auto m = generate_rect_mesh({{0, 0}, {1, 1}}, 1, 1);
  auto flipped = m;
  std::swap(flipped.cells[0][1], flipped.cells[0][2]);
  EXPECT_THROW(flipped.validate(), ValidationError);
  auto oob = m;
  oob.cells[0][0] = 99;
  EXPECT_THROW(oob.validate(), ValidationError);
  auto dup = m;
  dup.cells.push_back(dup.cells[0]);
  EXPECT_THROW(dup.validate(), ValidationError);
}

TEST(MeshIo, TextRoundTrip) {
  auto m = generate_rect_mesh({{0, 0}, {2, 1}}, 3, 2);
  m.cell_markers.assign(m.num_cells(), 0);
  m.cell_markers[3] = 7;
  auto back = parse_mesh(format_mesh(m));
  EXPECT_EQ(back, m);
  const auto path = temp_path("roundtrip.mesh");
  write_mesh(m, path);
  EXPECT_EQ(read_mesh(path), m);
  std::filesystem::remove(path);
}

TEST(MeshIo, ParseErrorsCarryLine) {
  try {
    parse_mesh("mesh 2 3 1\nv 0 0\nv 1 0\nv zero 1\nc 0 1 2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(read_mesh(temp_path("does_not_exist.mesh")), Error);
}

TEST(Stl, AsciiImportMergesAndDropsDegenerate) {
  const auto path = temp_path("square.stl");
  {
    std::ofstream out(path);
    out << "solid sq\n";
    auto facet = [&](std::array<std::array<double, 3>, 3> v) {
      out << " facet normal 0 0 1\n  outer loop\n";
      for (auto& p : v) out << "   vertex " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
      out << "  endloop\n endfacet\n";
    };
    facet({{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}});
    facet({{{0, 0, 0}, {1, 1, 0}, {0, 1, 0}}});
    facet({{{0, 0, 0}, {1, 1, 0}, {2, 2, 0}}});
    out << "endsolid sq\n";
  }
  auto imp = read_stl(path);
  EXPECT_EQ(imp.facets_in_file, 3u);
  EXPECT_EQ(imp.dropped_degenerate, 1u);
  EXPECT_EQ(imp.mesh.num_cells(), 2u);
  EXPECT_EQ(imp.mesh.num_vertices(), 4u);
  EXPECT_EQ(imp.mesh.dim, 3);
  EXPECT_NEAR(imp.mesh.measure(), 1.0, 1e-15);
  std::filesystem::remove(path);
}

TEST(Stl, BinaryImport) {
  const auto path = temp_path("tri.stl");
  {
    std::ofstream out(path, std::ios::binary);
    char header[80] = {};
    out.write(header, 80);
    const std::uint32_t n = 1;
    out.write(reinterpret_cast<const char*>(&n), 4);
    const float data[12] = {0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 1};
    out.write(reinterpret_cast<const char*>(data), sizeof data);
    const std::uint16_t attr = 0;
    out.write(reinterpret_cast<const char*>(&attr), 2);
  }
  auto imp = read_stl(path);
  ASSERT_EQ(imp.mesh.num_cells(), 1u);
  // Legs (2, 0, 0) and (0, 2, 1).
  EXPECT_NEAR(imp.mesh.measure(), 0.5 * std::sqrt(4.0 + 16.0), 1e-6);
  std::filesystem::remove(path);
}
