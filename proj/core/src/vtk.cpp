// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <string>
#include <vector>

#include "settle/stokes.hpp"

namespace settle::fem {

namespace {

void append(std::string& out, const char* fmt, auto... args) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, args...);
  out += buf;
}

}  // namespace

std::string format_vtk(const MultiMesh& mm, const TaylorHoodSpace& space, const Eigen::VectorXd& coeffs) {
  auto value = [&](std::ptrdiff_t dof) { return dof >= 0 ? coeffs[dof] : 0.0; };
  std::vector<std::size_t> offset(space.num_parts() + 1, 0);
  for (std::size_t k = 0; k < space.num_parts(); ++k) offset[k + 1] = offset[k] + space.num_nodes(k);

  struct Cell {
    std::size_t part, cell;
  };
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < space.num_parts(); ++k) {
    for (std::size_t c = 0; c < mm.part(k).num_cells(); ++c) {
      if (mm.state(k, c) != multimesh::CellState::kCovered) cells.push_back({k, c});
    }
  }

  std::string out = "# vtk DataFile Version 3.0\nsettle flow fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  append(out, "POINTS %zu double\n", offset.back());
  for (std::size_t k = 0; k < space.num_parts(); ++k) {
    for (std::size_t n = 0; n < space.num_nodes(k); ++n) {
      const Vec2 p = space.node_point(k, n);
      append(out, "%.12g %.12g 0\n", p.x, p.y);
    }
  }
  append(out, "CELLS %zu %zu\n", cells.size(), 7 * cells.size());
  for (const Cell& c : cells) {
    const auto nd = space.cell_nodes(c.part, c.cell);
    const std::size_t o = offset[c.part];
    // VTK order: vertices, then midpoints of (0,1), (1,2), (2,0).
    append(out, "6 %zu %zu %zu %zu %zu %zu\n", o + nd[0], o + nd[1], o + nd[2], o + nd[5], o + nd[3], o + nd[4]);
  }
  append(out, "CELL_TYPES %zu\n", cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) out += "22\n";

  append(out, "CELL_DATA %zu\nSCALARS part int 1\nLOOKUP_TABLE default\n", cells.size());
  for (const Cell& c : cells) append(out, "%zu\n", c.part);
  out += "SCALARS state int 1\nLOOKUP_TABLE default\n";
  for (const Cell& c : cells) append(out, "%d\n", static_cast<int>(mm.state(c.part, c.cell)));

  append(out, "POINT_DATA %zu\nVECTORS velocity double\n", offset.back());
  for (std::size_t k = 0; k < space.num_parts(); ++k) {
    for (std::size_t n = 0; n < space.num_nodes(k); ++n) {
      append(out, "%.12g %.12g 0\n", value(space.velocity_dof(k, n, 0)), value(space.velocity_dof(k, n, 1)));
    }
  }
  out += "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < space.num_parts(); ++k) {
    const mesh::Mesh& m = mm.part(k);
    const mesh::Topology& topo = mm.topology(k);
    const std::size_t nv = m.num_vertices();
    for (std::size_t n = 0; n < space.num_nodes(k); ++n) {
      double p = 0.0;
      if (n < nv) {
        p = value(space.pressure_dof(k, n));
      } else {
        const auto& e = topo.edges[n - nv];
        p = 0.5 * (value(space.pressure_dof(k, e[0])) + value(space.pressure_dof(k, e[1])));
      }
      append(out, "%.12g\n", p);
    }
  }
  return out;
}

}  // namespace settle::fem
