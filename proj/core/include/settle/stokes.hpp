// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
//
// Taylor-Hood (P2 velocity / P1 pressure) discretization of the Stokes
// equations on a multimesh hierarchy. Couples every overlapping part to the
// background with Nitsche terms on the interface and stabilizes cut cells
// with gradient-jump, pressure-jump and least-squares terms.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "settle/multimesh.hpp"
#include "settle/vec.hpp"

namespace settle::fem {

using multimesh::MultiMesh;

/// Global dof numbering. Per part: x-velocity nodes, y-velocity nodes, then
/// pressure vertices. P2 node n of a part is vertex n for n < nv and edge
/// n - nv otherwise. Dofs whose support lies in COVERED cells are dropped.
class TaylorHoodSpace {
 public:
  static constexpr std::ptrdiff_t kInactive = -1;
  /// Local cell dof layout: [ux0..ux5, uy0..uy5, p0..p2], P2 nodes ordered as
  /// the three vertices followed by the edges opposite vertex 0, 1, 2.
  using CellDofs = std::array<std::ptrdiff_t, 15>;

  explicit TaylorHoodSpace(const MultiMesh& mm);

  std::size_t size() const { return size_; }
  std::size_t num_parts() const { return parts_.size(); }
  std::size_t num_nodes(std::size_t part) const { return parts_[part].nodes.size(); }
  Vec2 node_point(std::size_t part, std::size_t node) const { return parts_[part].nodes[node]; }

  std::ptrdiff_t velocity_dof(std::size_t part, std::size_t node, int component) const {
    return component == 0 ? parts_[part].ux[node] : parts_[part].uy[node];
  }
  std::ptrdiff_t pressure_dof(std::size_t part, std::size_t vertex) const { return parts_[part].p[vertex]; }
  CellDofs cell_dofs(std::size_t part, std::size_t cell) const;
  /// P2 node indices of a cell in local order.
  std::array<std::size_t, 6> cell_nodes(std::size_t part, std::size_t cell) const;

  std::size_t num_active_p2_nodes() const { return n_p2_; }
  std::size_t num_active_p1_vertices() const { return n_p1_; }
  /// True for pressure dofs.
  bool is_pressure(std::size_t dof) const { return pressure_mask_[dof] != 0; }

 private:
  struct PartDofs {
    std::vector<Vec2> nodes;
    std::vector<std::ptrdiff_t> ux, uy, p;
    std::size_t num_vertices = 0;
  };
  const MultiMesh* mm_;
  std::vector<PartDofs> parts_;
  std::vector<std::uint8_t> pressure_mask_;
  std::size_t size_ = 0, n_p2_ = 0, n_p1_ = 0;
};

struct StokesParams {
  double beta = 1e1;   // Nitsche penalty
  double gamma = 1e8;  // pressure-jump stabilization on overlapped cut-cell parts
  std::function<Vec2(Vec2)> f;  // body force; zero when empty
  /// Append a Lagrange multiplier enforcing zero mean pressure. Use when no
  /// pressure Dirichlet condition is applied.
  bool mean_zero_pressure = false;

  void validate() const;
};

/// The operator is assembled in extended precision and stored as A + A_low,
/// where A_low holds the rounding remainder of each entry. Factorize A; use
/// A + A_low for residuals.
struct LinearSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A_low;
  Eigen::VectorXd b;
  std::size_t num_dofs = 0;       // space dofs; A may carry one extra multiplier row
  std::vector<std::uint8_t> constrained;  // Dirichlet rows
};

/// Cell size used by every term: twice the circumradius.
double cell_size(const geometry::Triangle2& t);

/// Assembles the bilinear and linear forms over every part, the interface
/// and the cut cells of the background.
LinearSystem assemble_system(const MultiMesh& mm, const TaylorHoodSpace& space, const StokesParams& params);

enum class Field { kVelocity, kPressure };

/// Strong condition on one part. Selects facets by `marker` or the explicit
/// `edges` list (topology edge ids), or single `vertices`.
struct DirichletBC {
  Field field = Field::kVelocity;
  std::size_t part = 0;
  std::optional<int> marker;
  std::vector<std::size_t> edges;
  std::vector<std::size_t> vertices;
  /// value(x, component); component is 0 for pressure. Zero when empty.
  std::function<double(Vec2, int)> value;
};

/// Replaces constrained rows by identity rows with the prescribed values in
/// b. Later conditions win where two constrain the same dof. Throws
/// ValidationError when a marker does not exist on the referenced part.
LinearSystem apply_dirichlet(LinearSystem sys, const MultiMesh& mm, const TaylorHoodSpace& space,
                             std::span<const DirichletBC> bcs);

/// Pressure vertices whose every incident cell either has all velocity dofs
/// constrained or lies outside the background domain.
/// Their pressure is undetermined; callers pin it.
std::vector<DirichletBC> isolated_pressure_bcs(const MultiMesh& mm, const TaylorHoodSpace& space,
                                               const LinearSystem& constrained);

/// Four-pass no-slip facet marking on an overlapping part: start from all
/// exterior facets, drop facets of cells inside the background domain,
/// re-add every facet of cells crossing the background boundary, then add the
/// house-geometry facets (tagged `house_boundary_marker`) and, when given,
/// every facet of cells tagged `house_cell_marker`. Returns sorted edge ids.
std::vector<std::size_t> mark_house_noslip_facets(const MultiMesh& mm, std::size_t part, int house_boundary_marker,
                                                  std::optional<int> house_cell_marker = std::nullopt);

struct PointValue {
  Vec2 u{};
  double p = 0.0;
  multimesh::Location location{};
};

/// Evaluates on the topmost part containing x. Throws Error on a miss.
PointValue evaluate_solution(const MultiMesh& mm, const TaylorHoodSpace& space, const Eigen::VectorXd& coeffs, Vec2 x);
/// Evaluation restricted to a given part and cell.
PointValue evaluate_in_cell(const MultiMesh& mm, const TaylorHoodSpace& space, const Eigen::VectorXd& coeffs,
                            std::size_t part, std::size_t cell, Vec2 x);

struct L2Errors {
  double velocity = 0.0;
  double pressure = 0.0;
};

/// L2 errors over the physical domain (visible background plus all
/// overlapping parts) using a rule of the given degree on every sub-triangle.
L2Errors l2_errors(const MultiMesh& mm, const TaylorHoodSpace& space, const Eigen::VectorXd& coeffs,
                   const std::function<Vec2(Vec2)>& u_exact, const std::function<double(Vec2)>& p_exact,
                   int degree = 8);

/// Legacy ASCII VTK unstructured grid of quadratic triangles over every part,
/// COVERED background cells omitted. Point data: velocity (3 components,
/// zero at inactive nodes) and pressure (edge nodes average their endpoints).
/// Cell data: part index and cell state.
std::string format_vtk(const MultiMesh& mm, const TaylorHoodSpace& space, const Eigen::VectorXd& coeffs);

}  // namespace settle::fem
