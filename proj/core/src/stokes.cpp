// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include "settle/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "settle/error.hpp"

namespace settle::fem {

using geometry::Triangle2;
using multimesh::CellState;
using multimesh::Containment;

namespace {

// Assembly runs in extended precision: the pressure-jump penalty is many
// orders of magnitude above the other terms, so entry rounding in double
// would be amplified by it.
using Real = long double;

struct V2 {
  Real x = 0, y = 0;
};
inline V2 operator+(V2 a, V2 b) { return {a.x + b.x, a.y + b.y}; }
inline V2 operator*(Real s, V2 a) { return {s * a.x, s * a.y}; }
inline Real dotr(V2 a, V2 b) { return a.x * b.x + a.y * b.y; }
inline V2 lift(Vec2 a) { return {a.x, a.y}; }

// P2 and P1 shape functions of one triangle at one point.
struct Shape {
  Real phi[6];
  V2 dphi[6];
  Real lap[6];
  Real psi[3];
  V2 dpsi[3];
};

Shape shape_at(const Triangle2& t, Vec2 xd) {
  const V2 v0 = lift(t.v[0]), v1 = lift(t.v[1]), v2 = lift(t.v[2]), x = lift(xd);
  auto crs = [](V2 a, V2 b) { return a.x * b.y - a.y * b.x; };
  auto sub = [](V2 a, V2 b) { return V2{a.x - b.x, a.y - b.y}; };
  const Real det = crs(sub(v1, v0), sub(v2, v0));
  const V2 g[3] = {V2{(v1.y - v2.y) / det, (v2.x - v1.x) / det}, V2{(v2.y - v0.y) / det, (v0.x - v2.x) / det},
                   V2{(v0.y - v1.y) / det, (v1.x - v0.x) / det}};
  const Real l1 = crs(sub(x, v0), sub(v2, v0)) / det;
  const Real l2 = crs(sub(v1, v0), sub(x, v0)) / det;
  const Real l[3] = {1 - l1 - l2, l1, l2};
  Shape s;
  for (int i = 0; i < 3; ++i) {
    s.phi[i] = l[i] * (2 * l[i] - 1);
    s.dphi[i] = (4 * l[i] - 1) * g[i];
    s.lap[i] = 4 * dotr(g[i], g[i]);
    s.psi[i] = l[i];
    s.dpsi[i] = g[i];
  }
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    s.phi[3 + k] = 4 * l[a] * l[b];
    s.dphi[3 + k] = 4 * (l[a] * g[b] + l[b] * g[a]);
    s.lap[3 + k] = 8 * dotr(g[a], g[b]);
  }
  return s;
}

using Triplets = std::vector<Eigen::Triplet<Real>>;
using RealVector = std::vector<Real>;

// Dense element matrix over an arbitrary dof list.
struct Local {
  std::vector<std::ptrdiff_t> dofs;
  std::vector<Real> A;
  std::vector<Real> b;

  explicit Local(std::vector<std::ptrdiff_t> d) : dofs(std::move(d)), A(dofs.size() * dofs.size(), 0.0), b(dofs.size(), 0.0) {}
  Real& at(std::size_t i, std::size_t j) { return A[i * dofs.size() + j]; }

  void scatter(Triplets& trip, RealVector& rhs) const {
    const std::size_t n = dofs.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (dofs[i] < 0) continue;
      if (b[i] != 0.0) rhs[dofs[i]] += b[i];
      for (std::size_t j = 0; j < n; ++j) {
        const Real v = A[i * n + j];
        if (v != 0.0 && dofs[j] >= 0) trip.emplace_back(dofs[i], dofs[j], v);
      }
    }
  }
};

std::vector<std::ptrdiff_t> concat(const TaylorHoodSpace::CellDofs& a, const TaylorHoodSpace::CellDofs& b) {
  std::vector<std::ptrdiff_t> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Indices into the 15-entry cell layout.
constexpr std::size_t ux(std::size_t i) { return i; }
constexpr std::size_t uy(std::size_t i) { return 6 + i; }
constexpr std::size_t pp(std::size_t i) { return 12 + i; }
constexpr std::size_t vel(int comp, std::size_t i) { return comp == 0 ? ux(i) : uy(i); }

Vec2 force(const StokesParams& params, Vec2 x) { return params.f ? params.f(x) : Vec2{}; }

// Galerkin volume terms on one cell over the given rule.
void add_volume(Local& L, const Triangle2& tri, const geometry::QuadRule& rule, const StokesParams& params) {
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 x = rule.points[q];
    const Real w = rule.weights[q];
    const Shape s = shape_at(tri, x);
    const Vec2 f = force(params, x);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        const Real k = w * dotr(s.dphi[i], s.dphi[j]);
        L.at(ux(i), ux(j)) += k;
        L.at(uy(i), uy(j)) += k;
      }
      for (std::size_t j = 0; j < 3; ++j) {
        // -(div v, p) and -(div u, q)
        const Real bx = -w * s.dphi[i].x * s.psi[j];
        const Real by = -w * s.dphi[i].y * s.psi[j];
        L.at(ux(i), pp(j)) += bx;
        L.at(uy(i), pp(j)) += by;
        L.at(pp(j), ux(i)) += bx;
        L.at(pp(j), uy(i)) += by;
      }
      L.b[ux(i)] += w * f.x * s.phi[i];
      L.b[uy(i)] += w * f.y * s.phi[i];
    }
  }
}

// h^2 (lap u - grad p, lap v + grad q) and its right-hand side.
void add_least_squares(Local& L, const Triangle2& tri, const geometry::QuadRule& rule, double h,
                       const StokesParams& params) {
  const Real h2 = static_cast<Real>(h) * h;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 x = rule.points[q];
    const Real w = h2 * rule.weights[q];
    const Shape s = shape_at(tri, x);
    const Vec2 f = force(params, x);
    // Residual of trial dof J per component: lap for velocity, -grad for pressure.
    // Test of dof I per component: lap for velocity, +grad for pressure.
    for (int c = 0; c < 2; ++c) {
      auto comp = [c](V2 v) { return c == 0 ? v.x : v.y; };
      const Real fc = c == 0 ? f.x : f.y;
      for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) L.at(vel(c, i), vel(c, j)) += w * s.lap[i] * s.lap[j];
        for (std::size_t j = 0; j < 3; ++j) {
          L.at(vel(c, i), pp(j)) += -w * s.lap[i] * comp(s.dpsi[j]);
          L.at(pp(j), vel(c, i)) += w * comp(s.dpsi[j]) * s.lap[i];
        }
        L.b[vel(c, i)] += -w * fc * s.lap[i];
      }
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) L.at(pp(i), pp(j)) += -w * comp(s.dpsi[i]) * comp(s.dpsi[j]);
        L.b[pp(i)] += -w * fc * comp(s.dpsi[i]);
      }
    }
  }
}

// Dof layout of a two-sided term: overlapping cell first (sign +1), then the
// background cell (sign -1).
struct TwoSided {
  Shape s[2];
  static constexpr Real sign[2] = {1.0, -1.0};
  static constexpr std::size_t offset[2] = {0, 15};
};

// Splits an extended-precision matrix into its double rounding and the remainder.
void split_matrix(const Eigen::SparseMatrix<Real, Eigen::RowMajor>& full, Eigen::SparseMatrix<double, Eigen::RowMajor>& hi,
                  Eigen::SparseMatrix<double, Eigen::RowMajor>& lo) {
  hi = full.cast<double>();
  std::vector<Eigen::Triplet<double>> low;
  for (Eigen::Index r = 0; r < full.outerSize(); ++r) {
    for (Eigen::SparseMatrix<Real, Eigen::RowMajor>::InnerIterator it(full, r); it; ++it) {
      const double h = static_cast<double>(it.value());
      const double l = static_cast<double>(it.value() - h);
      if (l != 0.0) low.emplace_back(it.row(), it.col(), l);
    }
  }
  hi.prune(0.0, 0.0);
  hi.makeCompressed();
  lo.resize(full.rows(), full.cols());
  lo.setFromTriplets(low.begin(), low.end());
  lo.makeCompressed();
}

}  // namespace

double cell_size(const Triangle2& t) {
  const double a = norm(t.v[1] - t.v[0]), b = norm(t.v[2] - t.v[1]), c = norm(t.v[0] - t.v[2]);
  return 2.0 * a * b * c / (4.0 * t.area());
}

TaylorHoodSpace::TaylorHoodSpace(const MultiMesh& mm) : mm_(&mm) {
  parts_.resize(mm.num_parts());
  for (std::size_t k = 0; k < mm.num_parts(); ++k) {
    const mesh::Mesh& m = mm.part(k);
    const mesh::Topology& topo = mm.topology(k);
    PartDofs& pd = parts_[k];
    const std::size_t nv = m.num_vertices(), ne = topo.num_edges();
    pd.num_vertices = nv;
    pd.nodes.resize(nv + ne);
    for (std::size_t v = 0; v < nv; ++v) pd.nodes[v] = m.point(v);
    for (std::size_t e = 0; e < ne; ++e) pd.nodes[nv + e] = 0.5 * (m.point(topo.edges[e][0]) + m.point(topo.edges[e][1]));

    std::vector<std::uint8_t> live(nv + ne, 0);
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      if (mm.state(k, c) == CellState::kCovered) continue;
      for (int i = 0; i < 3; ++i) live[m.cells[c][i]] = 1;
      for (int i = 0; i < 3; ++i) live[nv + topo.cell_edges[c][i]] = 1;
    }
    pd.ux.assign(nv + ne, kInactive);
    pd.uy.assign(nv + ne, kInactive);
    pd.p.assign(nv, kInactive);
    for (std::size_t n = 0; n < nv + ne; ++n) {
      if (live[n]) pd.ux[n] = static_cast<std::ptrdiff_t>(size_++), ++n_p2_;
    }
    for (std::size_t n = 0; n < nv + ne; ++n) {
      if (live[n]) pd.uy[n] = static_cast<std::ptrdiff_t>(size_++);
    }
    pressure_mask_.resize(size_, 0);
    for (std::size_t v = 0; v < nv; ++v) {
      if (live[v]) pd.p[v] = static_cast<std::ptrdiff_t>(size_++), ++n_p1_;
    }
    pressure_mask_.resize(size_, 1);
  }
}

std::array<std::size_t, 6> TaylorHoodSpace::cell_nodes(std::size_t part, std::size_t cell) const {
  const auto& c = mm_->part(part).cells[cell];
  const auto& e = mm_->topology(part).cell_edges[cell];
  const std::size_t nv = parts_[part].num_vertices;
  return {c[0], c[1], c[2], nv + e[0], nv + e[1], nv + e[2]};
}

TaylorHoodSpace::CellDofs TaylorHoodSpace::cell_dofs(std::size_t part, std::size_t cell) const {
  const auto nodes = cell_nodes(part, cell);
  const PartDofs& pd = parts_[part];
  CellDofs d{};
  for (std::size_t i = 0; i < 6; ++i) {
    d[ux(i)] = pd.ux[nodes[i]];
    d[uy(i)] = pd.uy[nodes[i]];
  }
  for (std::size_t i = 0; i < 3; ++i) d[pp(i)] = pd.p[nodes[i]];
  return d;
}

void StokesParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("stokes: beta must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("stokes: gamma must be non-negative");
}

LinearSystem assemble_system(const MultiMesh& mm, const TaylorHoodSpace& space, const StokesParams& params) {
  params.validate();
  if (space.num_parts() != mm.num_parts()) throw ValidationError("stokes: space was built for another multimesh");
  const std::size_t n = space.size();
  const std::size_t rows = n + (params.mean_zero_pressure ? 1 : 0);
  Triplets trip;
  RealVector rhs(rows, 0.0L);
  std::vector<Real> pressure_mass(params.mean_zero_pressure ? n : 0, 0.0);

  auto add_mass = [&](const TaylorHoodSpace::CellDofs& d, const Triangle2& tri, const geometry::QuadRule& rule) {
    if (!params.mean_zero_pressure) return;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Shape s = shape_at(tri, rule.points[q]);
      for (std::size_t i = 0; i < 3; ++i) {
        if (d[pp(i)] >= 0) pressure_mass[d[pp(i)]] += rule.weights[q] * s.psi[i];
      }
    }
  };

  // Volume terms on every part, and the least-squares term on cut cells.
  for (std::size_t k = 0; k < mm.num_parts(); ++k) {
    const mesh::Mesh& m = mm.part(k);
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      const CellState st = mm.state(k, c);
      if (st == CellState::kCovered) continue;
      const Triangle2 tri = m.triangle(c);
      const auto& rule = k == 0 ? mm.visible_quadrature(c) : mm.cell_quadrature(k, c);
      if (rule.empty()) continue;
      const auto dofs = space.cell_dofs(k, c);
      Local L({dofs.begin(), dofs.end()});
      add_volume(L, tri, rule, params);
      if (k == 0 && st == CellState::kCut) add_least_squares(L, tri, rule, cell_size(tri), params);
      L.scatter(trip, rhs);
      add_mass(dofs, tri, rule);
    }
  }

  const mesh::Mesh& bg = mm.part(0);

  // Nitsche coupling on the interface.
  for (const auto& seg : mm.interface()) {
    const Triangle2 tri[2] = {mm.part(seg.part).triangle(seg.overlap_cell), bg.triangle(seg.background_cell)};
    Local L(concat(space.cell_dofs(seg.part, seg.overlap_cell), space.cell_dofs(0, seg.background_cell)));
    const Real h = 0.5L * (static_cast<Real>(cell_size(tri[0])) + cell_size(tri[1]));
    const Real pen = params.beta / h;
    const V2 nrm = lift(seg.normal);
    for (std::size_t q = 0; q < seg.quadrature.size(); ++q) {
      const Vec2 x = seg.quadrature.points[q];
      const Real w = seg.quadrature.weights[q];
      TwoSided t{{shape_at(tri[0], x), shape_at(tri[1], x)}};
      for (int si = 0; si < 2; ++si) {
        for (int sj = 0; sj < 2; ++sj) {
          const Real js_i = TwoSided::sign[si], js_j = TwoSided::sign[sj];
          const std::size_t oi = TwoSided::offset[si], oj = TwoSided::offset[sj];
          const Shape& a = t.s[si];
          const Shape& b = t.s[sj];
          for (std::size_t i = 0; i < 6; ++i) {
            const Real dn_i = dotr(a.dphi[i], nrm);
            for (std::size_t j = 0; j < 6; ++j) {
              const Real dn_j = dotr(b.dphi[j], nrm);
              const Real v = w * (-0.5 * dn_j * js_i * a.phi[i] - 0.5 * js_j * b.phi[j] * dn_i +
                                    pen * js_i * js_j * a.phi[i] * b.phi[j]);
              L.at(oi + ux(i), oj + ux(j)) += v;
              L.at(oi + uy(i), oj + uy(j)) += v;
            }
            for (std::size_t j = 0; j < 3; ++j) {
              // ([n.v], <p>)
              const Real base = w * js_i * a.phi[i] * 0.5 * b.psi[j];
              L.at(oi + ux(i), oj + pp(j)) += base * nrm.x;
              L.at(oi + uy(i), oj + pp(j)) += base * nrm.y;
            }
          }
          for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
              // ([n.u], <q>)
              const Real base = w * js_j * b.phi[j] * 0.5 * a.psi[i];
              L.at(oi + pp(i), oj + ux(j)) += base * nrm.x;
              L.at(oi + pp(i), oj + uy(j)) += base * nrm.y;
            }
          }
        }
      }
    }
    L.scatter(trip, rhs);
  }

  // Gradient-jump and pressure-jump stabilization on overlapped cut-cell parts.
  for (const auto& piece : mm.overlap_pieces()) {
    const Triangle2 tri[2] = {mm.part(piece.part).triangle(piece.cell), bg.triangle(piece.background_cell)};
    Local L(concat(space.cell_dofs(piece.part, piece.cell), space.cell_dofs(0, piece.background_cell)));
    for (std::size_t q = 0; q < piece.quadrature.size(); ++q) {
      const Vec2 x = piece.quadrature.points[q];
      const Real w = piece.quadrature.weights[q];
      TwoSided t{{shape_at(tri[0], x), shape_at(tri[1], x)}};
      for (int si = 0; si < 2; ++si) {
        for (int sj = 0; sj < 2; ++sj) {
          const Real js = TwoSided::sign[si] * TwoSided::sign[sj];
          const std::size_t oi = TwoSided::offset[si], oj = TwoSided::offset[sj];
          const Shape& a = t.s[si];
          const Shape& b = t.s[sj];
          for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
              const Real v = w * js * dotr(a.dphi[i], b.dphi[j]);
              L.at(oi + ux(i), oj + ux(j)) += v;
              L.at(oi + uy(i), oj + uy(j)) += v;
            }
          }
          if (params.gamma > 0.0) {
            for (std::size_t i = 0; i < 3; ++i) {
              for (std::size_t j = 0; j < 3; ++j) L.at(oi + pp(i), oj + pp(j)) += params.gamma * w * js * a.psi[i] * b.psi[j];
            }
          }
        }
      }
    }
    L.scatter(trip, rhs);
  }

  if (params.mean_zero_pressure) {
    const auto last = static_cast<std::ptrdiff_t>(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (pressure_mass[i] == 0.0) continue;
      trip.emplace_back(last, static_cast<std::ptrdiff_t>(i), pressure_mass[i]);
      trip.emplace_back(static_cast<std::ptrdiff_t>(i), last, pressure_mass[i]);
    }
  }

  Eigen::SparseMatrix<Real, Eigen::RowMajor> full(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  full.setFromTriplets(trip.begin(), trip.end());
  full.prune(0.0L, 0.0L);
  LinearSystem sys;
  sys.num_dofs = n;
  split_matrix(full, sys.A, sys.A_low);
  sys.b.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) sys.b[static_cast<Eigen::Index>(i)] = static_cast<double>(rhs[i]);
  sys.constrained.assign(rows, 0);
  return sys;
}

namespace {

struct NodeValue {
  std::ptrdiff_t dof;
  Vec2 point;
  int component;
};

// Dofs selected by one condition, with the coordinates used to evaluate it.
std::vector<NodeValue> bc_nodes(const MultiMesh& mm, const TaylorHoodSpace& space, const DirichletBC& bc) {
  if (bc.part >= mm.num_parts()) throw ValidationError("dirichlet: part " + std::to_string(bc.part) + " does not exist");
  const mesh::Mesh& m = mm.part(bc.part);
  const mesh::Topology& topo = mm.topology(bc.part);
  const std::size_t nv = m.num_vertices();
  std::set<std::size_t> nodes;  // P2 node ids
  auto add_edge = [&](std::size_t e) {
    if (e >= topo.num_edges()) throw ValidationError("dirichlet: edge " + std::to_string(e) + " out of range");
    nodes.insert(topo.edges[e][0]);
    nodes.insert(topo.edges[e][1]);
    nodes.insert(nv + e);
  };
  if (bc.marker) {
    bool found = false;
    for (const auto& f : m.facet_markers) {
      if (f.marker != *bc.marker) continue;
      found = true;
      add_edge(topo.cell_edges[f.cell][f.local_facet]);
    }
    if (!found)
      throw ValidationError("dirichlet: marker " + std::to_string(*bc.marker) + " not present on part " +
                            std::to_string(bc.part));
  }
  for (std::size_t e : bc.edges) add_edge(e);
  for (std::size_t v : bc.vertices) {
    if (v >= nv) throw ValidationError("dirichlet: vertex " + std::to_string(v) + " out of range");
    nodes.insert(v);
  }
  std::vector<NodeValue> out;
  for (std::size_t node : nodes) {
    const Vec2 x = space.node_point(bc.part, node);
    if (bc.field == Field::kVelocity) {
      for (int c = 0; c < 2; ++c) {
        const auto d = space.velocity_dof(bc.part, node, c);
        if (d >= 0) out.push_back({d, x, c});
      }
    } else if (node < nv) {
      const auto d = space.pressure_dof(bc.part, node);
      if (d >= 0) out.push_back({d, x, 0});
    }
  }
  return out;
}

}  // namespace

LinearSystem apply_dirichlet(LinearSystem sys, const MultiMesh& mm, const TaylorHoodSpace& space,
                             std::span<const DirichletBC> bcs) {
  std::vector<double> value(static_cast<std::size_t>(sys.A.rows()), 0.0);
  std::vector<std::uint8_t> hit(value.size(), 0);
  for (const DirichletBC& bc : bcs) {
    for (const NodeValue& nv : bc_nodes(mm, space, bc)) {
      hit[nv.dof] = 1;
      value[nv.dof] = bc.value ? bc.value(nv.point, nv.component) : 0.0;
    }
  }
  for (auto* M : {&sys.A, &sys.A_low}) {
    for (int r = 0; r < M->outerSize(); ++r) {
      if (!hit[r]) continue;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(*M, r); it; ++it) it.valueRef() = 0.0;
    }
  }
  sys.A_low.prune(0.0, 0.0);
  sys.A_low.makeCompressed();
  Triplets diag;
  for (std::size_t r = 0; r < hit.size(); ++r) {
    if (!hit[r]) continue;
    sys.constrained[r] = 1;
    sys.b[static_cast<Eigen::Index>(r)] = value[r];
    diag.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r), 1.0);
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> I(sys.A.rows(), sys.A.cols());
  I.setFromTriplets(diag.begin(), diag.end());
  sys.A += I;
  sys.A.prune(0.0, 0.0);
  sys.A.makeCompressed();
  return sys;
}

std::vector<DirichletBC> isolated_pressure_bcs(const MultiMesh& mm, const TaylorHoodSpace& space,
                                               const LinearSystem& constrained) {
  std::vector<DirichletBC> out;
  for (std::size_t k = 0; k < mm.num_parts(); ++k) {
    const mesh::Mesh& m = mm.part(k);
    std::vector<std::uint8_t> dead(m.num_cells(), 0);
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      if (mm.state(k, c) == CellState::kCovered) {
        dead[c] = 1;
        continue;
      }
      if (mm.containment(k, c) == Containment::kOutside) {
        dead[c] = 1;
        continue;
      }
      const auto d = space.cell_dofs(k, c);
      bool all = true;
      for (std::size_t i = 0; i < 12 && all; ++i) all = d[i] < 0 || constrained.constrained[d[i]];
      dead[c] = all ? 1 : 0;
    }
    DirichletBC bc;
    bc.field = Field::kPressure;
    bc.part = k;
    const auto& vc = mm.topology(k).vertex_cells;
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
      const auto d = space.pressure_dof(k, v);
      if (d < 0 || constrained.constrained[d]) continue;
      if (std::all_of(vc[v].begin(), vc[v].end(), [&](std::size_t c) { return dead[c] != 0; })) bc.vertices.push_back(v);
    }
    if (!bc.vertices.empty()) out.push_back(std::move(bc));
  }
  return out;
}

std::vector<std::size_t> mark_house_noslip_facets(const MultiMesh& mm, std::size_t part, int house_boundary_marker,
                                                  std::optional<int> house_cell_marker) {
  if (part == 0 || part >= mm.num_parts()) throw ValidationError("noslip marking: part must be an overlapping mesh");
  const mesh::Mesh& m = mm.part(part);
  const mesh::Topology& topo = mm.topology(part);
  std::vector<std::uint8_t> mark(topo.num_edges(), 0);
  for (std::size_t e = 0; e < topo.num_edges(); ++e) mark[e] = topo.on_boundary(e) ? 1 : 0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    if (mm.containment(part, c) == Containment::kInside) {
      for (std::size_t e : topo.cell_edges[c]) mark[e] = 0;
    }
  }
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    if (mm.containment(part, c) == Containment::kBoundary) {
      for (std::size_t e : topo.cell_edges[c]) mark[e] = 1;
    }
  }
  for (const auto& f : m.facet_markers) {
    if (f.marker == house_boundary_marker) mark[topo.cell_edges[f.cell][f.local_facet]] = 1;
  }
  if (house_cell_marker) {
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      if (m.cell_marker(c) == *house_cell_marker) {
        for (std::size_t e : topo.cell_edges[c]) mark[e] = 1;
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < mark.size(); ++e) {
    if (mark[e]) out.push_back(e);
  }
  return out;
}

PointValue evaluate_in_cell(const MultiMesh& mm, const TaylorHoodSpace& space, const Eigen::VectorXd& coeffs,
                            std::size_t part, std::size_t cell, Vec2 x) {
  const Shape s = shape_at(mm.part(part).triangle(cell), x);
  const auto d = space.cell_dofs(part, cell);
  auto c = [&](std::ptrdiff_t i) { return i < 0 ? 0.0 : coeffs[i]; };
  Real u = 0, v = 0, p = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    u += s.phi[i] * c(d[ux(i)]);
    v += s.phi[i] * c(d[uy(i)]);
  }
  for (std::size_t i = 0; i < 3; ++i) p += s.psi[i] * c(d[pp(i)]);
  PointValue out;
  out.location = {part, cell};
  out.u = {static_cast<double>(u), static_cast<double>(v)};
  out.p = static_cast<double>(p);
  return out;
}

PointValue evaluate_solution(const MultiMesh& mm, const TaylorHoodSpace& space, const Eigen::VectorXd& coeffs, Vec2 x) {
  const auto loc = mm.locate_point(x);
  if (!loc) throw Error("evaluate: point (" + std::to_string(x.x) + ", " + std::to_string(x.y) + ") is outside the domain");
  return evaluate_in_cell(mm, space, coeffs, loc->part, loc->cell, x);
}

L2Errors l2_errors(const MultiMesh& mm, const TaylorHoodSpace& space, const Eigen::VectorXd& coeffs,
                   const std::function<Vec2(Vec2)>& u_exact, const std::function<double(Vec2)>& p_exact, int degree) {
  const auto ref = geometry::triangle_rule(degree);
  double eu = 0.0, ep = 0.0;
  auto accumulate = [&](std::size_t part, std::size_t cell, const Triangle2& piece) {
    const auto rule = geometry::map_quadrature(ref, piece);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = rule.points[q];
      const PointValue v = evaluate_in_cell(mm, space, coeffs, part, cell, x);
      const Vec2 du = v.u - u_exact(x);
      const double dp = v.p - p_exact(x);
      eu += rule.weights[q] * dot(du, du);
      ep += rule.weights[q] * dp * dp;
    }
  };
  for (std::size_t k = 0; k < mm.num_parts(); ++k) {
    const mesh::Mesh& m = mm.part(k);
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      const CellState st = mm.state(k, c);
      if (st == CellState::kCovered) continue;
      if (st == CellState::kActive) {
        accumulate(k, c, m.triangle(c));
        continue;
      }
      for (const auto& poly : mm.visible_polygons(c)) {
        for (const Triangle2& t : geometry::triangulate(poly)) {
          const double diag = t.bounds().diagonal();
          if (t.area() > 1e-12 * diag * diag) accumulate(k, c, t);
        }
      }
    }
  }
  return {std::sqrt(eu), std::sqrt(ep)};
}

}  // namespace settle::fem
