// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "report.hpp"
#include "settle/scenario.hpp"

namespace settle::scenario {

using multimesh::Containment;
using multimesh::MultiMesh;
using report::Json;

namespace {

// Parameter interval of segment a->b inside a counter-clockwise convex polygon.
bool clip_segment_convex(Vec2 a, Vec2 b, const std::array<Vec2, 4>& poly, double& t0, double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  const Vec2 d = b - a;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
    const Vec2 e = q - p;
    // inside: cross(e, x - p) >= 0
    const double num = cross(e, a - p), den = cross(e, d);
    if (den == 0.0) {
      if (num < 0.0) return false;
      continue;
    }
    const double t = -num / den;
    if (den > 0.0) t0 = std::max(t0, t);
    else t1 = std::min(t1, t);
    if (t0 >= t1) return false;
  }
  return true;
}

void subdivide(std::vector<double>& xs, double a, double b, std::size_t n) {
  for (std::size_t k = 1; k <= n; ++k) xs.push_back(k == n ? b : a + (b - a) * static_cast<double>(k) / n);
}

std::size_t pieces(double len, double h, std::size_t at_least) {
  return std::max<std::size_t>(at_least, static_cast<std::size_t>(std::ceil(len / h - 1e-9)));
}

struct Crossing {
  const House* house;
  double sa, sb;
};

const char* stop_name(Streamline::Stop s) {
  switch (s) {
    case Streamline::Stop::kExit: return "exit";
    case Streamline::Stop::kMaxLength: return "max_length";
    case Streamline::Stop::kStagnation: return "stagnation";
    case Streamline::Stop::kMaxSteps: return "max_steps";
  }
  return "exit";
}

}  // namespace

std::vector<Vec2> HouseProfile::outline() const {
  std::vector<Vec2> out{{s_begin, base}, {s_end, base}};
  for (auto it = roof.rbegin(); it != roof.rend(); ++it) out.push_back(*it);
  return out;
}

FlowDomain build_flow_domain(const Scenario& s, double resolution) {
  return build_flow_domain(s, TerrainSurface::build(s.terrain, s.base_dir), resolution);
}

FlowDomain build_flow_domain(const Scenario& s, const TerrainSurface& terrain, double h) {
  if (!s.flow) throw ValidationError("scenario has no flow transect");
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("resolution must be positive");
  const FlowSpec& f = *s.flow;
  const Vec2 a = f.transect[0], b = f.transect[1];
  const double L = norm(b - a), H = f.height;
  const Vec2 dir = (b - a) / L;
  auto plan = [&](double sq) { return a + sq * dir; };

  FlowDomain dom;
  dom.length = L;
  dom.height = H;
  dom.u_max = f.u_max;

  const std::size_t nx = pieces(L, h, 1), ny = pieces(H, h, 1);
  for (std::size_t i = 0; i <= nx; ++i) {
    const double sq = i == nx ? L : L * static_cast<double>(i) / nx;
    const auto z = terrain.elevation(plan(sq));
    if (!z) throw ValidationError("flow transect leaves the terrain");
    dom.bottom.x.push_back(sq);
    dom.bottom.height.push_back(std::max(*z, 0.0));
  }
  if (!(dom.bottom.max() < H)) throw ValidationError("terrain rises above the flow channel");
  dom.meshes.push_back(mesh::generate_rect_mesh({{0.0, 0.0}, {L, H}}, nx, ny, dom.bottom));

  std::vector<Crossing> crossings;
  for (const House& house : s.houses) {
    double t0 = 0.0, t1 = 0.0;
    if (!clip_segment_convex(a, b, house.footprint(), t0, t1)) continue;
    if (!((t1 - t0) * L > 1e-9 * L)) continue;
    crossings.push_back({&house, t0 * L, t1 * L});
  }
  std::sort(crossings.begin(), crossings.end(), [](const Crossing& x, const Crossing& y) { return x.sa < y.sa; });

  for (std::size_t k = 0; k < crossings.size(); ++k) {
    const House& house = *crossings[k].house;
    const double sa = crossings[k].sa, sb = crossings[k].sb, chord = sb - sa;
    if (!(sa > 0.0) || !(sb < L)) throw ValidationError("house '" + house.id + "' crosses a transect end");
    const HouseLevels lv = house_levels(house, terrain);
    if (!(lv.ridge < H)) throw ValidationError("house '" + house.id + "' is taller than the flow channel");

    auto depth_coord = [&](double sq) { return house.to_local(plan(sq)).y; };
    auto roof = [&](double sq) {
      const double t = std::clamp(1.0 - 2.0 * std::abs(depth_coord(std::clamp(sq, sa, sb))) / house.depth, 0.0, 1.0);
      return lv.eave + (lv.ridge - lv.eave) * t;
    };

    HouseProfile prof;
    prof.id = house.id;
    prof.s_begin = sa;
    prof.s_end = sb;
    prof.base = lv.base;
    std::vector<double> breaks{sa};
    const double va = depth_coord(sa), vb = depth_coord(sb);
    if (va * vb < 0.0) {
      const double sm = sa + chord * va / (va - vb);
      if (std::min(sm - sa, sb - sm) > 1e-3 * chord) breaks.push_back(sm);
    }
    breaks.push_back(sb);
    for (double sq : breaks) prof.roof.push_back({sq, roof(sq)});

    const double gap_left = k == 0 ? sa : sa - crossings[k - 1].sb;
    const double gap_right = k + 1 == crossings.size() ? L - sb : crossings[k + 1].sa - sb;
    const double want = 2.0 * h + 0.25 * chord;
    const double ml = std::min(want, 0.45 * gap_left), mr = std::min(want, 0.45 * gap_right);

    std::vector<double> xs{sa - ml};
    subdivide(xs, sa - ml, sa, pieces(ml, h, 1));
    const std::size_t ia = xs.size() - 1;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      subdivide(xs, breaks[p], breaks[p + 1], pieces(breaks[p + 1] - breaks[p], h, breaks.size() == 2 ? 2 : 1));
    }
    const std::size_t ib = xs.size() - 1;
    subdivide(xs, sb, sb + mr, pieces(mr, h, 1));

    const double z_top = std::min(lv.ridge + std::max(2.0 * h, 0.25 * (lv.ridge - lv.base)), 0.5 * (lv.ridge + H));
    double r_min = lv.ridge, r_max = lv.eave;
    for (const Vec2& p : prof.roof) {
      r_min = std::min(r_min, p.y);
      r_max = std::max(r_max, p.y);
    }
    const std::size_t j1 = pieces(r_min - lv.base, h, 2), j2 = pieces(z_top - r_max, h, 1);
    std::vector<std::vector<double>> cols(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = roof(xs[i]);
      for (std::size_t j = 0; j <= j1; ++j) cols[i].push_back(lv.base + (r - lv.base) * static_cast<double>(j) / j1);
      for (std::size_t j = 1; j <= j2; ++j) cols[i].push_back(r + (z_top - r) * static_cast<double>(j) / j2);
    }
    mesh::Mesh m = mesh::generate_column_mesh(xs, cols);
    const std::size_t qx = xs.size() - 1;
    m.cell_markers.assign(m.num_cells(), 0);
    auto first = [&](std::size_t i, std::size_t j) { return 4 * (j * qx + i); };
    for (std::size_t j = 0; j < j1; ++j) {
      for (std::size_t i = ia; i < ib; ++i) {
        for (std::size_t c = 0; c < 4; ++c) m.cell_markers[first(i, j) + c] = kHouseSolidMarker;
      }
      m.facet_markers.push_back({first(ia, j) + 3, 2, kHouseWallMarker});
      m.facet_markers.push_back({first(ib - 1, j) + 1, 2, kHouseWallMarker});
    }
    for (std::size_t i = ia; i < ib; ++i) m.facet_markers.push_back({first(i, j1 - 1) + 2, 2, kHouseWallMarker});
    dom.meshes.push_back(std::move(m));
    dom.houses.push_back(std::move(prof));
  }
  return dom;
}

bool in_fluid(const MultiMesh& mm, Vec2 x, std::optional<int> solid_marker) {
  const auto loc = mm.locate_point(x);
  if (!loc) return false;
  if (loc->part == 0) return true;
  if (solid_marker && mm.part(loc->part).cell_marker(loc->cell) == *solid_marker) return false;
  switch (mm.containment(loc->part, loc->cell)) {
    case Containment::kInside: return true;
    case Containment::kOutside: return false;
    case Containment::kBoundary: break;
  }
  const mesh::Mesh& bg = mm.part(0);
  for (std::size_t c : mm.tree(0).query(x)) {
    if (geometry::contains(bg.triangle(c), x)) return true;
  }
  return false;
}

StreamlineSet trace_streamlines(const MultiMesh& mm, const fem::TaylorHoodSpace& space, const Eigen::VectorXd& coeffs,
                                const std::vector<Vec2>& seeds, const StreamlineOptions& opt) {
  if (!(opt.step > 0.0) || !(opt.max_len > 0.0)) throw ValidationError("streamlines: step and max_len must be positive");
  auto velocity = [&](Vec2 x) -> std::optional<Vec2> {
    if (!in_fluid(mm, x, opt.solid_marker)) return std::nullopt;
    return fem::evaluate_solution(mm, space, coeffs, x).u;
  };
  StreamlineSet out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    Vec2 x = seeds[i];
    auto u0 = velocity(x);
    if (!u0) {
      out.skipped.push_back(i);
      continue;
    }
    Streamline line;
    line.points.push_back(x);
    double length = 0.0;
    line.stop = Streamline::Stop::kMaxSteps;
    for (std::size_t n = 0; n < opt.max_steps; ++n) {
      const auto k1 = velocity(x);
      if (!k1) {
        line.stop = Streamline::Stop::kExit;
        break;
      }
      if (norm(*k1) < 1e-10) {
        line.stop = Streamline::Stop::kStagnation;
        break;
      }
      const double dt = opt.step;
      const auto k2 = velocity(x + 0.5 * dt * *k1);
      const auto k3 = k2 ? velocity(x + 0.5 * dt * *k2) : std::nullopt;
      const auto k4 = k3 ? velocity(x + dt * *k3) : std::nullopt;
      if (!k4) {
        line.stop = Streamline::Stop::kExit;
        break;
      }
      const Vec2 next = x + (dt / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
      if (!in_fluid(mm, next, opt.solid_marker)) {
        line.stop = Streamline::Stop::kExit;
        break;
      }
      length += norm(next - x);
      x = next;
      line.points.push_back(x);
      if (length >= opt.max_len) {
        line.stop = Streamline::Stop::kMaxLength;
        break;
      }
    }
    out.lines.push_back(std::move(line));
  }
  return out;
}

FlowResult run_flow(const Scenario& s, const FlowOptions& opt) {
  opt.params.validate();
  const TerrainSurface terrain = TerrainSurface::build(s.terrain, s.base_dir);
  FlowResult r;
  r.resolution = opt.resolution;
  r.domain = build_flow_domain(s, terrain, opt.resolution);
  r.mm = std::make_unique<MultiMesh>(MultiMesh::build(r.domain.meshes));
  const MultiMesh& mm = *r.mm;
  r.space = std::make_unique<fem::TaylorHoodSpace>(mm);
  const fem::TaylorHoodSpace& space = *r.space;

  const double H = r.domain.height, b0 = r.domain.bottom.height.front(), U = r.domain.u_max;
  auto inflow = [=](Vec2 x, int comp) {
    if (comp != 0) return 0.0;
    const double z = std::clamp(x.y, b0, H);
    return 4.0 * U * (z - b0) * (H - z) / ((H - b0) * (H - b0));
  };
  std::vector<fem::DirichletBC> bcs;
  {
    fem::DirichletBC in;
    in.marker = mesh::kLeft;
    in.value = inflow;
    bcs.push_back(in);
    for (int m : {mesh::kBottom, mesh::kTop}) {
      fem::DirichletBC wall;
      wall.marker = m;
      bcs.push_back(wall);
    }
    fem::DirichletBC out;
    out.field = fem::Field::kPressure;
    out.marker = mesh::kRight;
    bcs.push_back(out);
  }
  for (std::size_t k = 1; k < mm.num_parts(); ++k) {
    fem::DirichletBC wall;
    wall.part = k;
    wall.edges = fem::mark_house_noslip_facets(mm, k, kHouseWallMarker, kHouseSolidMarker);
    r.stats.noslip_facets += wall.edges.size();
    bcs.push_back(std::move(wall));
  }
  fem::LinearSystem sys = fem::apply_dirichlet(fem::assemble_system(mm, space, opt.params), mm, space, bcs);
  const auto pins = fem::isolated_pressure_bcs(mm, space, sys);
  for (const auto& p : pins) r.stats.pinned_pressures += p.vertices.size();
  if (!pins.empty()) sys = fem::apply_dirichlet(std::move(sys), mm, space, pins);

  auto solved = linsolve::solve_sparse(sys.A, sys.b, opt.solve, &sys.A_low);
  r.coeffs = std::move(solved.x);
  r.solve = solved.report;

  r.stats.dofs = space.size();
  r.stats.active = mm.count(multimesh::CellState::kActive);
  r.stats.cut = mm.count(multimesh::CellState::kCut);
  r.stats.covered = mm.count(multimesh::CellState::kCovered);
  r.stats.interface_segments = mm.interface().size();

  std::vector<Vec2> seeds = opt.seeds;
  if (seeds.empty()) {
    const double s0 = std::min(0.5 * opt.resolution, 0.01 * r.domain.length);
    const double b = r.domain.bottom.at(s0);
    const std::size_t n = std::max<std::size_t>(1, opt.default_seed_count);
    for (std::size_t k = 0; k < n; ++k) seeds.push_back({s0, b + (H - b) * (static_cast<double>(k) + 0.5) / n});
  }
  StreamlineOptions so;
  so.step = opt.step > 0.0 ? opt.step : 0.25 * opt.resolution / std::max(U, 1e-12);
  so.max_len = opt.max_len > 0.0 ? opt.max_len : 3.0 * r.domain.length;
  r.streamlines = trace_streamlines(mm, space, r.coeffs, seeds, so);
  return r;
}

std::string format_flow_report(const FlowResult& r) {
  Json houses = Json::array();
  for (const auto& h : r.domain.houses) {
    houses.push_back({{"id", h.id}, {"s_begin", h.s_begin}, {"s_end", h.s_end}, {"base", h.base}});
  }
  double umax = 0.0;
  const auto& space = *r.space;
  for (std::size_t k = 0; k < space.num_parts(); ++k) {
    for (std::size_t n = 0; n < space.num_nodes(k); ++n) {
      const auto dx = space.velocity_dof(k, n, 0), dy = space.velocity_dof(k, n, 1);
      if (dx >= 0 && dy >= 0) umax = std::max(umax, std::hypot(r.coeffs[dx], r.coeffs[dy]));
    }
  }
  Json o = {{"resolution", r.resolution},
            {"length", r.domain.length},
            {"height", r.domain.height},
            {"houses", houses},
            {"dofs", r.stats.dofs},
            {"cells", {{"active", r.stats.active}, {"cut", r.stats.cut}, {"covered", r.stats.covered}}},
            {"interface_segments", r.stats.interface_segments},
            {"noslip_facets", r.stats.noslip_facets},
            {"pinned_pressures", r.stats.pinned_pressures},
            {"residual", r.solve.residual_norm},
            {"factor_nnz", r.solve.factor_nnz},
            {"max_velocity", umax},
            {"streamlines", r.streamlines.lines.size()},
            {"skipped_seeds", r.streamlines.skipped}};
  return report::dump(o);
}

std::string format_streamlines(const StreamlineSet& set) {
  Json lines = Json::array();
  for (const auto& l : set.lines) {
    Json pts = Json::array();
    for (Vec2 p : l.points) pts.push_back({p.x, p.y});
    lines.push_back({{"points", pts}, {"stop", stop_name(l.stop)}});
  }
  return report::dump({{"lines", lines}, {"skipped", set.skipped}}, -1);
}

}  // namespace settle::scenario
