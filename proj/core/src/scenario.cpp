// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include "settle/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "report.hpp"

namespace settle::scenario {

using geometry::Box2;
using geometry::ConvexPolygon;
using report::Json;
using view::Category;

namespace {

// JSON access with parse errors naming the offending key.

const Json& member(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object", 0);
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing '" + key + "'", 0);
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number", 0);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite number", 0);
  return v;
}

double number_or(const Json& obj, const char* key, double fallback, const std::string& where) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, where + "." + key);
}

std::string string_of(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string", 0);
  return j.get<std::string>();
}

Vec2 vec2(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ParseError(where + ": expected [x, y]", 0);
  return {number(j[0], where), number(j[1], where)};
}

Vec3 vec3(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ParseError(where + ": expected [x, y, z]", 0);
  return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

Json to_json(Vec2 v) { return Json::array({v.x, v.y}); }
Json to_json(Vec3 v) { return Json::array({v.x, v.y, v.z}); }

House house_from_json(const Json& j, const std::string& where) {
  House h;
  h.id = string_of(member(j, "id", where), where + ".id");
  h.x = number(member(j, "x", where), where + ".x");
  h.y = number(member(j, "y", where), where + ".y");
  h.rotation = number_or(j, "rotation", 0.0, where);
  h.width = number(member(j, "width", where), where + ".width");
  h.depth = number(member(j, "depth", where), where + ".depth");
  h.wall_height = number(member(j, "wall_height", where), where + ".wall_height");
  h.ridge_height = number(member(j, "ridge_height", where), where + ".ridge_height");
  return h;
}

Json house_to_json(const House& h) {
  return {{"id", h.id},
          {"x", h.x},
          {"y", h.y},
          {"rotation", h.rotation},
          {"width", h.width},
          {"depth", h.depth},
          {"wall_height", h.wall_height},
          {"ridge_height", h.ridge_height}};
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
}

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

double plan_area(const std::array<Vec3, 3>& t) {
  return 0.5 * cross(Vec2{t[1].x - t[0].x, t[1].y - t[0].y}, Vec2{t[2].x - t[0].x, t[2].y - t[0].y});
}

}  // namespace

std::array<Vec2, 4> House::footprint() const {
  const double c = std::cos(rotation), s = std::sin(rotation);
  const Vec2 u{c, s}, v{-s, c}, center{x, y};
  const double a = 0.5 * width, b = 0.5 * depth;
  return {center - a * u - b * v, center + a * u - b * v, center + a * u + b * v, center - a * u + b * v};
}

Vec2 House::to_local(Vec2 p) const {
  const double c = std::cos(rotation), s = std::sin(rotation);
  const Vec2 d = p - Vec2{x, y};
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

raster::Camera CameraSpec::camera(int pixels_x, int pixels_y) const {
  raster::Camera c;
  c.position = position;
  c.direction = direction;
  c.up = up;
  c.d = d;
  c.image_width = image_width;
  c.image_height = image_height;
  c.pixels_x = pixels_x;
  c.pixels_y = pixels_y;
  return c.normalized();
}

const House* Scenario::find_house(std::string_view id) const {
  for (const House& h : houses) {
    if (h.id == id) return &h;
  }
  return nullptr;
}

const CameraSpec* Scenario::find_camera(std::string_view name) const {
  for (const CameraSpec& c : cameras) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

TerrainSurface TerrainSurface::build(const Terrain& terrain, const std::filesystem::path& base_dir) {
  TerrainSurface t;
  if (const auto* g = std::get_if<HeightGrid>(&terrain)) {
    const std::size_t ny = g->heights.size();
    const std::size_t nx = ny ? g->heights.front().size() : 0;
    if (nx < 2 || ny < 2) throw ValidationError("terrain grid needs at least 2 x 2 heights");
    if (!(g->dx > 0.0) || !(g->dy > 0.0) || !finite_all({g->dx, g->dy, g->origin.x, g->origin.y}))
      throw ValidationError("terrain grid spacing must be positive");
    for (const auto& row : g->heights) {
      if (row.size() != nx) throw ValidationError("terrain grid rows differ in length");
      for (double z : row) {
        if (!std::isfinite(z)) throw ValidationError("terrain grid has a non-finite height");
      }
    }
    auto vert = [&](std::size_t i, std::size_t j) {
      return Vec3{g->origin.x + g->dx * static_cast<double>(i), g->origin.y + g->dy * static_cast<double>(j),
                  g->heights[j][i]};
    };
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        const Vec3 a = vert(i, j), b = vert(i + 1, j), c = vert(i + 1, j + 1), d = vert(i, j + 1);
        t.tris_.push_back({{a, b, c}, Category::kGround});
        t.tris_.push_back({{a, c, d}, Category::kGround});
      }
    }
    for (auto& tri : t.tris_) {
      const double zc = (tri.v[0].z + tri.v[1].z + tri.v[2].z) / 3.0;
      tri.category = zc <= 0.0 ? Category::kWater : Category::kGround;
    }
  } else {
    const auto& s = std::get<StlTerrain>(terrain);
    std::filesystem::path p(s.path);
    if (p.is_relative()) p = base_dir / p;
    const mesh::StlImport imp = mesh::read_stl(p);
    const mesh::Mesh& m = imp.mesh;
    if (m.cells.empty()) throw ValidationError("terrain STL has no facets");
    std::set<std::size_t> water(s.water_tags.begin(), s.water_tags.end());
    if (!water.empty() && *water.rbegin() >= m.num_cells())
      throw ValidationError("terrain water tag " + std::to_string(*water.rbegin()) + " out of range");
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      const auto& cell = m.cells[c];
      t.tris_.push_back({{m.vertices[cell[0]], m.vertices[cell[1]], m.vertices[cell[2]]},
                         water.count(c) ? Category::kWater : Category::kGround});
    }
  }
  std::vector<Box2> boxes;
  boxes.reserve(t.tris_.size());
  for (const auto& tri : t.tris_) {
    const std::array<Vec2, 3> pts{Vec2{tri.v[0].x, tri.v[0].y}, Vec2{tri.v[1].x, tri.v[1].y},
                                  Vec2{tri.v[2].x, tri.v[2].y}};
    boxes.push_back(Box2::of(pts));
  }
  t.tree_ = geometry::AabbTree::build(boxes);
  t.extent_ = t.tree_.bounds();
  return t;
}

std::optional<std::size_t> TerrainSurface::locate(Vec2 p) const {
  if (!extent_.contains(p)) return std::nullopt;
  for (std::size_t c : tree_.query(p)) {
    const auto& v = tris_[c].v;
    if (std::abs(plan_area(v)) <= 0.0) continue;  // vertical facet
    const geometry::Triangle2 t{{Vec2{v[0].x, v[0].y}, Vec2{v[1].x, v[1].y}, Vec2{v[2].x, v[2].y}}};
    if (geometry::contains(t, p, 1e-9)) return c;
  }
  return std::nullopt;
}

std::optional<double> TerrainSurface::elevation(Vec2 p) const {
  const auto c = locate(p);
  if (!c) return std::nullopt;
  const auto& v = tris_[*c].v;
  const geometry::Triangle2 t{{Vec2{v[0].x, v[0].y}, Vec2{v[1].x, v[1].y}, Vec2{v[2].x, v[2].y}}};
  const auto w = geometry::barycentric(t, p);
  return w[0] * v[0].z + w[1] * v[1].z + w[2] * v[2].z;
}

std::optional<Category> TerrainSurface::category(Vec2 p) const {
  const auto c = locate(p);
  if (!c) return std::nullopt;
  return tris_[*c].category;
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  const Json root = parse_json(text);
  if (!root.is_object()) throw ParseError("scenario: expected an object", 0);
  Scenario s;
  s.base_dir = base_dir;

  const Json& terrain = member(root, "terrain", "scenario");
  const bool has_grid = terrain.contains("grid"), has_stl = terrain.contains("stl");
  if (has_grid == has_stl) throw ParseError("terrain: exactly one of 'grid' or 'stl' is required", 0);
  if (has_grid) {
    const Json& g = terrain["grid"];
    HeightGrid grid;
    grid.origin = vec2(member(g, "origin", "terrain.grid"), "terrain.grid.origin");
    grid.dx = number(member(g, "dx", "terrain.grid"), "terrain.grid.dx");
    grid.dy = number(member(g, "dy", "terrain.grid"), "terrain.grid.dy");
    const Json& h = member(g, "heights", "terrain.grid");
    if (!h.is_array()) throw ParseError("terrain.grid.heights: expected an array of rows", 0);
    for (const Json& row : h) {
      if (!row.is_array()) throw ParseError("terrain.grid.heights: expected an array of rows", 0);
      std::vector<double> r;
      for (const Json& z : row) r.push_back(number(z, "terrain.grid.heights"));
      grid.heights.push_back(std::move(r));
    }
    s.terrain = std::move(grid);
  } else {
    const Json& st = terrain["stl"];
    StlTerrain stl;
    stl.path = string_of(member(st, "path", "terrain.stl"), "terrain.stl.path");
    if (auto it = st.find("water_tags"); it != st.end()) {
      if (!it->is_array()) throw ParseError("terrain.stl.water_tags: expected an array", 0);
      for (const Json& t : *it) {
        if (!t.is_number_unsigned()) throw ParseError("terrain.stl.water_tags: expected facet indices", 0);
        stl.water_tags.push_back(t.get<std::size_t>());
      }
    }
    s.terrain = std::move(stl);
  }

  if (auto it = root.find("houses"); it != root.end()) {
    if (!it->is_array()) throw ParseError("houses: expected an array", 0);
    for (std::size_t i = 0; i < it->size(); ++i) s.houses.push_back(house_from_json((*it)[i], "houses[" + std::to_string(i) + "]"));
  }
  if (auto it = root.find("cameras"); it != root.end()) {
    if (!it->is_array()) throw ParseError("cameras: expected an array", 0);
    for (std::size_t i = 0; i < it->size(); ++i) {
      const Json& c = (*it)[i];
      const std::string where = "cameras[" + std::to_string(i) + "]";
      CameraSpec cam;
      cam.name = string_of(member(c, "name", where), where + ".name");
      cam.position = vec3(member(c, "position", where), where + ".position");
      cam.direction = vec3(member(c, "direction", where), where + ".direction");
      if (c.contains("up")) cam.up = vec3(c["up"], where + ".up");
      cam.d = number_or(c, "d", cam.d, where);
      cam.image_width = number_or(c, "image_width", cam.image_width, where);
      cam.image_height = number_or(c, "image_height", cam.image_height, where);
      s.cameras.push_back(std::move(cam));
    }
  }
  if (auto it = root.find("flow"); it != root.end() && !it->is_null()) {
    FlowSpec f;
    const Json& tr = member(*it, "transect", "flow");
    if (!tr.is_array() || tr.size() != 2) throw ParseError("flow.transect: expected [[x0, y0], [x1, y1]]", 0);
    f.transect = {vec2(tr[0], "flow.transect"), vec2(tr[1], "flow.transect")};
    f.height = number(member(*it, "height", "flow"), "flow.height");
    const Json& in = member(*it, "inflow", "flow");
    f.inflow_type = string_of(member(in, "type", "flow.inflow"), "flow.inflow.type");
    f.u_max = number(member(in, "u_max", "flow.inflow"), "flow.inflow.u_max");
    s.flow = f;
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path());
}

std::string format_scenario(const Scenario& s) {
  Json root = Json::object();
  if (const auto* g = std::get_if<HeightGrid>(&s.terrain)) {
    root["terrain"] = {{"grid", {{"origin", to_json(g->origin)}, {"dx", g->dx}, {"dy", g->dy}, {"heights", g->heights}}}};
  } else {
    const auto& st = std::get<StlTerrain>(s.terrain);
    root["terrain"] = {{"stl", {{"path", st.path}, {"water_tags", st.water_tags}}}};
  }
  Json houses = Json::array();
  for (const House& h : s.houses) houses.push_back(house_to_json(h));
  root["houses"] = houses;
  Json cams = Json::array();
  for (const CameraSpec& c : s.cameras) {
    cams.push_back({{"name", c.name},
                    {"position", to_json(c.position)},
                    {"direction", to_json(c.direction)},
                    {"up", to_json(c.up)},
                    {"d", c.d},
                    {"image_width", c.image_width},
                    {"image_height", c.image_height}});
  }
  root["cameras"] = cams;
  if (s.flow) {
    root["flow"] = {{"transect", {to_json(s.flow->transect[0]), to_json(s.flow->transect[1])}},
                    {"height", s.flow->height},
                    {"inflow", {{"type", s.flow->inflow_type}, {"u_max", s.flow->u_max}}}};
  }
  return root.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  raster::write_file(path, format_scenario(s));
}

std::string format_house(const House& h) { return house_to_json(h).dump(2) + "\n"; }

House parse_house(std::string_view text) { return house_from_json(parse_json(text), "house"); }

void validate_scenario(const Scenario& s) { validate_scenario(s, TerrainSurface::build(s.terrain, s.base_dir)); }

void validate_scenario(const Scenario& s, const TerrainSurface& terrain) {
  std::set<std::string> ids;
  for (const House& h : s.houses) {
    if (h.id.empty()) throw ValidationError("house id must not be empty");
    if (!ids.insert(h.id).second) throw ValidationError("duplicate house id '" + h.id + "'");
    if (!finite_all({h.x, h.y, h.rotation, h.width, h.depth, h.wall_height, h.ridge_height}))
      throw ValidationError("house '" + h.id + "': non-finite value");
    if (!(h.width > 0.0) || !(h.depth > 0.0) || !(h.wall_height > 0.0))
      throw ValidationError("house '" + h.id + "': width, depth and wall height must be positive");
    if (h.ridge_height < h.wall_height) throw ValidationError("house '" + h.id + "': ridge below the eaves");
    for (Vec2 c : h.footprint()) {
      if (!terrain.elevation(c)) throw ValidationError("house '" + h.id + "' is off the terrain");
    }
    if (terrain.category({h.x, h.y}) != Category::kGround)
      throw ValidationError("house '" + h.id + "' must stand on GROUND");
  }
  for (std::size_t i = 0; i < s.houses.size(); ++i) {
    const auto fi = s.houses[i].footprint();
    const ConvexPolygon pi = ConvexPolygon::from_points({fi.begin(), fi.end()});
    for (std::size_t j = i + 1; j < s.houses.size(); ++j) {
      const auto fj = s.houses[j].footprint();
      const ConvexPolygon pj = ConvexPolygon::from_points({fj.begin(), fj.end()});
      if (!pi.bounds().intersects(pj.bounds())) continue;
      const auto r = geometry::clip_polygon(pi, pj);
      double a = 0.0;
      for (const auto& p : r.inside) a += p.area();
      if (a > 1e-9 * std::min(pi.area(), pj.area())) throw HouseOverlapError(s.houses[i].id, s.houses[j].id);
    }
  }
  std::set<std::string> names;
  for (const CameraSpec& c : s.cameras) {
    if (c.name.empty()) throw ValidationError("camera name must not be empty");
    if (!names.insert(c.name).second) throw ValidationError("duplicate camera '" + c.name + "'");
    try {
      (void)c.camera(1, 1);
    } catch (const ValidationError& e) {
      throw ValidationError("camera '" + c.name + "': " + e.what());
    }
  }
  if (s.flow) {
    const FlowSpec& f = *s.flow;
    for (Vec2 p : f.transect) {
      if (!terrain.extent().contains(p)) throw ValidationError("flow transect endpoint outside the terrain");
    }
    if (!(norm(f.transect[1] - f.transect[0]) > 0.0)) throw ValidationError("flow transect has zero length");
    if (!(f.height > 0.0)) throw ValidationError("flow channel height must be positive");
    if (f.inflow_type != "parabolic") throw ValidationError("unsupported inflow type '" + f.inflow_type + "'");
    if (!(f.u_max >= 0.0)) throw ValidationError("inflow u_max must be non-negative");
  }
}

HouseLevels house_levels(const House& h, const TerrainSurface& terrain) {
  HouseLevels lv;
  lv.ground = terrain.elevation({h.x, h.y}).value_or(0.0);
  double low = lv.ground;
  for (Vec2 c : h.footprint()) low = std::min(low, terrain.elevation(c).value_or(lv.ground));
  lv.base = low - h.sink();
  lv.eave = lv.ground + h.wall_height;
  lv.ridge = lv.ground + h.ridge_height;
  return lv;
}

std::vector<std::array<Vec3, 3>> house_triangles(const House& h, const HouseLevels& lv) {
  const auto fp = h.footprint();
  auto at = [](Vec2 p, double z) { return Vec3{p.x, p.y, z}; };
  // Footprint corners: 0 (-w,-d), 1 (+w,-d), 2 (+w,+d), 3 (-w,+d).
  const Vec3 b0 = at(fp[0], lv.base), b1 = at(fp[1], lv.base), b2 = at(fp[2], lv.base), b3 = at(fp[3], lv.base);
  const Vec3 e0 = at(fp[0], lv.eave), e1 = at(fp[1], lv.eave), e2 = at(fp[2], lv.eave), e3 = at(fp[3], lv.eave);
  const Vec3 r0 = at(0.5 * (fp[0] + fp[3]), lv.ridge), r1 = at(0.5 * (fp[1] + fp[2]), lv.ridge);
  return {
      {b0, b2, b1}, {b0, b3, b2},  // floor
      {b0, b1, e1}, {b0, e1, e0},  // front wall
      {b1, b2, e2}, {b1, e2, e1},  // right wall
      {b2, b3, e3}, {b2, e3, e2},  // back wall
      {b3, b0, e0}, {b3, e0, e3},  // left wall
      {e0, r0, e3}, {e1, e2, r1},  // gables
      {e0, e1, r1}, {e0, r1, r0},  // front roof
      {e2, e3, r0}, {e2, r0, r1},  // back roof
  };
}

raster::Scene build_view_scene(const Scenario& s) {
  return build_view_scene(s, TerrainSurface::build(s.terrain, s.base_dir));
}

raster::Scene build_view_scene(const Scenario& s, const TerrainSurface& terrain) {
  raster::Scene scene;
  const bool grid = std::holds_alternative<HeightGrid>(s.terrain);
  for (const auto& t : terrain.triangles()) {
    auto v = t.v;
    if (grid) {
      for (Vec3& p : v) p.z = std::max(p.z, 0.0);
    }
    scene.add(v, t.category);
  }
  for (const House& h : s.houses) {
    for (const auto& t : house_triangles(h, house_levels(h, terrain))) scene.add(t, Category::kHouse);
  }
  return scene;
}

}  // namespace settle::scenario
