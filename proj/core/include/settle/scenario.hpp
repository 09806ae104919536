// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
//
// Layout data model shared by the flow and view pipelines: terrain, house
// placements, cameras and the flow transect, plus the builders deriving the
// 3D view scene and the 2D flow domain from one scenario.
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "settle/error.hpp"
#include "settle/geometry.hpp"
#include "settle/linsolve.hpp"
#include "settle/mesh.hpp"
#include "settle/multimesh.hpp"
#include "settle/raster.hpp"
#include "settle/stokes.hpp"
#include "settle/vec.hpp"

namespace settle::scenario {

/// Regular heightfield. heights[j][i] is the elevation at
/// (origin.x + i dx, origin.y + j dy). Each grid cell is split into two
/// triangles along its (i, j)-(i+1, j+1) diagonal.
struct HeightGrid {
  Vec2 origin{};
  double dx = 1.0;
  double dy = 1.0;
  std::vector<std::vector<double>> heights;
  friend bool operator==(const HeightGrid&, const HeightGrid&) = default;
};

/// Triangulated surface; `path` is relative to the scenario file.
/// `water_tags` lists WATER facets by index among the non-degenerate facets
/// in file order; every other facet is GROUND.
struct StlTerrain {
  std::string path;
  std::vector<std::size_t> water_tags;
  friend bool operator==(const StlTerrain&, const StlTerrain&) = default;
};

using Terrain = std::variant<HeightGrid, StlTerrain>;

/// Gabled box. The ridge runs along the local width axis, which is rotated
/// `rotation` radians counter-clockwise from +x.
struct House {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  double rotation = 0.0;
  double width = 10.0;
  double depth = 8.0;
  double wall_height = 3.0;
  double ridge_height = 5.0;

  /// Counter-clockwise plan-view corners.
  std::array<Vec2, 4> footprint() const;
  /// Plan-view point to local (along width, along depth) coordinates.
  Vec2 to_local(Vec2 p) const;
  /// Sink depth below the local terrain.
  double sink() const { return 0.05 * wall_height; }
  friend bool operator==(const House&, const House&) = default;
};

struct CameraSpec {
  std::string name;
  Vec3 position{};
  Vec3 direction{0.0, 1.0, 0.0};
  Vec3 up{0.0, 0.0, 1.0};
  double d = 1.0;
  double image_width = 2.0;
  double image_height = 2.0;

  raster::Camera camera(int pixels_x, int pixels_y) const;
  friend bool operator==(const CameraSpec&, const CameraSpec&) = default;
};

struct FlowSpec {
  std::array<Vec2, 2> transect{};
  double height = 50.0;
  std::string inflow_type = "parabolic";
  double u_max = 1.0;
  friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

struct Scenario {
  Terrain terrain;
  std::vector<House> houses;
  std::vector<CameraSpec> cameras;
  std::optional<FlowSpec> flow;
  /// Directory for relative paths; not serialized.
  std::filesystem::path base_dir;

  const House* find_house(std::string_view id) const;
  const CameraSpec* find_camera(std::string_view name) const;
  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.terrain == b.terrain && a.houses == b.houses && a.cameras == b.cameras && a.flow == b.flow;
  }
};

/// Two house footprints intersect.
class HouseOverlapError : public ValidationError {
 public:
  HouseOverlapError(std::string first, std::string second)
      : ValidationError("houses '" + first + "' and '" + second + "' overlap"),
        first_(std::move(first)),
        second_(std::move(second)) {}
  const std::string& first() const noexcept { return first_; }
  const std::string& second() const noexcept { return second_; }

 private:
  std::string first_, second_;
};

/// Triangulated terrain with plan-view point queries.
class TerrainSurface {
 public:
  static TerrainSurface build(const Terrain& terrain, const std::filesystem::path& base_dir);

  struct Triangle {
    std::array<Vec3, 3> v;
    view::Category category = view::Category::kGround;
  };
  const std::vector<Triangle>& triangles() const { return tris_; }
  const geometry::Box2& extent() const { return extent_; }
  /// Elevation and containing triangle, or nullopt outside the surface.
  std::optional<double> elevation(Vec2 p) const;
  std::optional<view::Category> category(Vec2 p) const;

 private:
  std::optional<std::size_t> locate(Vec2 p) const;
  std::vector<Triangle> tris_;
  geometry::AabbTree tree_;
  geometry::Box2 extent_{};
};

/// Parses and validates. Throws ParseError on malformed JSON or wrong types
/// and ValidationError on invariant violations.
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);
/// Deterministic JSON with sorted keys; parse_scenario(format_scenario(s)) == s.
std::string format_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// JSON of a single house / parse of one (id taken from the object).
std::string format_house(const House& h);
House parse_house(std::string_view json_text);

/// Throws ValidationError (HouseOverlapError for intersecting footprints).
void validate_scenario(const Scenario& s);
void validate_scenario(const Scenario& s, const TerrainSurface& terrain);

/// Vertical levels of a house: its base sits sink() below the lowest terrain
/// point under the footprint; eaves and ridge are measured from the terrain at
/// the center.
struct HouseLevels {
  double base = 0.0;
  double ground = 0.0;
  double eave = 0.0;
  double ridge = 0.0;
};
HouseLevels house_levels(const House& h, const TerrainSurface& terrain);

/// The 16 triangles of a house solid.
std::vector<std::array<Vec3, 3>> house_triangles(const House& h, const HouseLevels& levels);

/// Terrain triangles (WATER at or below sea level, flattened to z = 0) followed
/// by 16 HOUSE triangles per house.
raster::Scene build_view_scene(const Scenario& s);
raster::Scene build_view_scene(const Scenario& s, const TerrainSurface& terrain);

inline constexpr int kHouseSolidMarker = 1;  // cell marker of house interiors
inline constexpr int kHouseWallMarker = 5;   // facet marker of walls and roof

/// Section of one house by the transect plane, in (s, z) coordinates where s
/// is arc length along the transect.
struct HouseProfile {
  std::string id;
  double s_begin = 0.0;
  double s_end = 0.0;
  double base = 0.0;
  /// Roof polyline from s_begin to s_end, apex included.
  std::vector<Vec2> roof;
  /// Closed counter-clockwise outline of the solid.
  std::vector<Vec2> outline() const;
};

struct FlowDomain {
  /// Background channel first, then one mesh per intersecting house.
  std::vector<mesh::Mesh> meshes;
  std::vector<HouseProfile> houses;
  mesh::HeightProfile bottom;
  double length = 0.0;
  double height = 0.0;
  double u_max = 1.0;
};

/// Terrain-fitted channel along the transect with cell size about
/// `resolution`, and a gabled-profile mesh for each house the transect
/// crosses. Throws ValidationError without a transect, when a house is taller
/// than the channel or crosses a transect end, or when the terrain rises above
/// the channel.
FlowDomain build_flow_domain(const Scenario& s, double resolution);
FlowDomain build_flow_domain(const Scenario& s, const TerrainSurface& terrain, double resolution);

struct StreamlineOptions {
  double step = 0.05;
  double max_len = 1e3;
  std::size_t max_steps = 200000;
  /// Cells carrying this marker on overlapping parts are not fluid.
  std::optional<int> solid_marker = kHouseSolidMarker;
};

struct Streamline {
  enum class Stop { kExit, kMaxLength, kStagnation, kMaxSteps };
  std::vector<Vec2> points;
  Stop stop = Stop::kExit;
};

struct StreamlineSet {
  std::vector<Streamline> lines;
  std::vector<std::size_t> skipped;  // seeds outside the fluid
};

/// Fourth-order Runge-Kutta integration of the discrete velocity. A line
/// ends when a stage leaves the fluid, after `max_len`, or where |u| < 1e-10.
StreamlineSet trace_streamlines(const multimesh::MultiMesh& mm, const fem::TaylorHoodSpace& space,
                                const Eigen::VectorXd& coeffs, const std::vector<Vec2>& seeds,
                                const StreamlineOptions& options = {});

/// True when `x` lies in the fluid: inside the background domain and outside
/// every solid-marked cell.
bool in_fluid(const multimesh::MultiMesh& mm, Vec2 x, std::optional<int> solid_marker = kHouseSolidMarker);

struct FlowOptions {
  double resolution = 1.0;
  fem::StokesParams params{};
  /// Empty picks evenly spaced seeds just downstream of the inflow.
  std::vector<Vec2> seeds;
  std::size_t default_seed_count = 16;
  double step = 0.0;     // 0: resolution / 4
  double max_len = 0.0;  // 0: three channel lengths
  linsolve::SolveOptions solve{};
};

struct FlowStats {
  std::size_t dofs = 0;
  std::size_t active = 0;
  std::size_t cut = 0;
  std::size_t covered = 0;
  std::size_t interface_segments = 0;
  std::size_t noslip_facets = 0;
  std::size_t pinned_pressures = 0;
};

struct FlowResult {
  FlowDomain domain;
  std::unique_ptr<multimesh::MultiMesh> mm;
  std::unique_ptr<fem::TaylorHoodSpace> space;
  Eigen::VectorXd coeffs;
  linsolve::SolveReport solve;
  StreamlineSet streamlines;
  FlowStats stats;
  double resolution = 0.0;
};

/// Domain, multimesh, facet marking, assembly, boundary conditions, solve and
/// streamlines. Inflow is parabolic on the left end, no-slip on the terrain,
/// the channel lid and every house, zero pressure on the right end.
FlowResult run_flow(const Scenario& s, const FlowOptions& options);

/// JSON with sorted keys and 12 significant digits. Timings are excluded.
std::string format_flow_report(const FlowResult& r);
std::string format_streamlines(const StreamlineSet& set);

}  // namespace settle::scenario
