// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
//
// settle: batch view valuation, panorama sweeps, flow solves and the HTTP service.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "service.hpp"
#include "settle/error.hpp"
#include "settle/raster.hpp"
#include "settle/scenario.hpp"
#include "settle/view.hpp"

namespace {

using namespace settle;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) std::cout << text;
  else raster::write_file(path, text);
}

scenario::Scenario load(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw UsageError("no such scenario file: " + path);
  return scenario::load_scenario(path);
}

Vec3 parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--point expects x,y,z");
    }
  }
  if (v.size() != 3) throw UsageError("--point expects x,y,z");
  return {v[0], v[1], v[2]};
}

std::vector<Vec2> read_seeds(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw UsageError("no such seed file: " + path);
  std::ifstream in(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("seed file: ") + e.what(), 0);
  }
  if (j.is_object() && j.contains("seeds")) j = j["seeds"];
  std::vector<Vec2> seeds;
  if (!j.is_array()) throw ParseError("seed file: expected an array of [s, z] points", 0);
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ParseError("seed file: expected an array of [s, z] points", 0);
    seeds.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"settle: view valuation and wind flow for settlement layouts"};
  app.require_subcommand(1);

  std::string scenario_path, camera, out, sigma_out, report, point, field_out, lines_out, seeds_path, static_dir;
  std::string host = "127.0.0.1";
  std::vector<int> px;
  int n = 32, rows = 128, port = 8080;
  double d = 1.0, h = 0.0, gamma = 1e8, beta = 1e1;

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario_path, "scenario JSON")->required();

  auto* view_cmd = app.add_subcommand("view", "rasterize one camera and report V");
  view_cmd->add_option("scenario", scenario_path, "scenario JSON")->required();
  view_cmd->add_option("--camera", camera, "camera name")->required();
  view_cmd->add_option("--px", px, "image width and height in pixels")->expected(2)->required();
  view_cmd->add_option("--out", out, "category image (PPM)");
  view_cmd->add_option("--sigma-out", sigma_out, "sigma image (greyscale PPM)");
  view_cmd->add_option("--report", report, "JSON report (stdout when omitted)");

  auto* pano = app.add_subcommand("view360", "N-image panorama valuation");
  pano->add_option("scenario", scenario_path, "scenario JSON")->required();
  pano->add_option("--point", point, "viewpoint x,y,z")->required();
  pano->add_option("--n", n, "number of images")->capture_default_str();
  pano->add_option("--d", d, "image-plane distance")->capture_default_str();
  pano->add_option("--rows", rows, "pixel rows per image")->capture_default_str();
  pano->add_option("--report", report, "JSON report (stdout when omitted)");

  auto* flow = app.add_subcommand("flow", "solve the transect flow and trace streamlines");
  flow->set_help_flag("--help", "Print this help message and exit");
  flow->add_option("scenario", scenario_path, "scenario JSON")->required();
  flow->add_option("--h", h, "mesh resolution (m)")->required();
  flow->add_option("--gamma", gamma, "pressure-jump stabilization")->capture_default_str();
  flow->add_option("--beta", beta, "Nitsche penalty")->capture_default_str();
  flow->add_option("--out", field_out, "fields (legacy VTK)");
  flow->add_option("--streamlines", lines_out, "streamline polylines (JSON)");
  flow->add_option("--seeds", seeds_path, "seed points [[s, z], ...] (JSON)");
  flow->add_option("--report", report, "JSON report (stdout when omitted)");

  auto* serve = app.add_subcommand("serve", "start the HTTP service");
  serve->add_option("--port", port, "TCP port")->required();
  serve->add_option("--scenario", scenario_path, "scenario JSON")->required();
  serve->add_option("--host", host, "bind address")->capture_default_str();
  serve->add_option("--static", static_dir, "UI bundle served under /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) {
      const auto s = load(scenario_path);
      std::cout << "ok: " << s.houses.size() << " houses, " << s.cameras.size() << " cameras"
                << (s.flow ? ", flow transect" : "") << "\n";
    } else if (*view_cmd) {
      if (px[0] < 1 || px[1] < 1) throw UsageError("--px must be positive");
      const auto s = load(scenario_path);
      const scenario::CameraSpec* cam = s.find_camera(camera);
      if (!cam) throw UsageError("unknown camera '" + camera + "'");
      const auto buf = raster::rasterize_scene(scenario::build_view_scene(s), cam->camera(px[0], px[1]));
      if (!out.empty()) raster::write_file(out, raster::format_category_ppm(buf));
      if (!sigma_out.empty()) raster::write_file(sigma_out, raster::format_sigma_ppm(buf));
      emit(report, view::format_view_report(view::view_value(buf), camera));
    } else if (*pano) {
      if (n < 3) throw UsageError("n must be ≥ 3");
      if (!(d > 0.0)) throw UsageError("--d must be positive");
      if (rows < 1) throw UsageError("--rows must be positive");
      const Vec3 p = parse_point(point);
      const auto s = load(scenario_path);
      view::PanoramaOptions opt;
      opt.n_images = n;
      opt.d = d;
      opt.pixels_y = rows;
      emit(report, view::format_panorama_report(view::view_360(scenario::build_view_scene(s), p, opt), p, opt));
    } else if (*flow) {
      if (!(h > 0.0)) throw UsageError("--h must be positive");
      if (!(gamma >= 0.0) || !(beta > 0.0)) throw UsageError("--gamma must be >= 0 and --beta > 0");
      const auto s = load(scenario_path);
      scenario::FlowOptions opt;
      opt.resolution = h;
      opt.params.gamma = gamma;
      opt.params.beta = beta;
      if (!seeds_path.empty()) opt.seeds = read_seeds(seeds_path);
      const auto r = scenario::run_flow(s, opt);
      for (std::size_t i : r.streamlines.skipped) std::fprintf(stderr, "warning: seed %zu lies outside the fluid; skipped\n", i);
      if (!field_out.empty()) raster::write_file(field_out, fem::format_vtk(*r.mm, *r.space, r.coeffs));
      if (!lines_out.empty()) raster::write_file(lines_out, scenario::format_streamlines(r.streamlines));
      emit(report, scenario::format_flow_report(r));
    } else if (*serve) {
      if (port < 0 || port > 65535) throw UsageError("--port out of range");
      if (!std::filesystem::is_regular_file(scenario_path)) throw UsageError("no such scenario file: " + scenario_path);
      service::ServiceOptions opt;
      opt.scenario_path = scenario_path;
      opt.static_dir = static_dir;
      opt.gamma = gamma;
      if (!service::serve(opt, host, port)) {
        std::fprintf(stderr, "error: cannot listen on %s:%d\n", host.c_str(), port);
        return kFailure;
      }
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n%s", e.what(), app.help().c_str());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kOk;
}
