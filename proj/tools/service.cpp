// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include "service.hpp"

#include <condition_variable>
#include <cstdio>
#include <deque>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <thread>

#include "json.hpp"
#include "settle/error.hpp"
#include "settle/scenario.hpp"
#include "settle/view.hpp"
// After Eigen: resolv.h defines a `_res` macro.
#include "httplib.h"

namespace settle::service {

using Json = nlohmann::json;

namespace {

enum class JobStatus { kQueued, kRunning, kDone, kFailed };

const char* status_name(JobStatus s) {
  switch (s) {
    case JobStatus::kQueued: return "queued";
    case JobStatus::kRunning: return "running";
    case JobStatus::kDone: return "done";
    case JobStatus::kFailed: return "failed";
  }
  return "failed";
}

struct Job {
  std::string id;
  std::string kind = "flow";
  JobStatus status = JobStatus::kQueued;
  std::uint64_t revision = 0;
  scenario::Scenario snapshot;
  scenario::FlowOptions options;
  Json result;
  std::string error;
};

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) { reply(res, status, {{"error", message}}); }

std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return Json::object();
  try {
    Json j = Json::parse(req.body);
    if (!j.is_object()) {
      fail(res, 400, "request body must be a JSON object");
      return std::nullopt;
    }
    return j;
  } catch (const Json::parse_error& e) {
    fail(res, 400, std::string("malformed JSON: ") + e.what());
    return std::nullopt;
  }
}

bool read_number(const Json& body, const char* key, double& out, httplib::Response& res) {
  auto it = body.find(key);
  if (it == body.end()) return true;
  if (!it->is_number()) {
    fail(res, 400, std::string("'") + key + "' must be a number");
    return false;
  }
  out = it->get<double>();
  return true;
}

}  // namespace

struct Service::State {
  ServiceOptions options;
  std::shared_mutex scenario_mutex;
  scenario::Scenario scenario;
  std::uint64_t revision = 1;

  std::mutex jobs_mutex;
  std::condition_variable jobs_cv;
  std::map<std::string, Job> jobs;
  std::deque<std::string> queue;
  bool flow_active = false;  // queued or running
  bool stopping = false;
  std::uint64_t next_job = 1;

  std::mutex artifacts_mutex;
  std::map<std::string, std::string> images, fields;
  std::uint64_t next_artifact = 1;

  std::thread worker;

  std::string store(std::map<std::string, std::string>& m, std::string bytes) {
    std::lock_guard lock(artifacts_mutex);
    const std::string id = std::to_string(next_artifact++);
    m.emplace(id, std::move(bytes));
    return id;
  }

  void run_worker() {
    for (;;) {
      std::string id;
      scenario::Scenario snap;
      scenario::FlowOptions opt;
      {
        std::unique_lock lock(jobs_mutex);
        jobs_cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        id = queue.front();
        queue.pop_front();
        Job& job = jobs.at(id);
        job.status = JobStatus::kRunning;
        snap = job.snapshot;
        opt = job.options;
      }
      Json result;
      std::string error;
      try {
        const auto r = scenario::run_flow(snap, opt);
        const std::string field_id = store(fields, fem::format_vtk(*r.mm, *r.space, r.coeffs));
        Json lines = Json::array();
        const Json parsed = Json::parse(scenario::format_streamlines(r.streamlines));
        for (const auto& l : parsed["lines"]) lines.push_back(l["points"]);
        result = {{"streamlines", lines},
                  {"field_url", "/api/fields/" + field_id + ".vtk"},
                  {"report", Json::parse(scenario::format_flow_report(r))}};
      } catch (const std::exception& e) {
        error = e.what();
      }
      {
        std::lock_guard lock(jobs_mutex);
        Job& job = jobs.at(id);
        if (error.empty()) {
          job.status = JobStatus::kDone;
          job.result = std::move(result);
        } else {
          job.status = JobStatus::kFailed;
          job.error = error;
        }
        job.snapshot = {};
        flow_active = !queue.empty();
      }
      jobs_cv.notify_all();
    }
  }
};

Service::Service(ServiceOptions options) : state_(std::make_unique<State>()) {
  state_->options = std::move(options);
  state_->scenario = scenario::load_scenario(state_->options.scenario_path);
  state_->worker = std::thread([s = state_.get()] { s->run_worker(); });
}

Service::~Service() {
  {
    std::lock_guard lock(state_->jobs_mutex);
    state_->stopping = true;
  }
  state_->jobs_cv.notify_all();
  if (state_->worker.joinable()) state_->worker.join();
}

void Service::wait_idle() {
  std::unique_lock lock(state_->jobs_mutex);
  state_->jobs_cv.wait(lock, [&] { return !state_->flow_active; });
}

void Service::register_routes(httplib::Server& server) {
  State* st = state_.get();

  server.Get("/api/scenario", [st](const httplib::Request&, httplib::Response& res) {
    std::shared_lock lock(st->scenario_mutex);
    Json j = Json::parse(scenario::format_scenario(st->scenario));
    j["revision"] = st->revision;
    reply(res, 200, j);
  });

  server.Put("/api/houses/:id", [st](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.path_params.at("id");
    auto body = parse_body(req, res);
    if (!body) return;
    {
      std::lock_guard jobs_lock(st->jobs_mutex);
      if (st->flow_active) return fail(res, 409, "a flow job is running; edits are rejected until it finishes");
    }
    std::unique_lock lock(st->scenario_mutex);
    auto it = std::find_if(st->scenario.houses.begin(), st->scenario.houses.end(),
                           [&](const scenario::House& h) { return h.id == id; });
    if (it == st->scenario.houses.end()) return fail(res, 404, "unknown house '" + id + "'");
    if (auto b = body->find("id"); b != body->end() && (!b->is_string() || b->get<std::string>() != id))
      return fail(res, 400, "house id in the body does not match the path");
    scenario::House h = *it;
    for (auto [key, field] : {std::pair{"x", &h.x}, {"y", &h.y}, {"rotation", &h.rotation}, {"width", &h.width},
                              {"depth", &h.depth}, {"wall_height", &h.wall_height}, {"ridge_height", &h.ridge_height}}) {
      if (!read_number(*body, key, *field, res)) return;
    }
    scenario::Scenario next = st->scenario;
    next.houses[static_cast<std::size_t>(it - st->scenario.houses.begin())] = h;
    try {
      scenario::validate_scenario(next);
    } catch (const scenario::HouseOverlapError& e) {
      return reply(res, 409, {{"error", e.what()}, {"ids", {e.first(), e.second()}}});
    } catch (const Error& e) {
      return reply(res, 409, {{"error", e.what()}, {"ids", {id}}});
    }
    st->scenario = std::move(next);
    ++st->revision;
    Json out = Json::parse(scenario::format_house(h));
    out["revision"] = st->revision;
    reply(res, 200, out);
  });

  server.Post("/api/compute/view", [st](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    scenario::Scenario snap;
    std::uint64_t revision = 0;
    {
      std::shared_lock lock(st->scenario_mutex);
      snap = st->scenario;
      revision = st->revision;
    }
    int px_w = 256, px_h = 256;
    if (auto it = body->find("px"); it != body->end()) {
      if (it->is_number_integer()) {
        px_w = px_h = it->get<int>();
      } else if (it->is_array() && it->size() == 2 && (*it)[0].is_number_integer() && (*it)[1].is_number_integer()) {
        px_w = (*it)[0].get<int>();
        px_h = (*it)[1].get<int>();
      } else {
        return fail(res, 400, "'px' must be an integer or [width, height]");
      }
      if (px_w < 1 || px_h < 1 || px_w > 8192 || px_h > 8192) return fail(res, 400, "'px' out of range");
    }
    const bool by_camera = body->contains("camera"), by_point = body->contains("point");
    if (by_camera == by_point) return fail(res, 400, "exactly one of 'camera' or 'point' is required");
    try {
      const raster::Scene scene = scenario::build_view_scene(snap);
      if (by_camera) {
        if (!(*body)["camera"].is_string()) return fail(res, 400, "'camera' must be a camera name");
        const std::string name = (*body)["camera"].get<std::string>();
        const scenario::CameraSpec* cam = snap.find_camera(name);
        if (!cam) return fail(res, 404, "unknown camera '" + name + "'");
        const auto buf = raster::rasterize_scene(scene, cam->camera(px_w, px_h));
        const auto vr = view::view_value(buf);
        Json out = Json::parse(view::format_view_report(vr, name));
        out["image_url"] = "/api/images/" + st->store(st->images, raster::format_category_ppm(buf)) + ".ppm";
        out["revision"] = revision;
        return reply(res, 200, out);
      }
      const Json& p = (*body)["point"];
      if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
        return fail(res, 400, "'point' must be [x, y, z]");
      view::PanoramaOptions opt;
      opt.pixels_y = px_h;
      if (auto n = body->find("n"); n != body->end()) {
        if (!n->is_number_integer()) return fail(res, 400, "'n' must be an integer");
        opt.n_images = n->get<int>();
      }
      if (!read_number(*body, "d", opt.d, res)) return;
      if (opt.n_images < 3) return fail(res, 400, "n must be ≥ 3");
      if (opt.n_images > 4096) return fail(res, 400, "'n' out of range");
      const Vec3 point{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
      const auto pr = view::view_360(scene, point, opt);
      Json out = Json::parse(view::format_panorama_report(pr, point, opt));
      const auto first = raster::rasterize_scene(scene, view::panorama_camera(point, 0, opt), opt.weights);
      const auto vr = view::view_value(first);
      out["fractions"] = Json::parse(view::format_view_report(vr, "south"))["fractions"];
      out["image_url"] = "/api/images/" + st->store(st->images, raster::format_category_ppm(first)) + ".ppm";
      out["revision"] = revision;
      return reply(res, 200, out);
    } catch (const ValidationError& e) {
      return fail(res, 400, e.what());
    } catch (const std::exception& e) {
      return fail(res, 500, e.what());
    }
  });

  server.Post("/api/compute/flow", [st](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    scenario::FlowOptions opt;
    opt.params.gamma = st->options.gamma;
    auto h = body->find("h");
    if (h == body->end() || !h->is_number() || !(h->get<double>() > 0.0)) return fail(res, 400, "'h' must be a positive number");
    opt.resolution = h->get<double>();
    if (!read_number(*body, "gamma", opt.params.gamma, res)) return;
    if (!(opt.params.gamma >= 0.0)) return fail(res, 400, "'gamma' must be non-negative");
    std::lock_guard jobs_lock(st->jobs_mutex);
    if (st->flow_active) return fail(res, 409, "a flow job is already running");
    Job job;
    {
      std::shared_lock lock(st->scenario_mutex);
      if (!st->scenario.flow) return fail(res, 409, "scenario has no flow transect");
      job.snapshot = st->scenario;
      job.revision = st->revision;
    }
    job.id = std::to_string(st->next_job++);
    job.options = opt;
    const std::string id = job.id;
    st->jobs.emplace(id, std::move(job));
    st->queue.push_back(id);
    st->flow_active = true;
    st->jobs_cv.notify_all();
    reply(res, 202, {{"job", id}, {"status", "queued"}, {"url", "/api/jobs/" + id}});
  });

  server.Get("/api/jobs/:id", [st](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(st->jobs_mutex);
    auto it = st->jobs.find(req.path_params.at("id"));
    if (it == st->jobs.end()) return fail(res, 404, "unknown job");
    const Job& job = it->second;
    Json out = {{"id", job.id}, {"kind", job.kind}, {"status", status_name(job.status)}, {"revision", job.revision}};
    if (job.status == JobStatus::kDone) out["result"] = job.result;
    if (job.status == JobStatus::kFailed) out["error"] = job.error;
    reply(res, 200, out);
  });

  auto artifact = [st](std::map<std::string, std::string>& store, const char* ext, const char* mime) {
    return [st, &store, ext, mime](const httplib::Request& req, httplib::Response& res) {
      std::string name = req.path_params.at("file");
      const std::string suffix = ext;
      if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
        return fail(res, 404, "unknown artifact");
      name.resize(name.size() - suffix.size());
      std::lock_guard lock(st->artifacts_mutex);
      auto it = store.find(name);
      if (it == store.end()) return fail(res, 404, "unknown artifact");
      res.status = 200;
      res.set_content(it->second, mime);
    };
  };
  server.Get("/api/images/:file", artifact(st->images, ".ppm", "image/x-portable-pixmap"));
  server.Get("/api/fields/:file", artifact(st->fields, ".vtk", "text/plain"));

  server.Post("/api/scenario/save", [st](const httplib::Request&, httplib::Response& res) {
    std::shared_lock lock(st->scenario_mutex);
    try {
      scenario::save_scenario(st->scenario, st->options.scenario_path);
    } catch (const std::exception& e) {
      return fail(res, 500, e.what());
    }
    reply(res, 200, {{"saved", st->options.scenario_path.string()}, {"revision", st->revision}});
  });

  if (!st->options.static_dir.empty()) server.set_mount_point("/", st->options.static_dir.string());
}

bool serve(const ServiceOptions& options, const std::string& host, int port) {
  Service service(options);
  httplib::Server server;
  service.register_routes(server);
  std::fprintf(stderr, "settle: serving %s on http://%s:%d\n", options.scenario_path.string().c_str(), host.c_str(), port);
  return server.listen(host, port);
}

}  // namespace settle::service
