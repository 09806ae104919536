// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <filesystem>

#include "settle/scenario.hpp"
#include "settle/view.hpp"

using namespace settle;

namespace {

const std::filesystem::path kData = SETTLE_DATA_DIR;

const scenario::Scenario& demo() {
  static const auto s = scenario::load_scenario(kData / "scenarios" / "demo.json");
  return s;
}

void BM_RasterizeDemo(benchmark::State& state) {
  const auto scene = scenario::build_view_scene(demo());
  const auto cam = demo().cameras[0].camera(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(view::view_value(raster::rasterize_scene(scene, cam)).V);
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_RasterizeDemo)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_View360Demo(benchmark::State& state) {
  const auto scene = scenario::build_view_scene(demo());
  view::PanoramaOptions opt;
  opt.n_images = static_cast<int>(state.range(0));
  opt.pixels_y = 64;
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(view::view_360(scene, {20, 82, 8.5}, opt).V360);
}
BENCHMARK(BM_View360Demo)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_BuildViewScene(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(scenario::build_view_scene(demo()).triangles.size());
}
BENCHMARK(BM_BuildViewScene)->Unit(benchmark::kMillisecond);

}  // namespace
