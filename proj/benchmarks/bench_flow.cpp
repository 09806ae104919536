// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "settle/linsolve.hpp"
#include "settle/multimesh.hpp"
#include "settle/stokes.hpp"

using namespace settle;

namespace {

std::vector<mesh::Mesh> unit_square_with_patch(std::size_t n) {
  const std::size_t m = std::max<std::size_t>(2, 3 * n / 8);
  return {mesh::generate_rect_mesh({{0, 0}, {1, 1}}, n, n),
          mesh::transform_mesh(mesh::generate_rect_mesh({{0, 0}, {0.37, 0.37}}, m, m), {{0.311, 0.293}, 0.2})};
}

void BM_MultiMeshBuild(benchmark::State& state) {
  const auto meshes = unit_square_with_patch(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(multimesh::MultiMesh::build(meshes).interface().size());
}
BENCHMARK(BM_MultiMeshBuild)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const auto mm = multimesh::MultiMesh::build(unit_square_with_patch(static_cast<std::size_t>(state.range(0))));
  const fem::TaylorHoodSpace space(mm);
  for (auto _ : state) benchmark::DoNotOptimize(fem::assemble_system(mm, space, {}).A.nonZeros());
  state.counters["dofs"] = static_cast<double>(space.size());
}
BENCHMARK(BM_Assemble)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const auto mm = multimesh::MultiMesh::build(unit_square_with_patch(static_cast<std::size_t>(state.range(0))));
  const fem::TaylorHoodSpace space(mm);
  fem::StokesParams params;
  params.f = [](Vec2 x) { return Vec2{x.y, -x.x}; };
  std::vector<fem::DirichletBC> bcs;
  for (int m : {mesh::kBottom, mesh::kLeft, mesh::kRight, mesh::kTop}) {
    fem::DirichletBC b;
    b.marker = m;
    bcs.push_back(b);
  }
  fem::DirichletBC pin;
  pin.field = fem::Field::kPressure;
  pin.vertices = {0};
  bcs.push_back(pin);
  const auto sys = fem::apply_dirichlet(fem::assemble_system(mm, space, params), mm, space, bcs);
  for (auto _ : state) benchmark::DoNotOptimize(linsolve::solve_sparse(sys.A, sys.b, {}, &sys.A_low).x.size());
}
BENCHMARK(BM_Solve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
