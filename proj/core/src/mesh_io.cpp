// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "settle/error.hpp"
#include "settle/mesh.hpp"

namespace settle::mesh {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double to_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) throw ParseError("bad number '" + std::string(tok) + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite coordinate", line);
  return v;
}

long long to_int(std::string_view tok, std::size_t line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) throw ParseError("bad integer '" + std::string(tok) + "'", line);
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Mesh parse_mesh(std::string_view text) {
  Mesh m;
  std::size_t nv = 0, nc = 0, line_no = 0;
  bool header = false;
  bool any_marker = false;
  std::vector<int> markers;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].starts_with('#')) {
      if (end == text.size()) break;
      continue;
    }
    if (!header) {
      if (tok[0] != "mesh" || tok.size() != 4) throw ParseError("expected header 'mesh <dim> <nv> <nc>'", line_no);
      const long long dim = to_int(tok[1], line_no);
      if (dim != 2 && dim != 3) throw ParseError("dim must be 2 or 3", line_no);
      const long long v = to_int(tok[2], line_no), c = to_int(tok[3], line_no);
      if (v < 0 || c < 0) throw ParseError("negative count in header", line_no);
      m.dim = static_cast<int>(dim);
      nv = static_cast<std::size_t>(v);
      nc = static_cast<std::size_t>(c);
      m.vertices.reserve(nv);
      m.cells.reserve(nc);
      header = true;
    } else if (tok[0] == "v") {
      if (m.vertices.size() == nv) throw ParseError("more vertices than declared", line_no);
      if (!m.cells.empty()) throw ParseError("vertex after cells", line_no);
      const std::size_t expect = static_cast<std::size_t>(m.dim) + 1;
      if (tok.size() != expect) throw ParseError("vertex line needs " + std::to_string(m.dim) + " coordinates", line_no);
      Vec3 p{to_double(tok[1], line_no), to_double(tok[2], line_no), m.dim == 3 ? to_double(tok[3], line_no) : 0.0};
      m.vertices.push_back(p);
    } else if (tok[0] == "c") {
      if (m.vertices.size() != nv) throw ParseError("cell before all vertices were read", line_no);
      if (m.cells.size() == nc) throw ParseError("more cells than declared", line_no);
      if (tok.size() != 4 && tok.size() != 5) throw ParseError("cell line needs 3 indices and an optional marker", line_no);
      std::array<std::size_t, 3> cell{};
      for (int k = 0; k < 3; ++k) {
        const long long idx = to_int(tok[1 + k], line_no);
        if (idx < 0 || static_cast<std::size_t>(idx) >= nv)
          throw ParseError("cell index " + std::to_string(idx) + " out of range", line_no);
        cell[k] = static_cast<std::size_t>(idx);
      }
      m.cells.push_back(cell);
      if (tok.size() == 5) {
        markers.push_back(static_cast<int>(to_int(tok[4], line_no)));
        any_marker = true;
      } else {
        markers.push_back(0);
      }
    } else if (tok[0] == "f") {
      if (m.cells.size() != nc) throw ParseError("facet marker before all cells were read", line_no);
      if (tok.size() != 4) throw ParseError("facet line needs cell, local facet and marker", line_no);
      const long long c = to_int(tok[1], line_no), k = to_int(tok[2], line_no);
      if (c < 0 || static_cast<std::size_t>(c) >= nc) throw ParseError("facet cell out of range", line_no);
      if (k < 0 || k > 2) throw ParseError("local facet must be 0, 1 or 2", line_no);
      m.facet_markers.push_back({static_cast<std::size_t>(c), static_cast<int>(k), static_cast<int>(to_int(tok[3], line_no))});
    } else {
      throw ParseError("unknown record '" + std::string(tok[0]) + "'", line_no);
    }
    if (end == text.size()) break;
  }
  if (!header) throw ParseError("missing header", line_no);
  if (m.vertices.size() != nv) throw ParseError("fewer vertices than declared", line_no);
  if (m.cells.size() != nc) throw ParseError("fewer cells than declared", line_no);
  if (any_marker) m.cell_markers = std::move(markers);
  return m;
}

std::string format_mesh(const Mesh& m) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "mesh %d %zu %zu\n", m.dim, m.vertices.size(), m.cells.size());
  out += buf;
  for (const Vec3& v : m.vertices) {
    if (m.dim == 2) std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", v.x, v.y);
    else std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    out += buf;
  }
  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    const auto& cell = m.cells[c];
    if (m.cell_markers.empty()) std::snprintf(buf, sizeof buf, "c %zu %zu %zu\n", cell[0], cell[1], cell[2]);
    else std::snprintf(buf, sizeof buf, "c %zu %zu %zu %d\n", cell[0], cell[1], cell[2], m.cell_markers[c]);
    out += buf;
  }
  for (const FacetMarker& f : m.facet_markers) {
    std::snprintf(buf, sizeof buf, "f %zu %d %d\n", f.cell, f.local_facet, f.marker);
    out += buf;
  }
  return out;
}

Mesh read_mesh(const std::filesystem::path& path) { return parse_mesh(read_file(path)); }

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << format_mesh(mesh);
}

StlImport read_stl(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::vector<std::array<Vec3, 3>> facets;

  auto looks_ascii = [&] {
    std::size_t i = 0;
    while (i < data.size() && std::isspace(static_cast<unsigned char>(data[i]))) ++i;
    return data.compare(i, 5, "solid") == 0 && data.find("facet", i) != std::string::npos;
  };

  bool binary = false;
  if (data.size() >= 84) {
    std::uint32_t count = 0;
    std::memcpy(&count, data.data() + 80, 4);
    if (84 + 50ull * count == data.size()) binary = true;
    else if (!looks_ascii()) throw ParseError("truncated binary STL (" + std::to_string(count) + " facets declared)", 0);
  }
  if (binary) {
    std::uint32_t count = 0;
    std::memcpy(&count, data.data() + 80, 4);
    facets.reserve(count);
    for (std::uint32_t f = 0; f < count; ++f) {
      const char* rec = data.data() + 84 + 50ull * f;
      std::array<Vec3, 3> tri;
      for (int k = 0; k < 3; ++k) {
        float xyz[3];
        std::memcpy(xyz, rec + 12 + 12 * k, 12);
        tri[k] = {xyz[0], xyz[1], xyz[2]};
      }
      facets.push_back(tri);
    }
  } else {
    if (!looks_ascii()) throw ParseError("not an STL file", 0);
    std::istringstream in(data);
    std::string word;
    std::vector<Vec3> pending;
    std::size_t line = 0;
    std::string raw;
    while (std::getline(in, raw)) {
      ++line;
      std::istringstream ls(raw);
      if (!(ls >> word)) continue;
      if (word == "vertex") {
        std::string xs, ys, zs;
        if (!(ls >> xs >> ys >> zs)) throw ParseError("vertex needs three coordinates", line);
        pending.push_back({to_double(xs, line), to_double(ys, line), to_double(zs, line)});
      } else if (word == "endfacet") {
        if (pending.size() != 3) throw ParseError("facet without exactly three vertices", line);
        facets.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
      }
    }
    if (!pending.empty()) throw ParseError("truncated ASCII STL", line);
  }

  StlImport result;
  result.facets_in_file = facets.size();
  Mesh& m = result.mesh;
  m.dim = 3;
  std::map<std::array<double, 3>, std::size_t> index;
  auto vid = [&](const Vec3& p) {
    auto [it, inserted] = index.emplace(std::array<double, 3>{p.x, p.y, p.z}, m.vertices.size());
    if (inserted) m.vertices.push_back(p);
    return it->second;
  };
  for (const auto& tri : facets) {
    const double area = 0.5 * norm(cross(tri[1] - tri[0], tri[2] - tri[0]));
    if (!(area > 0.0) || tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      ++result.dropped_degenerate;
      continue;
    }
    m.cells.push_back({vid(tri[0]), vid(tri[1]), vid(tri[2])});
  }
  return result;
}

}  // namespace settle::mesh
