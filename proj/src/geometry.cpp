// Copyright 2026 The synthseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synthseg/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "synthseg/error.hpp"

namespace synthseg {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<long> parse_long(std::string_view s) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// OBJ indices are 1-based; negative values count back from the current end.
std::optional<long> resolve_index(std::string_view token, std::size_t count) {
  auto idx = parse_long(token);
  if (!idx || *idx == 0) return std::nullopt;
  if (*idx < 0) return static_cast<long>(count) + *idx;
  return *idx - 1;
}

std::optional<Vec3> read_kd(const std::filesystem::path& mtl_path, const std::string& material) {
  std::ifstream in(mtl_path);
  if (!in) return std::nullopt;
  std::string line;
  bool active = material.empty();
  while (std::getline(in, line)) {
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "newmtl") {
      active = material.empty() ? true : (tok.size() > 1 && tok[1] == material);
    } else if (active && tok[0] == "Kd" && tok.size() >= 4) {
      auto r = parse_double(tok[1]), g = parse_double(tok[2]), b = parse_double(tok[3]);
      if (r && g && b) {
        return Vec3{std::clamp(*r, 0.0, 1.0), std::clamp(*g, 0.0, 1.0), std::clamp(*b, 0.0, 1.0)};
      }
    }
  }
  return std::nullopt;
}

bool all_collinear(const std::vector<Vec3>& v) {
  const Aabb box = compute_aabb(v);
  const double scale = std::max(norm(box.size()), std::numeric_limits<double>::min());
  const Vec3& a = v.front();
  std::size_t bi = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (norm(v[i] - a) > 1e-12 * scale) {
      bi = i;
      break;
    }
  }
  if (bi == 0) return true;
  const Vec3 dir = normalized(v[bi] - a);
  for (const Vec3& p : v) {
    if (norm(cross(dir, p - a)) > 1e-9 * scale) return false;
  }
  return true;
}

}  // namespace

Transform Transform::inverse() const {
  Transform inv;
  inv.rotation = rotation.conjugate();
  inv.scale = 1.0 / scale;
  inv.translation = -(inv.rotation.rotate(translation) / scale);
  return inv;
}

void validate_mesh(const Mesh& mesh) {
  if (mesh.vertices.size() < 3) throw MeshError("mesh", 0, "fewer than 3 vertices");
  if (mesh.triangles.empty()) throw MeshError("mesh", 0, "no triangles");
  if (mesh.normals.size() != mesh.vertices.size()) {
    throw MeshError("mesh", 0, "normal count differs from vertex count");
  }
  for (const auto& tri : mesh.triangles) {
    for (auto i : tri) {
      if (i >= mesh.vertices.size()) throw MeshError("mesh", 0, "index out of range");
    }
  }
  for (const Vec3& n : mesh.normals) {
    if (std::abs(norm(n) - 1.0) > 1e-6) throw MeshError("mesh", 0, "normal is not unit length");
  }
}

std::vector<Vec3> compute_vertex_normals(
    const std::vector<Vec3>& vertices, const std::vector<std::array<std::uint32_t, 3>>& triangles) {
  std::vector<Vec3> acc(vertices.size());
  for (const auto& t : triangles) {
    // Unnormalized face normal has length 2 * area.
    const Vec3 fn = cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
    for (auto i : t) acc[i] += fn;
  }
  for (Vec3& n : acc) {
    const double len = norm(n);
    n = len > 0.0 ? n / len : Vec3{0.0, 0.0, 1.0};
  }
  return acc;
}

Mesh parse_obj(std::string_view text, const std::string& source_name,
               const std::filesystem::path& base_dir) {
  std::vector<Vec3> positions;
  std::vector<Vec3> file_normals;
  struct Corner {
    std::uint32_t v;
    long vn;
  };
  std::vector<std::array<Corner, 3>> faces;
  std::vector<std::string> mtllibs;
  std::string first_material;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_ws(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }

    if (tok[0] == "v" || tok[0] == "vn") {
      if (tok.size() < 4) throw MeshError(source_name, line_no, "malformed " + std::string(tok[0]) + " line");
      auto x = parse_double(tok[1]), y = parse_double(tok[2]), z = parse_double(tok[3]);
      if (!x || !y || !z) {
        throw MeshError(source_name, line_no, "malformed " + std::string(tok[0]) + " line");
      }
      (tok[0] == "v" ? positions : file_normals).push_back({*x, *y, *z});
    } else if (tok[0] == "f") {
      if (tok.size() < 4) throw MeshError(source_name, line_no, "malformed face line");
      std::vector<Corner> poly;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        std::string_view c = tok[k];
        const auto s1 = c.find('/');
        auto vi = resolve_index(c.substr(0, s1), positions.size());
        if (!vi) throw MeshError(source_name, line_no, "malformed face line");
        if (*vi < 0 || static_cast<std::size_t>(*vi) >= positions.size()) {
          throw MeshError(source_name, line_no, "index out of range");
        }
        long ni = -1;
        if (s1 != std::string_view::npos) {
          const auto s2 = c.find('/', s1 + 1);
          if (s2 != std::string_view::npos && s2 + 1 < c.size()) {
            auto n = resolve_index(c.substr(s2 + 1), file_normals.size());
            if (!n) throw MeshError(source_name, line_no, "malformed face line");
            if (*n < 0 || static_cast<std::size_t>(*n) >= file_normals.size()) {
              throw MeshError(source_name, line_no, "normal index out of range");
            }
            ni = *n;
          }
        }
        poly.push_back({static_cast<std::uint32_t>(*vi), ni});
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) faces.push_back({poly[0], poly[k], poly[k + 1]});
    } else if (tok[0] == "mtllib" && tok.size() > 1) {
      mtllibs.emplace_back(tok[1]);
    } else if (tok[0] == "usemtl" && tok.size() > 1 && first_material.empty()) {
      first_material = std::string(tok[1]);
    }
    if (end == text.size()) break;
  }

  if (positions.size() < 3) throw MeshError(source_name, line_no, "fewer than 3 vertices");
  if (faces.empty()) throw MeshError(source_name, line_no, "no faces");
  if (all_collinear(positions)) throw MeshError(source_name, line_no, "degenerate mesh: all vertices collinear");

  Mesh mesh;
  mesh.vertices = std::move(positions);
  mesh.triangles.reserve(faces.size());
  std::vector<long> normal_of(mesh.vertices.size(), -1);
  for (const auto& f : faces) {
    mesh.triangles.push_back({f[0].v, f[1].v, f[2].v});
    for (const auto& c : f) {
      if (normal_of[c.v] < 0) normal_of[c.v] = c.vn;
    }
  }

  bool complete = !file_normals.empty();
  if (complete) {
    mesh.normals.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size() && complete; ++i) {
      if (normal_of[i] < 0) {
        complete = false;
        break;
      }
      const Vec3 n = file_normals[static_cast<std::size_t>(normal_of[i])];
      const double len = norm(n);
      if (!(len > 0.0)) {
        complete = false;
        break;
      }
      mesh.normals[i] = n / len;
    }
  }
  if (!complete) mesh.normals = compute_vertex_normals(mesh.vertices, mesh.triangles);

  for (const auto& lib : mtllibs) {
    if (auto kd = read_kd(base_dir / lib, first_material)) {
      mesh.base_color = *kd;
      break;
    }
  }
  return mesh;
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError(path.string(), 0, "file not found or unreadable");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_obj(ss.str(), path.string(), path.parent_path());
}

Mesh apply_transform(const Mesh& mesh, const Transform& t) {
  if (t.is_identity()) return mesh;
  Mesh out;
  out.triangles = mesh.triangles;
  out.base_color = mesh.base_color;
  out.vertices.reserve(mesh.vertices.size());
  out.normals.reserve(mesh.normals.size());
  for (const Vec3& v : mesh.vertices) out.vertices.push_back(t.apply_point(v));
  for (const Vec3& n : mesh.normals) out.normals.push_back(t.apply_normal(n));
  return out;
}

Aabb compute_aabb(const std::vector<Vec3>& points) {
  Aabb box{points.front(), points.front()};
  for (const Vec3& p : points) {
    box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
    box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
  }
  return box;
}

Aabb compute_aabb(const Mesh& mesh) { return compute_aabb(mesh.vertices); }

Aabb transformed_aabb(const Mesh& mesh, const Transform& t) {
  Vec3 first = t.apply_point(mesh.vertices.front());
  Aabb box{first, first};
  for (const Vec3& v : mesh.vertices) {
    const Vec3 p = t.apply_point(v);
    box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
    box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
  }
  return box;
}

}  // namespace synthseg
