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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "synthseg/math.hpp"

namespace synthseg {

/// Triangle mesh of one carcass model, in meters.
///
/// Invariants: every triangle index < vertices.size(); one unit normal per
/// vertex; at least 3 vertices and 1 triangle.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  Vec3 base_color{0.92, 0.78, 0.66};
};

/// Similarity transform applied as scale * rotate(v) + translation.
struct Transform {
  Quaternion rotation;
  Vec3 translation;
  double scale = 1.0;

  static Transform identity() { return {}; }
  bool is_identity() const {
    return rotation.is_identity() && translation == Vec3{} && scale == 1.0;
  }
  Vec3 apply_point(const Vec3& v) const { return scale * rotation.rotate(v) + translation; }
  Vec3 apply_normal(const Vec3& n) const { return normalized(rotation.rotate(n)); }
  Transform inverse() const;
  bool operator==(const Transform&) const = default;
};

struct Aabb {
  Vec3 min;
  Vec3 max;

  Vec3 center() const { return (min + max) * 0.5; }
  Vec3 size() const { return max - min; }
  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.y >= min.y && p.z >= min.z && p.x <= max.x && p.y <= max.y &&
           p.z <= max.z;
  }
  bool operator==(const Aabb&) const = default;
};

/// Throws MeshError when an invariant of `mesh` is violated.
void validate_mesh(const Mesh& mesh);

/// Area-weighted per-vertex normals; isolated vertices get +z.
std::vector<Vec3> compute_vertex_normals(const std::vector<Vec3>& vertices,
                                         const std::vector<std::array<std::uint32_t, 3>>& triangles);

/// Loads a Wavefront OBJ file (v, vn, f; n-gons are fan-triangulated).
///
/// The diffuse tint is taken from the `Kd` of the first material referenced
/// through `mtllib`/`usemtl`, when that library is readable. Errors carry the
/// offending line number.
Mesh load_mesh(const std::filesystem::path& path);

/// Parses OBJ text; `source_name` is only used in error messages.
Mesh parse_obj(std::string_view text, const std::string& source_name,
               const std::filesystem::path& base_dir = {});

Mesh apply_transform(const Mesh& mesh, const Transform& t);

Aabb compute_aabb(const Mesh& mesh);
Aabb compute_aabb(const std::vector<Vec3>& points);

/// Aabb of `mesh` after `t`, without materializing the transformed mesh.
Aabb transformed_aabb(const Mesh& mesh, const Transform& t);

}  // namespace synthseg
