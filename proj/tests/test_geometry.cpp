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

#include <cmath>
#include <string>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "synthseg/error.hpp"
#include "synthseg/geometry.hpp"

using namespace synthseg;

namespace {

const char* kCubeObj = R"(# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
)";

Mesh cube() { return parse_obj(kCubeObj, "cube.obj"); }

int error_line(const std::string& text) {
  try {
    parse_obj(text, "bad.obj");
  } catch (const MeshError& e) {
    return e.line();
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    parse_obj(text, "bad.obj");
  } catch (const MeshError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal triangle parses") {
  const Mesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", "tri.obj");
  CHECK(m.vertices.size() == 3);
  CHECK(m.triangles.size() == 1);
  CHECK(m.normals.size() == 3);
  for (const auto& n : m.normals) CHECK(n.z == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cube parses with unit aabb") {
  const Mesh m = cube();
  CHECK(m.vertices.size() == 8);
  CHECK(m.triangles.size() == 12);
  const Aabb box = compute_aabb(m);
  CHECK(box.min == Vec3{0, 0, 0});
  CHECK(box.max == Vec3{1, 1, 1});
  validate_mesh(m);
  for (const auto& n : m.normals) CHECK(std::abs(norm(n) - 1.0) <= 1e-6);
}

TEST_CASE("quads are fan triangulated and negative indices resolve") {
  const Mesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf -4 -3 -2 -1\n", "quad.obj");
  REQUIRE(m.triangles.size() == 2);
  CHECK(m.triangles[0] == std::array<std::uint32_t, 3>{0, 1, 2});
  CHECK(m.triangles[1] == std::array<std::uint32_t, 3>{0, 2, 3});
}

TEST_CASE("slash face syntax and explicit normals") {
  const Mesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 2\nf 1//1 2//1 3//1\n", "n.obj");
  CHECK(m.normals[1].z == doctest::Approx(1.0));
}

TEST_CASE("errors carry line numbers") {
  const std::string cube_with_bad_index = std::string(kCubeObj) + "f 1 2 9\n";
  // 1 comment + 8 vertex + 12 face lines precede the bad face.
  CHECK(error_line(cube_with_bad_index) == 22);
  CHECK(error_text(cube_with_bad_index).find("index out of range") != std::string::npos);
  CHECK(error_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2\n").find("malformed face line") != std::string::npos);
  CHECK(error_line("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2\n") == 4);
  CHECK(error_text("v 0 0 0\nv 1 1 1\nv 2 2 2\nf 1 2 3\n").find("collinear") != std::string::npos);
  CHECK(error_text("v 0 0 0\nv 1 0 0\nv 0 1 0\n").find("no faces") != std::string::npos);
  CHECK_THROWS_AS(load_mesh("/nonexistent/carcass.obj"), MeshError);
}

TEST_CASE("bundled models load with their material tint") {
  const Mesh m = load_mesh(fixtures::asset_path("carcass_a.obj"));
  validate_mesh(m);
  CHECK(m.base_color.x == doctest::Approx(0.93));
  CHECK(m.base_color.y == doctest::Approx(0.80));
  const Aabb box = compute_aabb(m);
  const double length = box.max.x - box.min.x;
  CHECK(length > 0.25);
  CHECK(length < 0.36);
}

TEST_CASE("validate_mesh rejects broken invariants") {
  Mesh m = cube();
  m.triangles[0][1] = 99;
  CHECK_THROWS_AS(validate_mesh(m), MeshError);
  m = cube();
  m.normals[0] = {0.0, 0.0, 1.1};
  CHECK_THROWS_AS(validate_mesh(m), MeshError);
}

TEST_CASE("identity transform is bitwise identity") {
  Rng rng(7);
  Mesh m = cube();
  for (auto& v : m.vertices) v = {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
  const Mesh out = apply_transform(m, Transform::identity());
  CHECK(out.vertices == m.vertices);
  CHECK(out.normals == m.normals);
}

TEST_CASE("translation shifts aabb exactly") {
  Transform t;
  t.translation = {1, 2, 3};
  const Aabb box = compute_aabb(apply_transform(cube(), t));
  CHECK(box.min == Vec3{1, 2, 3});
  CHECK(box.max == Vec3{2, 3, 4});
}

TEST_CASE("90 degree rotation about z matches a rotation matrix") {
  Transform t;
  t.rotation = Quaternion::from_axis_angle({0, 0, 1}, kPi / 2);
  const Vec3 p = t.apply_point({1, 0, 0});
  // Rz(90) = [[0,-1,0],[1,0,0],[0,0,1]]
  const double c = std::cos(kPi / 2), s = std::sin(kPi / 2);
  const Vec3 expected{c * 1 - s * 0, s * 1 + c * 0, 0};
  CHECK(std::abs(p.x - expected.x) < 1e-9);
  CHECK(std::abs(p.y - expected.y) < 1e-9);
  CHECK(std::abs(p.z - expected.z) < 1e-9);
  CHECK(std::abs(p.y - 1.0) < 1e-9);
}

TEST_CASE("random rotations agree with matrix form") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Vec3 axis{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (norm(axis) < 1e-3) continue;
    axis = normalized(axis);
    const double a = rng.uniform(-kPi, kPi);
    const Vec3 v{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    // Rodrigues: v cos a + (k x v) sin a + k (k.v)(1 - cos a)
    const Vec3 kxv{axis.y * v.z - axis.z * v.y, axis.z * v.x - axis.x * v.z, axis.x * v.y - axis.y * v.x};
    const double kv = axis.x * v.x + axis.y * v.y + axis.z * v.z;
    const Vec3 expected{v.x * std::cos(a) + kxv.x * std::sin(a) + axis.x * kv * (1 - std::cos(a)),
                        v.y * std::cos(a) + kxv.y * std::sin(a) + axis.y * kv * (1 - std::cos(a)),
                        v.z * std::cos(a) + kxv.z * std::sin(a) + axis.z * kv * (1 - std::cos(a))};
    const Vec3 got = Quaternion::from_axis_angle(axis, a).rotate(v);
    CHECK(norm(got - expected) < 1e-12);
  }
}

TEST_CASE("transform then inverse restores vertices") {
  Rng rng(3);
  const Mesh m = load_mesh(fixtures::asset_path("carcass_b.obj"));
  for (int i = 0; i < 20; ++i) {
    Transform t;
    t.rotation = Quaternion::from_axis_angle(normalized({rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0}),
                                             rng.uniform(-3, 3));
    t.translation = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    t.scale = rng.uniform(0.5, 2.0);
    const Mesh back = apply_transform(apply_transform(m, t), t.inverse());
    for (std::size_t k = 0; k < m.vertices.size(); ++k) CHECK(norm(back.vertices[k] - m.vertices[k]) < 1e-6);
  }
}

TEST_CASE("aabb equals brute-force fold") {
  Rng rng(5);
  std::vector<Vec3> pts(100);
  for (auto& p : pts) p = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
  Vec3 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const Aabb box = compute_aabb(pts);
  CHECK(box.min == lo);
  CHECK(box.max == hi);
  for (const auto& p : pts) CHECK(box.contains(p));

  const Aabb point = compute_aabb(std::vector<Vec3>(3, Vec3{1.5, -2, 4}));
  CHECK(point.min == point.max);
}

TEST_CASE("transformed_aabb matches materialized transform") {
  const Mesh m = load_mesh(fixtures::asset_path("carcass_a.obj"));
  Transform t;
  t.rotation = Quaternion::from_axis_angle({0, 0, 1}, 0.7) * Quaternion::from_axis_angle({1, 0, 0}, 0.2);
  t.translation = {0.1, -0.2, 0.3};
  const Aabb a = transformed_aabb(m, t);
  const Aabb b = compute_aabb(apply_transform(m, t));
  CHECK(norm(a.min - b.min) < 1e-12);
  CHECK(norm(a.max - b.max) < 1e-12);
}
