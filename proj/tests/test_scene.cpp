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
#include <set>
#include <vector>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "synthseg/error.hpp"
#include "synthseg/scene.hpp"

using namespace synthseg;

namespace {

const std::vector<Mesh>& carcasses() {
  static const std::vector<Mesh> meshes = {load_mesh(fixtures::asset_path("carcass_a.obj")),
                                           load_mesh(fixtures::asset_path("carcass_b.obj"))};
  return meshes;
}

SceneSpec base_spec(LayoutMode mode, int lo, int hi, std::uint64_t seed) {
  SceneSpec s;
  s.model_paths = {fixtures::asset_path("carcass_a.obj"), fixtures::asset_path("carcass_b.obj")};
  s.layout_mode = mode;
  s.min_count = lo;
  s.max_count = hi;
  s.seed = seed;
  s.camera = default_top_camera(s.table_half_x, s.table_half_y, s.image_size);
  return s;
}

std::vector<Aabb> world_boxes(const SceneInstanceList& list) {
  std::vector<Aabb> out;
  for (const auto& inst : list.instances) out.push_back(transformed_aabb(carcasses()[inst.mesh_index], inst.transform));
  return out;
}

Aabb box(double x0, double y0, double z0, double x1, double y1, double z1) { return {{x0, y0, z0}, {x1, y1, z1}}; }

}  // namespace

TEST_CASE("single isolated instance rests on the table") {
  const auto list = sample_scene(base_spec(LayoutMode::kIsolated, 1, 1, 42), carcasses());
  REQUIRE(list.instances.size() == 1);
  CHECK(list.instances[0].instance_id == 1);
  CHECK(std::abs(world_boxes(list)[0].min.z) < 1e-12);
}

TEST_CASE("isolated footprints are pairwise disjoint by brute force") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto list = sample_scene(base_spec(LayoutMode::kIsolated, 3, 3, seed), carcasses());
    REQUIRE(list.instances.size() == 3);
    const auto boxes = world_boxes(list);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      for (std::size_t j = i + 1; j < boxes.size(); ++j) {
        const double w = std::min(boxes[i].max.x, boxes[j].max.x) - std::max(boxes[i].min.x, boxes[j].min.x);
        const double h = std::min(boxes[i].max.y, boxes[j].max.y) - std::max(boxes[i].min.y, boxes[j].min.y);
        CHECK((w <= 0.0 || h <= 0.0));
      }
    }
  }
}

TEST_CASE("isolated overlap bound holds for a positive ratio") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SceneSpec s = base_spec(LayoutMode::kIsolated, 6, 6, seed);
    s.max_footprint_overlap = 0.2;
    const auto boxes = world_boxes(sample_scene(s, carcasses()));
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      for (std::size_t j = i + 1; j < boxes.size(); ++j) CHECK(footprint_iou(boxes[i], boxes[j]) <= 0.2);
    }
  }
}

TEST_CASE("isolated placement reports exhaustion") {
  SceneSpec s = base_spec(LayoutMode::kIsolated, 8, 8, 1);
  s.table_half_x = s.table_half_y = 0.12;
  CHECK_THROWS_AS(sample_scene(s, carcasses()), SceneError);
}

TEST_CASE("sampling is a pure function of the spec") {
  for (LayoutMode mode : {LayoutMode::kIsolated, LayoutMode::kClustered, LayoutMode::kPiled}) {
    const SceneSpec s = base_spec(mode, 1, 8, 1234);
    CHECK(sample_scene(s, carcasses()) == sample_scene(s, carcasses()));
  }
}

TEST_CASE("different seeds give different layouts") {
  std::vector<SceneInstanceList> seen;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto list = sample_scene(base_spec(LayoutMode::kClustered, 1, 8, seed), carcasses());
    for (const auto& prev : seen) CHECK_FALSE(prev == list);
    seen.push_back(list);
  }
}

TEST_CASE("counts cover the range, ids are dense and footprints touch the table") {
  std::set<std::size_t> counts;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SceneSpec s = base_spec(seed % 2 ? LayoutMode::kClustered : LayoutMode::kPiled, 1, 8, seed);
    const auto list = sample_scene(s, carcasses());
    counts.insert(list.instances.size());
    for (std::size_t i = 0; i < list.instances.size(); ++i) CHECK(list.instances[i].instance_id == i + 1);
    for (const auto& b : world_boxes(list)) {
      CHECK(b.max.x >= -s.table_half_x);
      CHECK(b.min.x <= s.table_half_x);
      CHECK(b.max.y >= -s.table_half_y);
      CHECK(b.min.y <= s.table_half_y);
    }
  }
  CHECK(counts == std::set<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8});
}

TEST_CASE("tilt stays within the configured bound") {
  const SceneSpec s = base_spec(LayoutMode::kClustered, 8, 8, 99);
  for (const auto& inst : sample_scene(s, carcasses()).instances) {
    // Rotated +z may lean by at most pitch and roll combined.
    const Vec3 up = inst.transform.rotation.rotate({0, 0, 1});
    const double lean = std::acos(std::clamp(up.z, -1.0, 1.0));
    CHECK(lean <= deg_to_rad(2 * s.tilt_deg) + 1e-12);
  }
}

TEST_CASE("stack_heights: disjoint footprints rest on the table") {
  SceneInstanceList list;
  list.instances.resize(2);
  const std::vector<Aabb> boxes = {box(0, 0, 0.2, 1, 1, 0.5), box(2, 2, 0.4, 3, 3, 0.9)};
  const auto out = stack_heights(list, boxes);
  CHECK(out.instances[0].transform.translation.z == doctest::Approx(-0.2));
  CHECK(out.instances[1].transform.translation.z == doctest::Approx(-0.4));
}

TEST_CASE("stack_heights: identical cubes stack exactly") {
  SceneInstanceList list;
  list.instances.resize(2);
  const std::vector<Aabb> boxes = {box(0, 0, 0, 1, 1, 1), box(0, 0, 0, 1, 1, 1)};
  const auto out = stack_heights(list, boxes);
  CHECK(out.instances[0].transform.translation.z == 0.0);
  CHECK(out.instances[1].transform.translation.z == 1.0);
}

TEST_CASE("stack_heights: three overlapping boxes of heights 0.1, 0.2, 0.3") {
  // Hand simulation: first on the table (0), second on the first top (0.1),
  // third on the second top (0.1 + 0.2).
  SceneInstanceList list;
  list.instances.resize(3);
  const std::vector<Aabb> boxes = {box(0, 0, 0, 1, 1, 0.1), box(0.5, 0.5, 0, 1.5, 1.5, 0.2),
                                   box(0.2, 0.2, 0, 0.8, 0.8, 0.3)};
  const auto out = stack_heights(list, boxes);
  CHECK(out.instances[0].transform.translation.z == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(out.instances[1].transform.translation.z == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(out.instances[2].transform.translation.z == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("piled scenes never interpenetrate vertically") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto list = sample_scene(base_spec(LayoutMode::kPiled, 2, 8, seed), carcasses());
    const auto boxes = world_boxes(list);
    for (std::size_t j = 0; j < boxes.size(); ++j) {
      CHECK(boxes[j].min.z >= -1e-9);
      for (std::size_t i = 0; i < j; ++i) {
        if (!footprints_overlap(boxes[i], boxes[j])) continue;
        CHECK(boxes[j].min.z >= boxes[i].max.z - 1e-9);
      }
    }
  }
}

TEST_CASE("default top camera solves the frustum fit") {
  const CameraModel cam = default_top_camera(0.5, 0.5, {640, 640}, 60.0);
  // tan(30 deg) = 1/sqrt(3), so h = 0.525 * sqrt(3).
  const double expected = 0.525 * std::sqrt(3.0);
  CHECK(cam.eye.z == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(cam.eye.z - 0.909) < 1e-3);
  CHECK(cam.eye.x == 0.0);
  CHECK(cam.eye.y == 0.0);
  CHECK(cam.look_at == Vec3{0, 0, 0});
  CHECK(cam.up == Vec3{0, 1, 0});

  // Square table on a square image: the half-extent seen at the table plane
  // is the same on both axes.
  const double half_view = cam.eye.z * std::tan(deg_to_rad(30.0));
  CHECK(half_view / 0.5 == doctest::Approx(1.05));

  // Wide image: the vertical extent binds.
  const CameraModel wide = default_top_camera(0.5, 0.5, {1280, 640}, 60.0);
  CHECK(wide.eye.z == doctest::Approx(expected));
  const CameraModel tall = default_top_camera(0.5, 0.5, {320, 640}, 60.0);
  CHECK(tall.eye.z == doctest::Approx(2 * expected));
}

TEST_CASE("zero jitter keeps the view axis at -z") {
  Rng rng(3);
  const CameraModel cam = default_top_camera(0.5, 0.5, {64, 64});
  const CameraModel j = jitter_camera(cam, 0.0, rng);
  const Vec3 axis = j.look_at - j.eye;
  CHECK(axis.x == 0.0);
  CHECK(axis.y == 0.0);
  CHECK(axis.z < 0.0);
}

TEST_CASE("camera jitter stays within its bound") {
  Rng rng(8);
  const CameraModel cam = default_top_camera(0.5, 0.5, {64, 64});
  for (int i = 0; i < 200; ++i) {
    const CameraModel j = jitter_camera(cam, 10.0, rng);
    const Vec3 axis = normalized(j.look_at - j.eye);
    CHECK(std::acos(-axis.z) <= deg_to_rad(20.0) + 1e-12);
    CHECK(norm(j.eye - j.look_at) == doctest::Approx(norm(cam.eye - cam.look_at)));
  }
}

TEST_CASE("lights follow their ranges") {
  Rng rng(21);
  LightRanges r;
  std::set<std::size_t> counts;
  for (int i = 0; i < 500; ++i) {
    const LightSpec l = sample_lights(r, rng);
    counts.insert(l.directionals.size());
    CHECK(l.ambient >= 0.05);
    CHECK(l.ambient <= 0.25);
    for (const auto& d : l.directionals) {
      CHECK(std::abs(norm(d.direction) - 1.0) < 1e-12);
      CHECK(d.direction.z >= std::cos(deg_to_rad(50.0)) - 1e-12);
      CHECK(d.intensity >= 0.6);
      CHECK(d.intensity <= 1.4);
    }
  }
  CHECK(counts == std::set<std::size_t>{1, 2, 3});
}

TEST_CASE("invalid specs are rejected") {
  SceneSpec s = base_spec(LayoutMode::kClustered, 3, 2, 0);
  CHECK_THROWS_AS(validate_scene_spec(s), SceneError);
  s = base_spec(LayoutMode::kClustered, 0, 2, 0);
  CHECK_THROWS_AS(validate_scene_spec(s), SceneError);
  s = base_spec(LayoutMode::kClustered, 1, 2, 0);
  s.max_footprint_overlap = 1.5;
  CHECK_THROWS_AS(validate_scene_spec(s), SceneError);
  s = base_spec(LayoutMode::kClustered, 1, 2, 0);
  s.image_size = {8, 640};
  CHECK_THROWS_AS(validate_scene_spec(s), SceneError);
  s = base_spec(LayoutMode::kClustered, 1, 2, 0);
  s.camera.near = s.camera.far;
  CHECK_THROWS_AS(validate_scene_spec(s), SceneError);
  CHECK_THROWS_AS(layout_mode_from_string("stacked"), ConfigError);
}

TEST_CASE("plan_scene is deterministic") {
  const SceneSpec s = base_spec(LayoutMode::kPiled, 1, 8, 77);
  const ScenePlan a = plan_scene(s, carcasses());
  const ScenePlan b = plan_scene(s, carcasses());
  CHECK(a.instances == b.instances);
  CHECK(a.camera == b.camera);
  CHECK(a.lights == b.lights);
}
