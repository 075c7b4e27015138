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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "synthseg/geometry.hpp"
#include "synthseg/random.hpp"

namespace synthseg {

enum class LayoutMode { kIsolated, kClustered, kPiled };

const char* to_string(LayoutMode mode);
LayoutMode layout_mode_from_string(const std::string& name);

struct ImageSize {
  int width = 640;
  int height = 640;
  bool operator==(const ImageSize&) const = default;
};

struct CameraModel {
  Vec3 eye{0.0, 0.0, 1.0};
  Vec3 look_at{0.0, 0.0, 0.0};
  Vec3 up{0.0, 1.0, 0.0};
  double vertical_fov_deg = 60.0;
  double near = 0.05;
  double far = 10.0;
  bool operator==(const CameraModel&) const = default;
};

/// `direction` points from the surface toward the light.
struct DirectionalLight {
  Vec3 direction{0.0, 0.0, 1.0};
  double intensity = 1.0;
  Vec3 color{1.0, 1.0, 1.0};
  bool operator==(const DirectionalLight&) const = default;
};

struct LightSpec {
  std::vector<DirectionalLight> directionals;
  double ambient = 0.0;
  bool operator==(const LightSpec&) const = default;
};

/// Per-scene light randomization ranges.
struct LightRanges {
  int min_count = 1;
  int max_count = 3;
  double max_zenith_deg = 50.0;
  double min_intensity = 0.6;
  double max_intensity = 1.4;
  double min_ambient = 0.05;
  double max_ambient = 0.25;
  Vec3 color{1.0, 1.0, 1.0};
};

struct SceneSpec {
  std::vector<std::filesystem::path> model_paths;
  int min_count = 1;
  int max_count = 8;
  LayoutMode layout_mode = LayoutMode::kClustered;
  double table_half_x = 0.5;
  double table_half_y = 0.5;
  double max_footprint_overlap = 0.0;  // isolated mode only
  double tilt_deg = 15.0;
  double camera_jitter_deg = 10.0;
  LightRanges lights;
  CameraModel camera;
  ImageSize image_size;
  std::uint64_t seed = 0;
};

struct SceneInstance {
  std::uint32_t instance_id = 0;  // 1..n, 0 is background
  std::uint32_t mesh_index = 0;
  Transform transform;
  bool operator==(const SceneInstance&) const = default;
};

struct SceneInstanceList {
  std::vector<SceneInstance> instances;
  bool operator==(const SceneInstanceList&) const = default;
};

/// Everything the renderer needs for one frame.
struct ScenePlan {
  SceneInstanceList instances;
  CameraModel camera;
  LightSpec lights;
};

/// Throws SceneError on an invalid spec.
void validate_scene_spec(const SceneSpec& spec);

/// Ground-plane rectangle of a box: intersection area over union area.
double footprint_iou(const Aabb& a, const Aabb& b);
/// True when the ground-plane rectangles share positive area.
bool footprints_overlap(const Aabb& a, const Aabb& b);

/// Randomized layout of carcass instances; a pure function of `spec`.
///
/// Each instance receives a mesh drawn uniformly from `meshes`, a uniform yaw,
/// pitch and roll uniform in +-tilt_deg, and a position on the table that
/// depends on the layout mode. Every instance rests on the table (z = 0)
/// unless piled, in which case stack_heights decides the resting height.
/// Throws SceneError when isolated placement exhausts its rejection budget.
SceneInstanceList sample_scene(const SceneSpec& spec, std::span<const Mesh> meshes);

/// Loads spec.model_paths and samples.
SceneInstanceList sample_scene(const SceneSpec& spec);

/// Sequential Aabb stacking. `boxes[i]` is the world Aabb of instance i with
/// its current transform. Each instance is lifted (or lowered) so its bottom
/// rests on the highest top among earlier instances whose footprints overlap
/// it, or on z = 0 when none do.
SceneInstanceList stack_heights(const SceneInstanceList& instances, std::span<const Aabb> boxes);

/// Camera straight above the table center that fits the table with a 5%
/// margin on both axes.
CameraModel default_top_camera(double table_half_x, double table_half_y, ImageSize image_size,
                               double vertical_fov_deg = 60.0);

/// Orbits the eye about look_at by independent tilts in [-max_deg, max_deg]
/// around the world x and y axes.
CameraModel jitter_camera(const CameraModel& camera, double max_deg, Rng& rng);

LightSpec sample_lights(const LightRanges& ranges, Rng& rng);

/// Layout, lights and jittered camera for one scene.
ScenePlan plan_scene(const SceneSpec& spec, std::span<const Mesh> meshes);

}  // namespace synthseg
