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

#include "synthseg/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "synthseg/error.hpp"

namespace synthseg {

namespace {

constexpr std::uint64_t kLayoutStream = 0;
constexpr std::uint64_t kLightStream = 1;
constexpr std::uint64_t kCameraStream = 2;
constexpr int kMaxRejections = 1000;

double rect_intersection(const Aabb& a, const Aabb& b) {
  const double w = std::min(a.max.x, b.max.x) - std::max(a.min.x, b.min.x);
  const double h = std::min(a.max.y, b.max.y) - std::max(a.min.y, b.min.y);
  return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

bool on_table(const SceneSpec& spec, double x, double y) {
  return std::abs(x) <= spec.table_half_x && std::abs(y) <= spec.table_half_y;
}

}  // namespace

const char* to_string(LayoutMode mode) {
  switch (mode) {
    case LayoutMode::kIsolated:
      return "isolated";
    case LayoutMode::kClustered:
      return "clustered";
    case LayoutMode::kPiled:
      return "piled";
  }
  return "unknown";
}

LayoutMode layout_mode_from_string(const std::string& name) {
  if (name == "isolated") return LayoutMode::kIsolated;
  if (name == "clustered") return LayoutMode::kClustered;
  if (name == "piled") return LayoutMode::kPiled;
  throw ConfigError("unknown layout_mode '" + name + "' (expected isolated, clustered or piled)");
}

void validate_scene_spec(const SceneSpec& spec) {
  if (spec.model_paths.empty()) throw SceneError("scene needs at least one model path");
  if (spec.min_count < 1 || spec.min_count > spec.max_count) {
    throw SceneError("count_range must satisfy 1 <= min <= max");
  }
  if (!(spec.max_footprint_overlap >= 0.0 && spec.max_footprint_overlap <= 1.0)) {
    throw SceneError("max_footprint_overlap must lie in [0, 1]");
  }
  if (spec.image_size.width < 16 || spec.image_size.height < 16) {
    throw SceneError("image width and height must each be >= 16");
  }
  if (!(spec.table_half_x > 0.0 && spec.table_half_y > 0.0)) {
    throw SceneError("table extent must be positive");
  }
  const CameraModel& c = spec.camera;
  if (c.eye == c.look_at) throw SceneError("camera eye equals look_at");
  if (!(c.near > 0.0 && c.near < c.far)) throw SceneError("camera requires 0 < near < far");
  if (!(c.vertical_fov_deg > 0.0 && c.vertical_fov_deg < 180.0)) {
    throw SceneError("vertical_fov must lie in (0, 180) degrees");
  }
  const LightRanges& l = spec.lights;
  if (l.min_count < 0 || l.min_count > l.max_count) throw SceneError("invalid light count range");
  if (l.min_intensity < 0.0 || l.min_intensity > l.max_intensity) {
    throw SceneError("invalid light intensity range");
  }
  if (l.min_ambient < 0.0 || l.max_ambient > 1.0 || l.min_ambient > l.max_ambient) {
    throw SceneError("invalid ambient range");
  }
  if (l.max_count == 0 && l.max_ambient <= 0.0) {
    throw SceneError("lighting needs a directional light or positive ambient");
  }
}

double footprint_iou(const Aabb& a, const Aabb& b) {
  const double inter = rect_intersection(a, b);
  const double area_a = (a.max.x - a.min.x) * (a.max.y - a.min.y);
  const double area_b = (b.max.x - b.min.x) * (b.max.y - b.min.y);
  const double uni = area_a + area_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

bool footprints_overlap(const Aabb& a, const Aabb& b) { return rect_intersection(a, b) > 0.0; }

SceneInstanceList sample_scene(const SceneSpec& spec, std::span<const Mesh> meshes) {
  validate_scene_spec(spec);
  if (meshes.empty()) throw SceneError("no meshes loaded");
  Rng rng(derive_seed(spec.seed, kLayoutStream));

  const auto n = static_cast<int>(rng.uniform_int(spec.min_count, spec.max_count));
  const double tilt = deg_to_rad(spec.tilt_deg);

  SceneInstanceList out;
  std::vector<Aabb> placed;
  out.instances.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    SceneInstance inst;
    inst.instance_id = static_cast<std::uint32_t>(i + 1);
    inst.mesh_index = static_cast<std::uint32_t>(rng.uniform_int(0, static_cast<std::int64_t>(meshes.size()) - 1));
    const double yaw = rng.uniform(0.0, 2.0 * kPi);
    const double pitch = rng.uniform(-tilt, tilt);
    const double roll = rng.uniform(-tilt, tilt);
    inst.transform.rotation = Quaternion::from_axis_angle({0, 0, 1}, yaw) *
                              Quaternion::from_axis_angle({1, 0, 0}, pitch) *
                              Quaternion::from_axis_angle({0, 1, 0}, roll);
    const Mesh& mesh = meshes[inst.mesh_index];
    const Aabb local = transformed_aabb(mesh, inst.transform);
    const Vec3 c = local.center();

    auto place_at = [&](double x, double y) {
      inst.transform.translation = {x - c.x, y - c.y, -local.min.z};
      return Aabb{local.min + inst.transform.translation, local.max + inst.transform.translation};
    };

    Aabb box;
    if (spec.layout_mode == LayoutMode::kIsolated) {
      int rejections = 0;
      for (;;) {
        const double x = rng.uniform(-spec.table_half_x, spec.table_half_x);
        const double y = rng.uniform(-spec.table_half_y, spec.table_half_y);
        box = place_at(x, y);
        const bool ok = std::all_of(placed.begin(), placed.end(), [&](const Aabb& other) {
          return footprint_iou(box, other) <= spec.max_footprint_overlap;
        });
        if (ok) break;
        if (++rejections >= kMaxRejections) {
          throw SceneError("isolated placement gave up on instance " + std::to_string(i + 1) +
                           " of " + std::to_string(n) + " after " + std::to_string(kMaxRejections) +
                           " rejections; enlarge the table or raise max_footprint_overlap");
        }
      }
    } else {
      // Truncated Gaussian: redraw until the center lies on the table.
      double x = 0.0, y = 0.0;
      for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        x = 0.25 * spec.table_half_x * rng.normal();
        y = 0.25 * spec.table_half_y * rng.normal();
        if (on_table(spec, x, y)) break;
      }
      x = std::clamp(x, -spec.table_half_x, spec.table_half_x);
      y = std::clamp(y, -spec.table_half_y, spec.table_half_y);
      box = place_at(x, y);
    }
    placed.push_back(box);
    out.instances.push_back(inst);
  }

  if (spec.layout_mode == LayoutMode::kPiled) return stack_heights(out, placed);
  return out;
}

SceneInstanceList sample_scene(const SceneSpec& spec) {
  std::vector<Mesh> meshes;
  for (const auto& path : spec.model_paths) meshes.push_back(load_mesh(path));
  return sample_scene(spec, meshes);
}

SceneInstanceList stack_heights(const SceneInstanceList& instances, std::span<const Aabb> boxes) {
  if (boxes.size() != instances.instances.size()) {
    throw SceneError("stack_heights: one Aabb per instance required");
  }
  SceneInstanceList out = instances;
  std::vector<Aabb> settled;
  settled.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    double support = 0.0;
    for (const Aabb& below : settled) {
      if (footprints_overlap(boxes[i], below)) support = std::max(support, below.max.z);
    }
    const double dz = support - boxes[i].min.z;
    out.instances[i].transform.translation.z += dz;
    Aabb moved = boxes[i];
    moved.min.z = support;
    moved.max.z = boxes[i].max.z + dz;
    settled.push_back(moved);
  }
  return out;
}

CameraModel default_top_camera(double table_half_x, double table_half_y, ImageSize image_size,
                               double vertical_fov_deg) {
  const double tan_half = std::tan(deg_to_rad(vertical_fov_deg) / 2.0);
  const double aspect = static_cast<double>(image_size.width) / image_size.height;
  const double h_for_y = table_half_y * 1.05 / tan_half;
  const double h_for_x = table_half_x * 1.05 / (aspect * tan_half);
  const double height = std::max(h_for_x, h_for_y);
  CameraModel cam;
  cam.eye = {0.0, 0.0, height};
  cam.look_at = {0.0, 0.0, 0.0};
  cam.up = {0.0, 1.0, 0.0};
  cam.vertical_fov_deg = vertical_fov_deg;
  cam.near = 0.05 * height;
  cam.far = 3.0 * height;
  return cam;
}

CameraModel jitter_camera(const CameraModel& camera, double max_deg, Rng& rng) {
  const double max_rad = deg_to_rad(max_deg);
  const double about_x = rng.uniform(-max_rad, max_rad);
  const double about_y = rng.uniform(-max_rad, max_rad);
  if (max_deg == 0.0) return camera;
  const Quaternion q =
      Quaternion::from_axis_angle({1, 0, 0}, about_x) * Quaternion::from_axis_angle({0, 1, 0}, about_y);
  CameraModel out = camera;
  out.eye = camera.look_at + q.rotate(camera.eye - camera.look_at);
  return out;
}

LightSpec sample_lights(const LightRanges& ranges, Rng& rng) {
  LightSpec spec;
  const auto count = rng.uniform_int(ranges.min_count, ranges.max_count);
  const double cos_max = std::cos(deg_to_rad(ranges.max_zenith_deg));
  for (std::int64_t i = 0; i < count; ++i) {
    // Uniform over the spherical cap around +z.
    const double cos_t = rng.uniform(cos_max, 1.0);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    DirectionalLight light;
    light.direction = normalized(Vec3{sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t});
    light.intensity = rng.uniform(ranges.min_intensity, ranges.max_intensity);
    light.color = ranges.color;
    spec.directionals.push_back(light);
  }
  spec.ambient = rng.uniform(ranges.min_ambient, ranges.max_ambient);
  return spec;
}

ScenePlan plan_scene(const SceneSpec& spec, std::span<const Mesh> meshes) {
  ScenePlan plan;
  plan.instances = sample_scene(spec, meshes);
  Rng light_rng(derive_seed(spec.seed, kLightStream));
  plan.lights = sample_lights(spec.lights, light_rng);
  Rng camera_rng(derive_seed(spec.seed, kCameraStream));
  plan.camera = jitter_camera(spec.camera, spec.camera_jitter_deg, camera_rng);
  return plan;
}

}  // namespace synthseg
