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
#include <optional>
#include <span>
#include <vector>

#include "synthseg/geometry.hpp"
#include "synthseg/scene.hpp"

namespace synthseg {

/// Output planes of one render. Row-major, top-left origin.
///
/// Invariants: all planes are width x height; instance_id is 0 (background)
/// or an id of the rendered scene; depth equals `far_plane` exactly where
/// instance_id is 0 and lies in [near, far] elsewhere.
struct FrameBuffers {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 bytes per pixel
  std::vector<double> depth;      // view-space distance along the optical axis
  std::vector<std::uint32_t> instance_id;
  double far_plane = 0.0;

  FrameBuffers() = default;
  FrameBuffers(int w, int h, double far);

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  bool operator==(const FrameBuffers&) const = default;
};

struct RenderOptions {
  Vec3 background{0.5, 0.5, 0.5};
  double specular_strength = 0.2;
  double shininess = 16.0;
  bool shadows = false;
  int shadow_map_size = 1024;
  double shadow_bias = 0.003;  // meters
  bool supersample = false;    // 2x2 on the RGB plane only
};

/// Blinn-Phong shading of one surface point:
///   base * ambient + sum_i vis_i * I_i * color_i * (base * max(0, n.l_i)
///                    + ks * max(0, n.h_i)^shininess [n.l_i > 0])
/// clamped to [0, 1]. `light_visibility`, when non-empty, holds one factor
/// per directional light.
Vec3 shade_pixel(const Vec3& normal, const Vec3& view_dir, const LightSpec& lights,
                 const Vec3& base_color, double specular_strength = 0.2, double shininess = 16.0,
                 std::span<const double> light_visibility = {});

/// Pinhole camera mapping world points to continuous pixel coordinates.
/// Pixel (i, j) covers [i, i+1) x [j, j+1); its center is (i + 0.5, j + 0.5).
class CameraProjector {
 public:
  CameraProjector(const CameraModel& camera, ImageSize size);

  /// (right, up, depth) with depth > 0 in front of the camera.
  Vec3 to_view(const Vec3& world) const;
  /// Continuous pixel coordinates of a view-space point with depth > 0.
  std::pair<double, double> view_to_pixel(const Vec3& view) const;
  std::optional<std::pair<double, double>> project(const Vec3& world) const;

  const CameraModel& camera() const { return camera_; }
  ImageSize size() const { return size_; }

 private:
  CameraModel camera_;
  ImageSize size_;
  Vec3 right_, up_, back_;
  double tan_half_ = 1.0;
  double aspect_ = 1.0;
};

/// Z-buffered rasterization of the scene at pixel centers.
///
/// The surface that wins the depth test writes both its shaded color and its
/// instance id, so the id plane agrees with RGB visibility. Depth ties go to
/// the lower instance id. Triangles are clipped to the near plane; fragments
/// beyond `far` are discarded; zero-area triangles are skipped.
FrameBuffers rasterize(const SceneInstanceList& instances, std::span<const Mesh> meshes,
                       const CameraModel& camera, const LightSpec& lights, ImageSize image_size,
                       const RenderOptions& options = {});

}  // namespace synthseg
