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

#include "synthseg/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "synthseg/error.hpp"

namespace synthseg {

namespace {

struct Point2 {
  double x;
  double y;
};

double edge(const Point2& a, const Point2& b, const Point2& p) {
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

// Top-left fill rule for counter-clockwise (positive edge function) triangles
// in y-down pixel space.
bool is_top_left(const Point2& a, const Point2& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

// Calls visit(x, y, b0, b1, b2) for every pixel center covered by the
// triangle, with screen-space barycentrics.
template <typename Visit>
void scan_triangle(Point2 p0, Point2 p1, Point2 p2, int width, int height, Visit&& visit) {
  double area = edge(p0, p1, p2);
  if (area == 0.0 || !std::isfinite(area)) return;
  bool swapped = false;
  if (area < 0.0) {
    std::swap(p1, p2);
    area = -area;
    swapped = true;
  }
  const double min_x = std::min({p0.x, p1.x, p2.x});
  const double max_x = std::max({p0.x, p1.x, p2.x});
  const double min_y = std::min({p0.y, p1.y, p2.y});
  const double max_y = std::max({p0.y, p1.y, p2.y});
  const int x0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
  const int x1 = std::min(width - 1, static_cast<int>(std::floor(max_x - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
  const int y1 = std::min(height - 1, static_cast<int>(std::floor(max_y - 0.5)));
  if (x0 > x1 || y0 > y1) return;

  const bool tl0 = is_top_left(p1, p2);
  const bool tl1 = is_top_left(p2, p0);
  const bool tl2 = is_top_left(p0, p1);
  const double inv_area = 1.0 / area;
  for (int y = y0; y <= y1; ++y) {
    const double py = y + 0.5;
    for (int x = x0; x <= x1; ++x) {
      const Point2 p{x + 0.5, py};
      const double w0 = edge(p1, p2, p);
      const double w1 = edge(p2, p0, p);
      const double w2 = edge(p0, p1, p);
      if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
      if ((w0 == 0.0 && !tl0) || (w1 == 0.0 && !tl1) || (w2 == 0.0 && !tl2)) continue;
      const double b0 = w0 * inv_area;
      const double b1 = w1 * inv_area;
      const double b2 = w2 * inv_area;
      if (swapped) {
        visit(x, y, b0, b2, b1);
      } else {
        visit(x, y, b0, b1, b2);
      }
    }
  }
}

struct ClipVertex {
  Vec3 view;
  Vec3 world;
  Vec3 normal;
};

ClipVertex lerp(const ClipVertex& a, const ClipVertex& b, double t) {
  return {a.view + (b.view - a.view) * t, a.world + (b.world - a.world) * t,
          a.normal + (b.normal - a.normal) * t};
}

// Sutherland-Hodgman against depth >= near; returns 0, 3 or 4 vertices.
int clip_near(const std::array<ClipVertex, 3>& in, double near, std::array<ClipVertex, 4>& out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const ClipVertex& a = in[i];
    const ClipVertex& b = in[(i + 1) % 3];
    const bool a_in = a.view.z >= near;
    const bool b_in = b.view.z >= near;
    if (a_in) out[n++] = a;
    if (a_in != b_in) {
      const double t = (near - a.view.z) / (b.view.z - a.view.z);
      ClipVertex c = lerp(a, b, t);
      c.view.z = near;
      out[n++] = c;
    }
  }
  return n < 3 ? 0 : n;
}

struct PreparedInstance {
  std::uint32_t id = 0;
  const Mesh* mesh = nullptr;
  std::vector<Vec3> world;
  std::vector<Vec3> normals;
};

struct GBuffer {
  int width;
  int height;
  std::vector<double> depth;
  std::vector<std::uint32_t> id;
  std::vector<Vec3> normal;
  std::vector<Vec3> position;

  GBuffer(int w, int h, double far)
      : width(w),
        height(h),
        depth(static_cast<std::size_t>(w) * h, far),
        id(static_cast<std::size_t>(w) * h, 0),
        normal(static_cast<std::size_t>(w) * h),
        position(static_cast<std::size_t>(w) * h) {}
};

void raster_pass(GBuffer& gb, const CameraProjector& proj, std::span<const PreparedInstance> scene) {
  const double near = proj.camera().near;
  const double far = proj.camera().far;
  for (const PreparedInstance& inst : scene) {
    std::vector<Vec3> view(inst.world.size());
    for (std::size_t i = 0; i < view.size(); ++i) view[i] = proj.to_view(inst.world[i]);

    for (const auto& tri : inst.mesh->triangles) {
      std::array<ClipVertex, 3> v;
      for (int k = 0; k < 3; ++k) v[k] = {view[tri[k]], inst.world[tri[k]], inst.normals[tri[k]]};
      if (v[0].view.z < near && v[1].view.z < near && v[2].view.z < near) continue;
      if (v[0].view.z > far && v[1].view.z > far && v[2].view.z > far) continue;

      std::array<ClipVertex, 4> poly;
      const int count = clip_near(v, near, poly);
      for (int f = 1; f + 1 < count; ++f) {
        const ClipVertex* c[3] = {&poly[0], &poly[f], &poly[f + 1]};
        Point2 s[3];
        double inv_d[3];
        for (int k = 0; k < 3; ++k) {
          const auto [px, py] = proj.view_to_pixel(c[k]->view);
          s[k] = {px, py};
          inv_d[k] = 1.0 / c[k]->view.z;
        }
        scan_triangle(s[0], s[1], s[2], gb.width, gb.height,
                      [&](int x, int y, double b0, double b1, double b2) {
                        // Perspective-correct interpolation through 1/depth.
                        const double w0 = b0 * inv_d[0];
                        const double w1 = b1 * inv_d[1];
                        const double w2 = b2 * inv_d[2];
                        const double sum = w0 + w1 + w2;
                        double d = 1.0 / sum;
                        if (d > far) return;
                        d = std::max(d, near);
                        const std::size_t idx = static_cast<std::size_t>(y) * gb.width + x;
                        const double cur = gb.depth[idx];
                        const std::uint32_t cur_id = gb.id[idx];
                        if (d < cur || (d == cur && (cur_id == 0 || inst.id < cur_id))) {
                          gb.depth[idx] = d;
                          gb.id[idx] = inst.id;
                          const double k0 = w0 / sum, k1 = w1 / sum, k2 = w2 / sum;
                          gb.position[idx] = c[0]->world * k0 + c[1]->world * k1 + c[2]->world * k2;
                          gb.normal[idx] = c[0]->normal * k0 + c[1]->normal * k1 + c[2]->normal * k2;
                        }
                      });
      }
    }
  }
}

// Orthographic depth map seen from one directional light.
class ShadowMap {
 public:
  ShadowMap(std::span<const PreparedInstance> scene, const Vec3& to_light, int size, double bias)
      : size_(size), bias_(bias) {
    forward_ = normalized(-to_light);
    const Vec3 helper = std::abs(forward_.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    right_ = normalized(cross(forward_, helper));
    up_ = cross(right_, forward_);

    double min_a = std::numeric_limits<double>::max(), max_a = -min_a;
    double min_b = min_a, max_b = -min_a;
    for (const auto& inst : scene) {
      for (const Vec3& p : inst.world) {
        const double a = dot(p, right_), b = dot(p, up_);
        min_a = std::min(min_a, a);
        max_a = std::max(max_a, a);
        min_b = std::min(min_b, b);
        max_b = std::max(max_b, b);
      }
    }
    const double pad = 1e-3;
    min_a_ = min_a - pad;
    min_b_ = min_b - pad;
    span_ = std::max(max_a - min_a, max_b - min_b) + 2.0 * pad;
    depth_.assign(static_cast<std::size_t>(size_) * size_, std::numeric_limits<double>::infinity());

    for (const auto& inst : scene) {
      for (const auto& tri : inst.mesh->triangles) {
        Point2 s[3];
        double d[3];
        for (int k = 0; k < 3; ++k) {
          const Vec3& p = inst.world[tri[k]];
          s[k] = to_map(p);
          d[k] = dot(p, forward_);
        }
        scan_triangle(s[0], s[1], s[2], size_, size_, [&](int x, int y, double b0, double b1, double b2) {
          const double z = b0 * d[0] + b1 * d[1] + b2 * d[2];
          double& cell = depth_[static_cast<std::size_t>(y) * size_ + x];
          cell = std::min(cell, z);
        });
      }
    }
  }

  double visibility(const Vec3& p) const {
    const Point2 s = to_map(p);
    const int x = static_cast<int>(std::floor(s.x));
    const int y = static_cast<int>(std::floor(s.y));
    if (x < 0 || y < 0 || x >= size_ || y >= size_) return 1.0;
    return dot(p, forward_) <= depth_[static_cast<std::size_t>(y) * size_ + x] + bias_ ? 1.0 : 0.0;
  }

 private:
  Point2 to_map(const Vec3& p) const {
    return {(dot(p, right_) - min_a_) / span_ * size_, (dot(p, up_) - min_b_) / span_ * size_};
  }

  int size_;
  double bias_;
  Vec3 forward_, right_, up_;
  double min_a_ = 0.0, min_b_ = 0.0, span_ = 1.0;
  std::vector<double> depth_;
};

std::uint8_t quantize(double c) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

// Linear RGB in [0,1] for every pixel of a G-buffer.
std::vector<Vec3> shade_gbuffer(const GBuffer& gb, const CameraProjector& proj,
                                std::span<const PreparedInstance> scene, const LightSpec& lights,
                                const RenderOptions& opt, const ShadowMap* shadow, std::size_t shadow_light) {
  std::vector<const Mesh*> mesh_of_id;
  for (const auto& inst : scene) {
    if (mesh_of_id.size() <= inst.id) mesh_of_id.resize(inst.id + 1, nullptr);
    mesh_of_id[inst.id] = inst.mesh;
  }
  std::vector<double> vis(lights.directionals.size(), 1.0);
  std::vector<Vec3> color(gb.id.size(), opt.background);
  const Vec3 eye = proj.camera().eye;
  for (std::size_t i = 0; i < gb.id.size(); ++i) {
    const std::uint32_t id = gb.id[i];
    if (id == 0) continue;
    const Vec3 p = gb.position[i];
    const Vec3 v = normalized(eye - p);
    Vec3 n = normalized(gb.normal[i]);
    if (dot(n, v) < 0.0) n = -n;
    if (shadow != nullptr) vis[shadow_light] = shadow->visibility(p);
    color[i] = shade_pixel(n, v, lights, mesh_of_id[id]->base_color, opt.specular_strength, opt.shininess,
                           shadow != nullptr ? std::span<const double>(vis) : std::span<const double>());
  }
  return color;
}

}  // namespace

FrameBuffers::FrameBuffers(int w, int h, double far)
    : width(w),
      height(h),
      rgb(static_cast<std::size_t>(w) * h * 3, 0),
      depth(static_cast<std::size_t>(w) * h, far),
      instance_id(static_cast<std::size_t>(w) * h, 0),
      far_plane(far) {}

Vec3 shade_pixel(const Vec3& normal, const Vec3& view_dir, const LightSpec& lights, const Vec3& base_color,
                 double specular_strength, double shininess, std::span<const double> light_visibility) {
  Vec3 c = base_color * lights.ambient;
  for (std::size_t i = 0; i < lights.directionals.size(); ++i) {
    const DirectionalLight& light = lights.directionals[i];
    const double vis = light_visibility.empty() ? 1.0 : light_visibility[i];
    if (vis <= 0.0) continue;
    const double ndotl = dot(normal, light.direction);
    if (ndotl <= 0.0) continue;
    const Vec3 radiance = light.color * (light.intensity * vis);
    c += hadamard(base_color, radiance) * ndotl;
    if (specular_strength > 0.0) {
      const Vec3 h = normalized(light.direction + view_dir);
      const double ndoth = std::max(0.0, dot(normal, h));
      c += radiance * (specular_strength * std::pow(ndoth, shininess));
    }
  }
  return {std::clamp(c.x, 0.0, 1.0), std::clamp(c.y, 0.0, 1.0), std::clamp(c.z, 0.0, 1.0)};
}

CameraProjector::CameraProjector(const CameraModel& camera, ImageSize size) : camera_(camera), size_(size) {
  const Vec3 forward = normalized(camera.look_at - camera.eye);
  right_ = normalized(cross(forward, camera.up));
  up_ = cross(right_, forward);
  back_ = -forward;
  tan_half_ = std::tan(deg_to_rad(camera.vertical_fov_deg) / 2.0);
  aspect_ = static_cast<double>(size.width) / size.height;
}

Vec3 CameraProjector::to_view(const Vec3& world) const {
  const Vec3 d = world - camera_.eye;
  // Right-handed view space looks down -z; store depth = -z as positive.
  return {dot(d, right_), dot(d, up_), -dot(d, back_)};
}

std::pair<double, double> CameraProjector::view_to_pixel(const Vec3& view) const {
  const double ndc_x = view.x / (view.z * tan_half_ * aspect_);
  const double ndc_y = view.y / (view.z * tan_half_);
  return {(ndc_x + 1.0) * 0.5 * size_.width, (1.0 - ndc_y) * 0.5 * size_.height};
}

std::optional<std::pair<double, double>> CameraProjector::project(const Vec3& world) const {
  const Vec3 v = to_view(world);
  if (!(v.z > 0.0)) return std::nullopt;
  return view_to_pixel(v);
}

FrameBuffers rasterize(const SceneInstanceList& instances, std::span<const Mesh> meshes,
                       const CameraModel& camera, const LightSpec& lights, ImageSize image_size,
                       const RenderOptions& options) {
  if (image_size.width <= 0 || image_size.height <= 0) throw Error("rasterize: image size must be positive");
  if (!(camera.near > 0.0 && camera.near < camera.far)) throw Error("rasterize: need 0 < near < far");

  std::vector<PreparedInstance> scene;
  scene.reserve(instances.instances.size());
  for (const SceneInstance& inst : instances.instances) {
    if (inst.instance_id == 0) throw Error("rasterize: instance id 0 is reserved for background");
    if (inst.mesh_index >= meshes.size()) throw Error("rasterize: mesh index out of range");
    PreparedInstance p;
    p.id = inst.instance_id;
    p.mesh = &meshes[inst.mesh_index];
    p.world.reserve(p.mesh->vertices.size());
    p.normals.reserve(p.mesh->normals.size());
    for (const Vec3& v : p.mesh->vertices) p.world.push_back(inst.transform.apply_point(v));
    for (const Vec3& n : p.mesh->normals) p.normals.push_back(inst.transform.apply_normal(n));
    scene.push_back(std::move(p));
  }

  std::optional<ShadowMap> shadow;
  std::size_t shadow_light = 0;
  if (options.shadows && !lights.directionals.empty() && !scene.empty()) {
    for (std::size_t i = 1; i < lights.directionals.size(); ++i) {
      if (lights.directionals[i].intensity > lights.directionals[shadow_light].intensity) shadow_light = i;
    }
    shadow.emplace(scene, lights.directionals[shadow_light].direction, options.shadow_map_size,
                   options.shadow_bias);
  }
  const ShadowMap* shadow_ptr = shadow ? &*shadow : nullptr;

  const CameraProjector proj(camera, image_size);
  GBuffer gb(image_size.width, image_size.height, camera.far);
  raster_pass(gb, proj, scene);

  FrameBuffers fb(image_size.width, image_size.height, camera.far);
  fb.depth = gb.depth;
  fb.instance_id = gb.id;

  std::vector<Vec3> color;
  if (options.supersample) {
    const ImageSize big{image_size.width * 2, image_size.height * 2};
    const CameraProjector proj2(camera, big);
    GBuffer gb2(big.width, big.height, camera.far);
    raster_pass(gb2, proj2, scene);
    const std::vector<Vec3> hi = shade_gbuffer(gb2, proj2, scene, lights, options, shadow_ptr, shadow_light);
    color.resize(fb.instance_id.size());
    for (int y = 0; y < image_size.height; ++y) {
      for (int x = 0; x < image_size.width; ++x) {
        const std::size_t r0 = static_cast<std::size_t>(2 * y) * big.width + 2 * x;
        const std::size_t r1 = r0 + big.width;
        color[fb.index(x, y)] = (hi[r0] + hi[r0 + 1] + hi[r1] + hi[r1 + 1]) * 0.25;
      }
    }
  } else {
    color = shade_gbuffer(gb, proj, scene, lights, options, shadow_ptr, shadow_light);
  }

  for (std::size_t i = 0; i < color.size(); ++i) {
    fb.rgb[3 * i + 0] = quantize(color[i].x);
    fb.rgb[3 * i + 1] = quantize(color[i].y);
    fb.rgb[3 * i + 2] = quantize(color[i].z);
  }
  return fb;
}

}  // namespace synthseg
