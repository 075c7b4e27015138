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

#include "synthseg/config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "synthseg/error.hpp"
#include "synthseg/image_io.hpp"
#include "synthseg/random.hpp"

namespace synthseg {

using nlohmann::json;

namespace {

constexpr std::uint64_t kLayoutChoiceStream = 0x1A70;

template <typename T>
T get_or(const YAML::Node& node, const char* key, T fallback) {
  if (!node || !node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

Vec3 vec3_or(const YAML::Node& node, const char* key, Vec3 fallback) {
  if (!node || !node[key]) return fallback;
  const auto v = get_or<std::vector<double>>(node, key, {});
  if (v.size() != 3) throw ConfigError(std::string("config key '") + key + "' must have 3 numbers");
  return {v[0], v[1], v[2]};
}

std::pair<double, double> range_or(const YAML::Node& node, const char* key, std::pair<double, double> fallback) {
  if (!node || !node[key]) return fallback;
  const auto v = get_or<std::vector<double>>(node, key, {});
  if (v.size() != 2 || v[0] > v[1]) {
    throw ConfigError(std::string("config key '") + key + "' must be [min, max] with min <= max");
  }
  return {v[0], v[1]};
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

GeneratorConfig parse_generator_config(const std::string& yaml_text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping");

  GeneratorConfig cfg;
  SceneSpec& s = cfg.scene;
  s.seed = get_or<std::uint64_t>(root, "seed", 0);

  const YAML::Node image = root["image"];
  s.image_size = {get_or<int>(image, "width", 640), get_or<int>(image, "height", 640)};

  const YAML::Node models = root["models"];
  if (!models || !models.IsSequence() || models.size() == 0) {
    throw ConfigError("config key 'models' must list at least one OBJ path");
  }
  for (const auto& m : models) {
    std::filesystem::path p = m.as<std::string>();
    s.model_paths.push_back(p.is_absolute() ? p : base_dir / p);
  }

  const YAML::Node scene = root["scene"];
  const auto counts = range_or(scene, "count_range", {1.0, 8.0});
  s.min_count = static_cast<int>(counts.first);
  s.max_count = static_cast<int>(counts.second);
  if (scene && scene["layout_mode"]) {
    const YAML::Node lm = scene["layout_mode"];
    if (lm.IsSequence()) {
      for (const auto& x : lm) cfg.layout_modes.push_back(layout_mode_from_string(x.as<std::string>()));
    } else {
      cfg.layout_modes.push_back(layout_mode_from_string(lm.as<std::string>()));
    }
  }
  if (cfg.layout_modes.empty()) cfg.layout_modes.push_back(LayoutMode::kClustered);
  s.layout_mode = cfg.layout_modes.front();
  const auto extent = get_or<std::vector<double>>(scene, "table_extent", {0.5, 0.5});
  if (extent.size() != 2) throw ConfigError("config key 'table_extent' must be [half_x, half_y]");
  s.table_half_x = extent[0];
  s.table_half_y = extent[1];
  s.max_footprint_overlap = get_or<double>(scene, "max_footprint_overlap", 0.0);
  s.tilt_deg = get_or<double>(scene, "tilt_deg", 15.0);

  const YAML::Node camera = root["camera"];
  cfg.vertical_fov_deg = get_or<double>(camera, "vertical_fov_deg", 60.0);
  s.camera_jitter_deg = get_or<double>(camera, "jitter_deg", 10.0);
  s.camera = default_top_camera(s.table_half_x, s.table_half_y, s.image_size, cfg.vertical_fov_deg);
  if (camera && camera["eye"]) {
    cfg.explicit_camera = true;
    s.camera.eye = vec3_or(camera, "eye", s.camera.eye);
    s.camera.look_at = vec3_or(camera, "look_at", s.camera.look_at);
    s.camera.up = normalized(vec3_or(camera, "up", s.camera.up));
  }
  s.camera.near = get_or<double>(camera, "near", s.camera.near);
  s.camera.far = get_or<double>(camera, "far", s.camera.far);

  const YAML::Node lighting = root["lighting"];
  const auto lc = range_or(lighting, "count_range", {1.0, 3.0});
  s.lights.min_count = static_cast<int>(lc.first);
  s.lights.max_count = static_cast<int>(lc.second);
  s.lights.max_zenith_deg = get_or<double>(lighting, "max_zenith_deg", 50.0);
  const auto li = range_or(lighting, "intensity_range", {0.6, 1.4});
  s.lights.min_intensity = li.first;
  s.lights.max_intensity = li.second;
  const auto la = range_or(lighting, "ambient_range", {0.05, 0.25});
  s.lights.min_ambient = la.first;
  s.lights.max_ambient = la.second;
  s.lights.color = vec3_or(lighting, "color", {1.0, 1.0, 1.0});

  const YAML::Node render = root["render"];
  cfg.render.background = vec3_or(render, "background", {0.5, 0.5, 0.5});
  cfg.render.specular_strength = get_or<double>(render, "specular_strength", 0.2);
  cfg.render.shininess = get_or<double>(render, "shininess", 16.0);
  cfg.render.shadows = get_or<bool>(render, "shadows", false);
  cfg.render.shadow_map_size = get_or<int>(render, "shadow_map_size", 1024);
  cfg.render.supersample = get_or<bool>(render, "supersample", false);

  cfg.min_area = get_or<std::uint64_t>(root["annotation"], "min_area", 64);
  cfg.dump_id_png = get_or<bool>(root["output"], "dump_id_png", false);

  try {
    validate_scene_spec(s);
  } catch (const SceneError& e) {
    throw ConfigError(std::string("invalid scene configuration: ") + e.what());
  }
  if (cfg.render.shadow_map_size < 16) throw ConfigError("render.shadow_map_size must be >= 16");
  return cfg;
}

GeneratorConfig load_generator_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_generator_config(ss.str(), path.parent_path());
}

json config_to_json(const GeneratorConfig& cfg) {
  const SceneSpec& s = cfg.scene;
  json models = json::array();
  for (const auto& p : s.model_paths) {
    models.push_back(json{{"file", p.filename().string()}, {"sha256", sha256_hex(read_binary_file(p))}});
  }
  json modes = json::array();
  for (LayoutMode m : cfg.layout_modes) modes.push_back(to_string(m));
  return json{
      {"seed", s.seed},
      {"image", {{"width", s.image_size.width}, {"height", s.image_size.height}}},
      {"models", models},
      {"scene",
       {{"count_range", {s.min_count, s.max_count}},
        {"layout_mode", modes},
        {"table_extent", {s.table_half_x, s.table_half_y}},
        {"max_footprint_overlap", s.max_footprint_overlap},
        {"tilt_deg", s.tilt_deg}}},
      {"camera",
       {{"eye", vec_json(s.camera.eye)},
        {"look_at", vec_json(s.camera.look_at)},
        {"up", vec_json(s.camera.up)},
        {"vertical_fov_deg", s.camera.vertical_fov_deg},
        {"near", s.camera.near},
        {"far", s.camera.far},
        {"jitter_deg", s.camera_jitter_deg}}},
      {"lighting",
       {{"count_range", {s.lights.min_count, s.lights.max_count}},
        {"max_zenith_deg", s.lights.max_zenith_deg},
        {"intensity_range", {s.lights.min_intensity, s.lights.max_intensity}},
        {"ambient_range", {s.lights.min_ambient, s.lights.max_ambient}},
        {"color", vec_json(s.lights.color)}}},
      {"render",
       {{"background", vec_json(cfg.render.background)},
        {"specular_strength", cfg.render.specular_strength},
        {"shininess", cfg.render.shininess},
        {"shadows", cfg.render.shadows},
        {"shadow_map_size", cfg.render.shadow_map_size},
        {"supersample", cfg.render.supersample}}},
      {"annotation", {{"min_area", cfg.min_area}}},
      {"output", {{"dump_id_png", cfg.dump_id_png}}},
  };
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string sha256_hex(std::string_view bytes) {
  return sha256_hex(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

std::string config_hash(const json& config_json) { return sha256_hex(config_json.dump()); }

std::uint64_t image_seed(std::uint64_t master_seed, std::uint64_t index) { return derive_seed(master_seed, index); }

SceneSpec scene_for_image(const GeneratorConfig& config, std::uint64_t index) {
  SceneSpec spec = config.scene;
  spec.seed = image_seed(config.scene.seed, index);
  if (config.layout_modes.size() > 1) {
    Rng rng(derive_seed(spec.seed, kLayoutChoiceStream));
    spec.layout_mode = config.layout_modes[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(config.layout_modes.size()) - 1))];
  } else {
    spec.layout_mode = config.layout_modes.front();
  }
  return spec;
}

}  // namespace synthseg
