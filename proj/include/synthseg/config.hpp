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
#include <string>
#include <vector>

#include "json.hpp"
#include "synthseg/render.hpp"
#include "synthseg/scene.hpp"

namespace synthseg {

inline constexpr const char* kToolkitVersion = "1.0.0";

/// Everything `generate` and `preview` read from a config file.
struct GeneratorConfig {
  SceneSpec scene;                       // seed here is the master seed
  std::vector<LayoutMode> layout_modes;  // one is drawn per image
  double vertical_fov_deg = 60.0;
  bool explicit_camera = false;          // camera given verbatim in the file
  RenderOptions render;
  std::uint64_t min_area = 64;
  bool dump_id_png = false;
};

/// Parses a YAML config. Relative model paths resolve against the config's
/// directory. Throws ConfigError with the offending key.
GeneratorConfig load_generator_config(const std::filesystem::path& path);
GeneratorConfig parse_generator_config(const std::string& yaml_text, const std::filesystem::path& base_dir);

/// Canonical JSON form, including a content digest of every model file.
nlohmann::json config_to_json(const GeneratorConfig& config);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// Digest of the canonical config JSON.
std::string config_hash(const nlohmann::json& config_json);

/// Scene spec for image `index` (0-based): derived seed and per-image layout.
SceneSpec scene_for_image(const GeneratorConfig& config, std::uint64_t index);

/// Seed used for image `index` of a run with `master_seed`.
std::uint64_t image_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace synthseg
