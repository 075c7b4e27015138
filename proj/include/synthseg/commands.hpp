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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "synthseg/annotate.hpp"
#include "synthseg/coco_io.hpp"
#include "synthseg/config.hpp"
#include "synthseg/eval.hpp"
#include "synthseg/mixer.hpp"
#include "synthseg/render.hpp"
#include "synthseg/scene.hpp"

namespace synthseg {

/// Environment variable read when --jobs is not given.
inline constexpr const char* kJobsEnvVar = "SYNTHSEG_JOBS";

/// One rendered and annotated frame.
struct RenderedFrame {
  SceneSpec spec;
  ScenePlan plan;
  FrameBuffers frame;
  Extraction extraction;
};

/// Renders image `index` (0-based) of a run. Annotations carry image id
/// index + 1 and per-frame annotation ids 1..k.
RenderedFrame render_frame(const GeneratorConfig& config, std::span<const Mesh> meshes, std::uint64_t index);

std::vector<Mesh> load_meshes(const GeneratorConfig& config);

/// Worker count: explicit value, else the environment variable, else the
/// hardware concurrency (at least 1).
unsigned resolve_jobs(std::optional<unsigned> requested);

struct GenerateOptions {
  std::filesystem::path config_path;
  std::uint64_t count = 0;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::optional<unsigned> jobs;
  std::ostream* progress = nullptr;    // diagnostic stream, may be null
};

/// Writes images/NNNNNN.png, annotations.json, manifest.json and
/// generation_report.json under out_dir. Images whose cached sidecar and PNG
/// digest still verify are not re-rendered. Returns the manifest.
nlohmann::json run_generate(const GenerateOptions& options);

struct MixOptions {
  std::filesystem::path real_path;
  std::filesystem::path synthetic_path;
  std::vector<std::size_t> settings{0, 250, 500, 750, 1000};
  std::uint64_t seed = 0;
  SplitFractions fractions;
  std::filesystem::path out_dir;
};

/// Writes train_syn-N.json per setting, real_val.json, real_test.json and
/// mix_summary.json. All settings are checked against the pool before any
/// file is written. Returns the summary.
nlohmann::json run_mix(const MixOptions& options);

/// Summary lines followed by a blank line and the table.
std::string run_evaluate(const std::filesystem::path& gt_path, const std::filesystem::path& dets_path,
                         const EvalOptions& kinds);

/// Validation plus statistics of a dataset file. When `manifest_path` is
/// given, the stored config hash and image digests are verified as well.
/// Throws on any failed check.
nlohmann::json run_inspect(const std::filesystem::path& dataset_path,
                           const std::optional<std::filesystem::path>& manifest_path);

/// Color of an instance id in the false-color panel; id 0 is black.
std::array<std::uint8_t, 3> palette_color(std::uint32_t instance_id);

/// Side-by-side RGB and false-colored id planes of image 0 of a run with
/// `seed` (config seed when empty). Returns the PNG bytes after writing them.
std::vector<std::uint8_t> run_preview(const std::filesystem::path& config_path, std::optional<std::uint64_t> seed,
                                      const std::filesystem::path& out_file);

}  // namespace synthseg
