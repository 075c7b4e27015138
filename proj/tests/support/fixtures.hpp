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

#include "synthseg/coco_io.hpp"
#include "synthseg/geometry.hpp"
#include "synthseg/random.hpp"
#include "synthseg/rle.hpp"

namespace fixtures {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path source_dir();
std::filesystem::path asset_path(const std::string& name);

/// Writes a small generator config referencing the bundled models.
/// `extra` is appended verbatim (later keys override nothing; use it for
/// sections the base omits).
std::filesystem::path write_config(const std::filesystem::path& dir, int width, int height, std::uint64_t seed,
                                   const std::string& layout, int min_count, int max_count,
                                   const std::string& extra = "");

/// Axis-aligned quad in the plane z = `z`, facing +z, two triangles.
synthseg::Mesh quad_mesh(double x0, double y0, double x1, double y1, double z);

/// Random binary plane. Pixels outside [0, w-1) x [0, h-1) stay clear.
synthseg::BinaryMask random_blob(synthseg::Rng& rng, int w, int h);

/// Binary plane with independent Bernoulli(p) pixels.
synthseg::BinaryMask random_bits(synthseg::Rng& rng, int w, int h, double p);

/// Ground truth and detections for one randomized evaluator scenario:
/// at most 5 images, 4 ground-truth instances per image, 8 detections in
/// total, masks up to 64 x 64. The bottom-right pixel of every image is left
/// uncovered by all masks and boxes.
struct Scenario {
  synthseg::CocoDataset gt;
  std::vector<synthseg::Detection> dets;
};
Scenario random_scenario(synthseg::Rng& rng);

/// Dataset of `n` images, each with 0..2 small annotations.
synthseg::CocoDataset random_dataset(synthseg::Rng& rng, std::size_t n, int w = 24, int h = 24);

/// Annotation for a nonempty mask with tight bbox and popcount area.
synthseg::InstanceAnnotation annotation_for(const synthseg::BinaryMask& mask, std::int64_t id, std::int64_t image_id);

}  // namespace fixtures
