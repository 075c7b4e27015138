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

#include "support/fixtures.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace fixtures {

using synthseg::BinaryMask;
using synthseg::Rng;

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "synthseg-test-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path source_dir() { return SYNTHSEG_SOURCE_DIR; }

std::filesystem::path asset_path(const std::string& name) { return source_dir() / "assets" / name; }

std::filesystem::path write_config(const std::filesystem::path& dir, int width, int height, std::uint64_t seed,
                                   const std::string& layout, int min_count, int max_count,
                                   const std::string& extra) {
  const auto path = dir / "config.yaml";
  std::ofstream out(path);
  out << "seed: " << seed << "\n"
      << "image: {width: " << width << ", height: " << height << "}\n"
      << "models:\n"
      << "  - " << asset_path("carcass_a.obj").string() << "\n"
      << "  - " << asset_path("carcass_b.obj").string() << "\n"
      << "scene:\n"
      << "  count_range: [" << min_count << ", " << max_count << "]\n"
      << "  layout_mode: " << layout << "\n"
      << "annotation: {min_area: 16}\n"
      << extra;
  return path;
}

synthseg::Mesh quad_mesh(double x0, double y0, double x1, double y1, double z) {
  synthseg::Mesh m;
  m.vertices = {{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}};
  m.normals.assign(4, {0.0, 0.0, 1.0});
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

BinaryMask random_blob(Rng& rng, int w, int h) {
  BinaryMask m(w, h);
  const int x0 = static_cast<int>(rng.uniform_int(0, w - 2));
  const int y0 = static_cast<int>(rng.uniform_int(0, h - 2));
  const int x1 = static_cast<int>(rng.uniform_int(x0, w - 2));
  const int y1 = static_cast<int>(rng.uniform_int(y0, h - 2));
  const double keep = rng.uniform(0.6, 1.0);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (rng.uniform01() < keep) m.set(x, y);
    }
  }
  m.set(x0, y0);  // never empty
  return m;
}

BinaryMask random_bits(Rng& rng, int w, int h, double p) {
  BinaryMask m(w, h);
  for (auto& b : m.bits) b = rng.uniform01() < p ? 1 : 0;
  return m;
}

synthseg::InstanceAnnotation annotation_for(const BinaryMask& mask, std::int64_t id, std::int64_t image_id) {
  synthseg::InstanceAnnotation a;
  a.annotation_id = id;
  a.image_id = image_id;
  a.segmentation = synthseg::encode_rle(mask);
  a.bbox = synthseg::mask_to_bbox(mask);
  a.area = static_cast<std::uint64_t>(std::count(mask.bits.begin(), mask.bits.end(), 1));
  return a;
}

namespace {

// Shifted copy of `src` with a few flipped pixels, kept off the last row/column.
BinaryMask perturb(Rng& rng, const BinaryMask& src) {
  BinaryMask m(src.width, src.height);
  const int dx = static_cast<int>(rng.uniform_int(-2, 2));
  const int dy = static_cast<int>(rng.uniform_int(-2, 2));
  const double flip = rng.uniform(0.0, 0.15);
  bool any = false;
  for (int y = 0; y < src.height - 1; ++y) {
    for (int x = 0; x < src.width - 1; ++x) {
      const int sx = x - dx, sy = y - dy;
      bool v = sx >= 0 && sy >= 0 && sx < src.width && sy < src.height && src.at(sx, sy);
      if (rng.uniform01() < flip) v = !v;
      m.set(x, y, v);
      any = any || v;
    }
  }
  if (!any) m.set(0, 0);
  return m;
}

}  // namespace

Scenario random_scenario(Rng& rng) {
  Scenario s;
  s.gt.categories = synthseg::default_categories();
  const int n_images = static_cast<int>(rng.uniform_int(1, 5));
  // Distinct, shuffled image ids exercise ordering by id rather than position.
  std::vector<std::int64_t> ids(20);
  std::iota(ids.begin(), ids.end(), 1);
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    std::swap(ids[i], ids[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
  }
  std::vector<std::vector<BinaryMask>> gt_masks(n_images);
  std::int64_t next_ann = 1;
  for (int i = 0; i < n_images; ++i) {
    const int w = static_cast<int>(rng.uniform_int(4, 64));
    const int h = static_cast<int>(rng.uniform_int(4, 64));
    s.gt.images.push_back({ids[i], "img" + std::to_string(ids[i]) + ".png", w, h});
    const int n_gt = static_cast<int>(rng.uniform_int(0, 4));
    for (int g = 0; g < n_gt; ++g) {
      gt_masks[i].push_back(random_blob(rng, w, h));
      s.gt.annotations.push_back(annotation_for(gt_masks[i].back(), next_ann++, ids[i]));
    }
  }
  const int n_dets = static_cast<int>(rng.uniform_int(0, 8));
  const bool coarse_scores = rng.uniform01() < 0.5;  // coarse scores force ties
  for (int k = 0; k < n_dets; ++k) {
    const int i = static_cast<int>(rng.uniform_int(0, n_images - 1));
    const auto& im = s.gt.images[i];
    synthseg::Detection d;
    d.image_id = im.id;
    d.score = coarse_scores ? static_cast<double>(rng.uniform_int(1, 4)) / 4.0
                            : static_cast<double>(rng.uniform_int(1, 64)) / 64.0;
    BinaryMask mask = (!gt_masks[i].empty() && rng.uniform01() < 0.75)
                          ? perturb(rng, gt_masks[i][static_cast<std::size_t>(
                                             rng.uniform_int(0, static_cast<std::int64_t>(gt_masks[i].size()) - 1))])
                          : random_blob(rng, im.width, im.height);
    const synthseg::PixelBox pb = synthseg::mask_to_bbox(mask);
    d.bbox = synthseg::to_box(pb);
    if (rng.uniform01() < 0.5) {
      // Sub-pixel box jitter, kept inside [0, w-1) x [0, h-1).
      const double x = std::clamp(d.bbox.x + rng.uniform(-1.5, 1.5), 0.0, im.width - 1.5);
      const double y = std::clamp(d.bbox.y + rng.uniform(-1.5, 1.5), 0.0, im.height - 1.5);
      d.bbox = {x, y, std::clamp(d.bbox.w + rng.uniform(-1.5, 1.5), 0.5, im.width - 1.0 - x),
                std::clamp(d.bbox.h + rng.uniform(-1.5, 1.5), 0.5, im.height - 1.0 - y)};
    }
    d.segmentation = synthseg::encode_rle(mask);
    s.dets.push_back(std::move(d));
  }
  return s;
}

synthseg::CocoDataset random_dataset(Rng& rng, std::size_t n, int w, int h) {
  synthseg::CocoDataset d;
  d.categories = synthseg::default_categories();
  std::int64_t next_ann = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<std::int64_t>(i + 1);
    d.images.push_back({id, "im" + std::to_string(id) + ".png", w, h});
    const int k = static_cast<int>(rng.uniform_int(0, 2));
    for (int j = 0; j < k; ++j) d.annotations.push_back(annotation_for(random_blob(rng, w, h), next_ann++, id));
  }
  return d;
}

}  // namespace fixtures
