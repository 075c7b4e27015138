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

#include "synthseg/annotate.hpp"

#include <algorithm>

namespace synthseg {

namespace {

struct RunBuilder {
  std::vector<std::uint32_t> counts;
  std::uint64_t end = 0;  // column-major position just past the last 1-pixel
  std::uint64_t area = 0;
  int min_x = 0, max_x = 0, min_y = 0, max_y = 0;

  void add(std::uint64_t pos, int x, int y) {
    if (area == 0) {
      counts.push_back(static_cast<std::uint32_t>(pos));
      counts.push_back(1);
      min_x = max_x = x;
      min_y = max_y = y;
    } else {
      if (pos == end) {
        ++counts.back();
      } else {
        counts.push_back(static_cast<std::uint32_t>(pos - end));
        counts.push_back(1);
      }
      // Columns arrive in order, so only max_x can grow.
      max_x = x;
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
    end = pos + 1;
    ++area;
  }
};

}  // namespace

Extraction extract_instances(const FrameBuffers& fb, std::int64_t image_id, std::uint64_t min_area,
                             std::span<const std::uint32_t> scene_ids) {
  std::uint32_t max_id = 0;
  for (std::uint32_t id : fb.instance_id) max_id = std::max(max_id, id);
  std::vector<RunBuilder> runs(static_cast<std::size_t>(max_id) + 1);

  const auto h = static_cast<std::uint64_t>(fb.height);
  for (int x = 0; x < fb.width; ++x) {
    for (int y = 0; y < fb.height; ++y) {
      const std::uint32_t id = fb.instance_id[fb.index(x, y)];
      if (id != 0) runs[id].add(static_cast<std::uint64_t>(x) * h + static_cast<std::uint64_t>(y), x, y);
    }
  }

  const std::uint64_t total = static_cast<std::uint64_t>(fb.width) * h;
  Extraction out;
  std::int64_t next_id = 1;
  for (std::uint32_t id = 1; id <= max_id; ++id) {
    RunBuilder& r = runs[id];
    if (r.area == 0) continue;
    if (r.area < min_area) {
      out.dropped.push_back({id, r.area});
      continue;
    }
    if (r.end < total) r.counts.push_back(static_cast<std::uint32_t>(total - r.end));
    InstanceAnnotation ann;
    ann.annotation_id = next_id++;
    ann.image_id = image_id;
    ann.segmentation = RleMask{fb.width, fb.height, std::move(r.counts)};
    ann.bbox = {r.min_x, r.min_y, r.max_x - r.min_x + 1, r.max_y - r.min_y + 1};
    ann.area = r.area;
    out.annotations.push_back(std::move(ann));
    out.instance_ids.push_back(id);
  }
  for (std::uint32_t id : scene_ids) {
    if (id == 0) continue;
    if (id > max_id || runs[id].area == 0) out.dropped.push_back({id, 0});
  }
  std::sort(out.dropped.begin(), out.dropped.end(),
            [](const DroppedInstance& a, const DroppedInstance& b) { return a.instance_id < b.instance_id; });
  return out;
}

}  // namespace synthseg
