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
#include <span>
#include <vector>

#include "synthseg/render.hpp"
#include "synthseg/rle.hpp"

namespace synthseg {

inline constexpr std::int64_t kChickenCategoryId = 1;

/// Ground-truth record for one visible instance.
struct InstanceAnnotation {
  std::int64_t annotation_id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = kChickenCategoryId;
  RleMask segmentation;
  PixelBox bbox;
  std::uint64_t area = 0;
  bool operator==(const InstanceAnnotation&) const = default;
};

struct DroppedInstance {
  std::uint32_t instance_id = 0;
  std::uint64_t visible_pixels = 0;  // 0 when fully occluded
  bool operator==(const DroppedInstance&) const = default;
};

struct Extraction {
  std::vector<InstanceAnnotation> annotations;  // ordered by instance id
  std::vector<std::uint32_t> instance_ids;      // source instance of each annotation
  std::vector<DroppedInstance> dropped;         // below min_area or fully occluded
};

/// Visible-region annotations from an instance-id plane in one column-major
/// pass. Instances with fewer than `min_area` visible pixels are dropped.
/// `scene_ids`, when given, lets fully occluded instances be reported too.
/// Annotation ids are assigned 1..k in instance-id order.
Extraction extract_instances(const FrameBuffers& fb, std::int64_t image_id, std::uint64_t min_area,
                             std::span<const std::uint32_t> scene_ids = {});

}  // namespace synthseg
