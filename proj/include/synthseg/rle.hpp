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
#include <string>
#include <string_view>
#include <vector>

namespace synthseg {

/// Binary plane in row-major order, top-left origin.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, bool v = true) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  bool operator==(const BinaryMask&) const = default;
};

/// Uncompressed COCO run-length mask.
///
/// `counts` alternates runs of 0s and 1s over the column-major flattening,
/// starting with a (possibly empty) 0-run. Invariants: the counts sum to
/// width * height and only counts[0] may be zero.
struct RleMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> counts;

  std::uint64_t pixel_count() const { return static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height); }
  bool operator==(const RleMask&) const = default;
};

/// Tight pixel box, top-left origin.
struct PixelBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  bool operator==(const PixelBox&) const = default;
};

/// Throws RleError("malformed RLE: ...") if an invariant fails.
void validate_rle(const RleMask& rle);

RleMask encode_rle(const BinaryMask& mask);
BinaryMask decode_rle(const RleMask& rle);

/// Number of 1-pixels, read directly off the runs.
std::uint64_t rle_area(const RleMask& rle);

/// Tight box of the 1-pixels. Throws RleError on an empty mask.
PixelBox mask_to_bbox(const BinaryMask& mask);
PixelBox rle_to_bbox(const RleMask& rle);

/// COCO's compact string form of `counts` (the `counts` string pycocotools
/// emits for compressed RLE).
std::string rle_to_compressed(const RleMask& rle);
RleMask rle_from_compressed(std::string_view counts, int width, int height);

}  // namespace synthseg
