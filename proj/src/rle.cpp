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

#include "synthseg/rle.hpp"

#include <algorithm>

#include "synthseg/error.hpp"

namespace synthseg {

void validate_rle(const RleMask& rle) {
  if (rle.width <= 0 || rle.height <= 0) throw RleError("malformed RLE: non-positive size");
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < rle.counts.size(); ++i) {
    if (i > 0 && rle.counts[i] == 0) {
      throw RleError("malformed RLE: zero run at position " + std::to_string(i));
    }
    sum += rle.counts[i];
  }
  if (sum != rle.pixel_count()) {
    throw RleError("malformed RLE: counts sum to " + std::to_string(sum) + ", expected " +
                   std::to_string(rle.pixel_count()));
  }
}

RleMask encode_rle(const BinaryMask& mask) {
  RleMask rle{mask.width, mask.height, {}};
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (int x = 0; x < mask.width; ++x) {
    for (int y = 0; y < mask.height; ++y) {
      const std::uint8_t v = mask.at(x, y) ? 1 : 0;
      if (v != current) {
        rle.counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

BinaryMask decode_rle(const RleMask& rle) {
  validate_rle(rle);
  BinaryMask mask(rle.width, rle.height);
  std::uint64_t pos = 0;
  const auto h = static_cast<std::uint64_t>(rle.height);
  for (std::size_t i = 0; i < rle.counts.size(); ++i) {
    if (i % 2 == 1) {
      for (std::uint64_t p = pos; p < pos + rle.counts[i]; ++p) {
        mask.set(static_cast<int>(p / h), static_cast<int>(p % h));
      }
    }
    pos += rle.counts[i];
  }
  return mask;
}

std::uint64_t rle_area(const RleMask& rle) {
  std::uint64_t area = 0;
  for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

PixelBox mask_to_bbox(const BinaryMask& mask) {
  int min_x = mask.width, min_y = mask.height, max_x = -1, max_y = -1;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  if (max_x < 0) throw RleError("mask_to_bbox: empty mask");
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

PixelBox rle_to_bbox(const RleMask& rle) {
  validate_rle(rle);
  const auto h = static_cast<std::uint64_t>(rle.height);
  int min_x = rle.width, min_y = rle.height, max_x = -1, max_y = -1;
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < rle.counts.size(); ++i) {
    const std::uint64_t len = rle.counts[i];
    if (i % 2 == 1 && len > 0) {
      const std::uint64_t first = pos;
      const std::uint64_t last = pos + len - 1;
      const int x0 = static_cast<int>(first / h);
      const int x1 = static_cast<int>(last / h);
      min_x = std::min(min_x, x0);
      max_x = std::max(max_x, x1);
      if (x0 == x1) {
        min_y = std::min(min_y, static_cast<int>(first % h));
        max_y = std::max(max_y, static_cast<int>(last % h));
      } else {
        // The run wraps a column boundary, so it touches both the top and
        // the bottom rows.
        min_y = 0;
        max_y = rle.height - 1;
      }
    }
    pos += len;
  }
  if (max_x < 0) throw RleError("rle_to_bbox: empty mask");
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

std::string rle_to_compressed(const RleMask& rle) {
  std::string out;
  for (std::size_t i = 0; i < rle.counts.size(); ++i) {
    long long x = rle.counts[i];
    if (i > 2) x -= rle.counts[i - 2];
    bool more = true;
    while (more) {
      long long c = x & 0x1f;
      x >>= 5;
      more = (c & 0x10) ? x != -1 : x != 0;
      if (more) c |= 0x20;
      out.push_back(static_cast<char>(c + 48));
    }
  }
  return out;
}

RleMask rle_from_compressed(std::string_view s, int width, int height) {
  RleMask rle{width, height, {}};
  std::size_t p = 0;
  while (p < s.size()) {
    long long x = 0;
    int k = 0;
    bool more = true;
    while (more) {
      if (p >= s.size()) throw RleError("malformed RLE: truncated compressed counts");
      const long long c = static_cast<long long>(s[p]) - 48;
      if (c < 0 || c > 63) throw RleError("malformed RLE: invalid character in compressed counts");
      x |= (c & 0x1f) << (5 * k);
      more = (c & 0x20) != 0;
      ++p;
      ++k;
      if (!more && (c & 0x10)) x |= -1LL << (5 * k);
    }
    if (rle.counts.size() > 2) x += rle.counts[rle.counts.size() - 2];
    if (x < 0 || x > static_cast<long long>(UINT32_MAX)) throw RleError("malformed RLE: run length out of range");
    rle.counts.push_back(static_cast<std::uint32_t>(x));
  }
  validate_rle(rle);
  return rle;
}

}  // namespace synthseg
