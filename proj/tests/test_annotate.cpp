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

#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "synthseg/annotate.hpp"

using namespace synthseg;

namespace {

FrameBuffers plane(int w, int h) { return FrameBuffers(w, h, 10.0); }

}  // namespace

TEST_CASE("all-background plane yields nothing") {
  const Extraction ex = extract_instances(plane(16, 16), 1, 1);
  CHECK(ex.annotations.empty());
  CHECK(ex.dropped.empty());
}

TEST_CASE("hand-placed L shape of 12 pixels") {
  FrameBuffers fb = plane(8, 8);
  // Vertical stroke x = 2, y = 1..6 (6 px) and foot y = 6, x = 3..8 -> 3..7 (5 px)
  // plus one pixel at (2, 7): 12 pixels in total.
  std::set<std::pair<int, int>> expected;
  for (int y = 1; y <= 7; ++y) expected.insert({2, y});
  for (int x = 3; x <= 7; ++x) expected.insert({x, 6});
  REQUIRE(expected.size() == 12);
  for (auto [x, y] : expected) fb.instance_id[fb.index(x, y)] = 3;

  const Extraction ex = extract_instances(fb, 9, 1);
  REQUIRE(ex.annotations.size() == 1);
  const InstanceAnnotation& a = ex.annotations[0];
  CHECK(a.annotation_id == 1);
  CHECK(a.image_id == 9);
  CHECK(a.category_id == 1);
  CHECK(a.area == 12);
  CHECK(a.bbox == PixelBox{2, 1, 6, 7});
  CHECK(ex.instance_ids == std::vector<std::uint32_t>{3});
  const auto decoded = oracle::decode_plane(a.segmentation);
  std::set<std::pair<int, int>> got;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      if (decoded[static_cast<std::size_t>(y) * 8 + x]) got.insert({x, y});
    }
  }
  CHECK(got == expected);
}

TEST_CASE("fully covered instance is reported as dropped") {
  FrameBuffers fb = plane(10, 10);
  std::fill(fb.instance_id.begin(), fb.instance_id.end(), 2u);
  const std::vector<std::uint32_t> scene = {1, 2};
  const Extraction ex = extract_instances(fb, 1, 1, scene);
  REQUIRE(ex.annotations.size() == 1);
  CHECK(ex.instance_ids[0] == 2);
  REQUIRE(ex.dropped.size() == 1);
  CHECK(ex.dropped[0] == DroppedInstance{1, 0});
}

TEST_CASE("slivers below min_area are dropped and counted") {
  FrameBuffers fb = plane(20, 20);
  for (int x = 0; x < 10; ++x) fb.instance_id[fb.index(x, 0)] = 1;   // 10 px
  for (int y = 5; y < 15; ++y) {
    for (int x = 5; x < 15; ++x) fb.instance_id[fb.index(x, y)] = 2;  // 100 px
  }
  const Extraction ex = extract_instances(fb, 1, 64);
  REQUIRE(ex.annotations.size() == 1);
  CHECK(ex.annotations[0].area == 100);
  CHECK(ex.annotations[0].annotation_id == 1);
  REQUIRE(ex.dropped.size() == 1);
  CHECK(ex.dropped[0] == DroppedInstance{1, 10});
}

TEST_CASE("random id planes partition exactly") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = static_cast<int>(rng.uniform_int(1, 48));
    const int h = static_cast<int>(rng.uniform_int(1, 48));
    FrameBuffers fb = plane(w, h);
    const auto k = static_cast<std::uint32_t>(rng.uniform_int(1, 6));
    for (auto& id : fb.instance_id) id = static_cast<std::uint32_t>(rng.uniform_int(0, k));
    const std::uint64_t min_area = static_cast<std::uint64_t>(rng.uniform_int(1, 40));
    const Extraction ex = extract_instances(fb, 5, min_area);

    // Brute-force per-id pixel counts.
    std::vector<std::uint64_t> count(k + 1, 0);
    for (auto id : fb.instance_id) ++count[id];
    std::size_t expected = 0;
    for (std::uint32_t id = 1; id <= k; ++id) expected += count[id] >= min_area ? 1 : 0;
    REQUIRE(ex.annotations.size() == expected);

    std::vector<std::uint8_t> covered(fb.instance_id.size(), 0);
    for (std::size_t i = 0; i < ex.annotations.size(); ++i) {
      const auto& a = ex.annotations[i];
      const std::uint32_t id = ex.instance_ids[i];
      CHECK(a.annotation_id == static_cast<std::int64_t>(i + 1));
      if (i > 0) CHECK(ex.instance_ids[i - 1] < id);
      const auto decoded = oracle::decode_plane(a.segmentation);
      std::uint64_t pop = 0;
      int x0 = w, y0 = h, x1 = -1, y1 = -1;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const std::size_t p = fb.index(x, y);
          CHECK(static_cast<bool>(decoded[p]) == (fb.instance_id[p] == id));
          if (!decoded[p]) continue;
          CHECK(covered[p] == 0);
          covered[p] = 1;
          ++pop;
          x0 = std::min(x0, x);
          y0 = std::min(y0, y);
          x1 = std::max(x1, x);
          y1 = std::max(y1, y);
        }
      }
      CHECK(a.area == pop);
      CHECK(a.bbox == PixelBox{x0, y0, x1 - x0 + 1, y1 - y0 + 1});
    }
    for (std::size_t p = 0; p < covered.size(); ++p) {
      const std::uint32_t id = fb.instance_id[p];
      CHECK(static_cast<bool>(covered[p]) == (id > 0 && count[id] >= min_area));
    }
  }
}
