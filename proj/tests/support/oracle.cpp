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

#include "support/oracle.hpp"

#include <algorithm>
#include <map>

namespace oracle {

using synthseg::CocoDataset;
using synthseg::Detection;
using synthseg::InstanceAnnotation;

std::vector<std::uint8_t> decode_plane(const synthseg::RleMask& rle) {
  std::vector<std::uint8_t> plane(static_cast<std::size_t>(rle.width) * rle.height, 0);
  std::size_t k = 0;  // column-major position
  for (std::size_t run = 0; run < rle.counts.size(); ++run) {
    for (std::uint32_t i = 0; i < rle.counts[run]; ++i, ++k) {
      const std::size_t x = k / static_cast<std::size_t>(rle.height);
      const std::size_t y = k % static_cast<std::size_t>(rle.height);
      plane[y * rle.width + x] = static_cast<std::uint8_t>(run % 2);
    }
  }
  return plane;
}

double plane_iou(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::uint64_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]) ? 1 : 0;
    uni += (a[i] || b[i]) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double box_iou(double ax, double ay, double aw, double ah, double bx, double by, double bw, double bh) {
  const double left = std::max(ax, bx);
  const double right = std::min(ax + aw, bx + bw);
  const double top = std::max(ay, by);
  const double bottom = std::min(ay + ah, by + bh);
  const double inter = (right > left && bottom > top) ? (right - left) * (bottom - top) : 0.0;
  const double uni = aw * ah + bw * bh - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::optional<double> naive_ap(std::vector<std::pair<double, bool>> pooled, std::size_t total_gt) {
  if (total_gt == 0) return std::nullopt;
  std::stable_sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> recall, precision;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    if (pooled[i].second) ++tp;
    recall.push_back(static_cast<double>(tp) / static_cast<double>(total_gt));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
  }
  double sum = 0.0;
  for (int r = 0; r <= 100; ++r) {
    const double target = r / 100.0;
    double best = 0.0;
    for (std::size_t i = 0; i < recall.size(); ++i) {
      if (recall[i] >= target) best = std::max(best, precision[i]);
    }
    sum += best;
  }
  return sum / 101.0;
}

namespace {

std::vector<std::optional<double>> per_threshold_ap(const CocoDataset& gt, std::span<const Detection> dets,
                                                    bool segm) {
  std::vector<std::int64_t> image_ids;
  for (const auto& im : gt.images) image_ids.push_back(im.id);
  std::sort(image_ids.begin(), image_ids.end());

  std::vector<std::optional<double>> out;
  for (int t = 0; t < 10; ++t) {
    const double threshold = (50 + 5 * t) / 100.0;
    std::vector<std::pair<double, bool>> pooled;
    std::size_t total_gt = 0;
    for (std::int64_t img : image_ids) {
      std::vector<const InstanceAnnotation*> g;
      for (const auto& a : gt.annotations) {
        if (a.image_id == img) g.push_back(&a);
      }
      std::stable_sort(g.begin(), g.end(), [](auto* a, auto* b) { return a->annotation_id < b->annotation_id; });
      total_gt += g.size();
      std::vector<const Detection*> d;
      for (const auto& x : dets) {
        if (x.image_id == img) d.push_back(&x);
      }
      std::stable_sort(d.begin(), d.end(), [](auto* a, auto* b) { return a->score > b->score; });
      if (d.size() > 100) d.resize(100);
      std::vector<bool> used(g.size(), false);
      for (const Detection* det : d) {
        int best = -1;
        double best_iou = -1.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
          if (used[j]) continue;
          double v;
          if (segm) {
            v = plane_iou(decode_plane(*det->segmentation), decode_plane(g[j]->segmentation));
          } else {
            v = box_iou(det->bbox.x, det->bbox.y, det->bbox.w, det->bbox.h, g[j]->bbox.x, g[j]->bbox.y,
                        g[j]->bbox.w, g[j]->bbox.h);
          }
          if (v >= threshold && v > best_iou) {
            best = static_cast<int>(j);
            best_iou = v;
          }
        }
        if (best >= 0) used[static_cast<std::size_t>(best)] = true;
        pooled.emplace_back(det->score, best >= 0);
      }
    }
    out.push_back(naive_ap(pooled, total_gt));
  }
  return out;
}

}  // namespace

std::array<std::optional<double>, 6> naive_evaluate(const CocoDataset& gt, std::span<const Detection> dets) {
  std::array<std::optional<double>, 6> cols{};
  for (int kind = 0; kind < 2; ++kind) {
    const auto ap = per_threshold_ap(gt, dets, kind == 1);
    if (!ap[0]) continue;
    double sum = 0.0;
    for (const auto& v : ap) sum += *v;
    cols[3 * kind] = sum / 10.0;
    cols[3 * kind + 1] = ap[0];
    cols[3 * kind + 2] = ap[5];
  }
  return cols;
}

}  // namespace oracle
