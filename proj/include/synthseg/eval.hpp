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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthseg/coco_io.hpp"

namespace synthseg {

enum class IouKind { kBbox, kSegm };

const char* to_string(IouKind kind);

inline constexpr int kNumIouThresholds = 10;
inline constexpr int kNumRecallPoints = 101;
inline constexpr std::size_t kMaxDetectionsPerImage = 100;

/// 0.50, 0.55, ..., 0.95 (each the double nearest the decimal value).
std::array<double, kNumIouThresholds> iou_thresholds();

/// Intersection over union of two (x, y, w, h) boxes; 0 when the union is 0.
double iou_bbox(const Box& a, const Box& b);

/// Mask IoU computed by walking both run lists; masks are never decoded.
/// Both masks empty gives 0. Throws EvalError on a size mismatch.
double iou_mask(const RleMask& a, const RleMask& b);

/// Intersection pixel count of two run lists.
std::uint64_t rle_intersection(const RleMask& a, const RleMask& b);

/// Row-major detections x ground-truths IoU table.
struct IouMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  double at(std::size_t d, std::size_t g) const { return values[d * cols + g]; }
};

struct MatchResult {
  std::vector<int> matched_gt;  // per detection; -1 for a false positive
  std::size_t unmatched_gt = 0;

  bool is_tp(std::size_t det) const { return matched_gt[det] >= 0; }
};

/// Greedy matching. Rows must already be in descending score order. Each
/// detection takes the still-unmatched ground truth with the highest
/// IoU >= threshold (the lowest index among equal IoUs).
MatchResult match_by_iou(const IouMatrix& iou, double threshold);

IouMatrix compute_ious(std::span<const Detection> dets, std::span<const InstanceAnnotation> gts, IouKind kind);

/// match_by_iou over IoUs of the given kind.
MatchResult match_detections(std::span<const Detection> dets, std::span<const InstanceAnnotation> gts,
                             double threshold, IouKind kind);

struct ScoredLabel {
  double score = 0.0;
  bool true_positive = false;
};

/// Cumulative precision/recall over score-sorted detections plus the
/// 101-point interpolated precision (max precision at recall >= r).
struct PrCurve {
  std::vector<double> recall;
  std::vector<double> precision;
  std::array<double, kNumRecallPoints> interpolated{};
};

/// Labels are stable-sorted by descending score before accumulation.
PrCurve precision_recall(std::span<const ScoredLabel> labels, std::size_t total_gt);

/// Mean interpolated precision over the recall grid; empty when total_gt == 0.
std::optional<double> average_precision(std::span<const ScoredLabel> labels, std::size_t total_gt);

struct KindReport {
  std::optional<double> map;
  std::optional<double> ap50;
  std::optional<double> ap75;
  std::array<std::optional<double>, kNumIouThresholds> per_threshold{};
};

struct EvalReport {
  std::optional<KindReport> bbox;
  std::optional<KindReport> segm;

  /// bbox_mAP, bbox_mAP_50, bbox_mAP_75, segm_mAP, segm_mAP_50, segm_mAP_75
  std::array<std::optional<double>, 6> columns() const;
  static const std::array<const char*, 6>& column_names();
};

struct EvalOptions {
  bool bbox = true;
  bool segm = true;
};

/// COCO-style evaluation (all areas, maxDets 100, ten IoU thresholds).
/// Detections per (image, category) are stable-sorted by score and capped at
/// 100, then pooled in image-id order. Throws EvalError when segm is
/// requested and some detection has no mask.
EvalReport evaluate(const CocoDataset& gt, std::span<const Detection> dets, const EvalOptions& options = {});

/// Fixed-order, full-precision `name value` lines ("nan" when undefined).
std::string format_summary(const EvalReport& report);
/// Human table, 4 decimals.
std::string format_table(const EvalReport& report);

}  // namespace synthseg
