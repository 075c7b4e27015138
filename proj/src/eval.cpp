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

#include "synthseg/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <unordered_map>

namespace synthseg {

namespace {

struct ImageCategoryKey {
  std::int64_t image_id;
  std::int64_t category_id;
  bool operator<(const ImageCategoryKey& o) const {
    return image_id != o.image_id ? image_id < o.image_id : category_id < o.category_id;
  }
};

std::optional<double> mean_defined(std::span<const std::optional<double>> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

KindReport evaluate_kind(const CocoDataset& gt, std::span<const Detection> dets, IouKind kind) {
  const auto thresholds = iou_thresholds();

  std::vector<std::int64_t> image_ids;
  for (const auto& im : gt.images) image_ids.push_back(im.id);
  std::sort(image_ids.begin(), image_ids.end());
  std::vector<std::int64_t> category_ids;
  for (const auto& c : gt.categories) category_ids.push_back(c.id);
  std::sort(category_ids.begin(), category_ids.end());

  std::map<ImageCategoryKey, std::vector<InstanceAnnotation>> gt_groups;
  std::vector<InstanceAnnotation> sorted_gt = gt.annotations;
  std::stable_sort(sorted_gt.begin(), sorted_gt.end(), [](const InstanceAnnotation& a, const InstanceAnnotation& b) {
    return a.annotation_id < b.annotation_id;
  });
  for (const auto& a : sorted_gt) gt_groups[{a.image_id, a.category_id}].push_back(a);
  std::map<ImageCategoryKey, std::vector<Detection>> det_groups;
  for (const auto& d : dets) det_groups[{d.image_id, d.category_id}].push_back(d);

  KindReport report;
  // per_category[c][t]
  std::vector<std::array<std::optional<double>, kNumIouThresholds>> per_category;
  for (std::int64_t cat : category_ids) {
    std::array<std::vector<ScoredLabel>, kNumIouThresholds> pooled;
    std::size_t total_gt = 0;
    for (std::int64_t img : image_ids) {
      const ImageCategoryKey key{img, cat};
      static const std::vector<InstanceAnnotation> kNoGt;
      static const std::vector<Detection> kNoDet;
      auto git = gt_groups.find(key);
      auto dit = det_groups.find(key);
      const auto& g = git == gt_groups.end() ? kNoGt : git->second;
      std::vector<Detection> d = dit == det_groups.end() ? kNoDet : dit->second;
      total_gt += g.size();
      if (d.empty()) continue;
      std::stable_sort(d.begin(), d.end(), [](const Detection& a, const Detection& b) { return a.score > b.score; });
      if (d.size() > kMaxDetectionsPerImage) d.resize(kMaxDetectionsPerImage);
      const IouMatrix iou = compute_ious(d, g, kind);
      for (int t = 0; t < kNumIouThresholds; ++t) {
        const MatchResult m = match_by_iou(iou, thresholds[t]);
        for (std::size_t i = 0; i < d.size(); ++i) pooled[t].push_back({d[i].score, m.is_tp(i)});
      }
    }
    std::array<std::optional<double>, kNumIouThresholds> ap{};
    for (int t = 0; t < kNumIouThresholds; ++t) ap[t] = average_precision(pooled[t], total_gt);
    per_category.push_back(ap);
  }

  std::vector<std::optional<double>> all;
  for (int t = 0; t < kNumIouThresholds; ++t) {
    std::vector<std::optional<double>> at_t;
    for (const auto& c : per_category) {
      at_t.push_back(c[t]);
      all.push_back(c[t]);
    }
    report.per_threshold[t] = mean_defined(at_t);
  }
  report.map = mean_defined(all);
  report.ap50 = report.per_threshold[0];
  report.ap75 = report.per_threshold[5];
  return report;
}

}  // namespace

const char* to_string(IouKind kind) { return kind == IouKind::kBbox ? "bbox" : "segm"; }

std::array<double, kNumIouThresholds> iou_thresholds() {
  std::array<double, kNumIouThresholds> t{};
  for (int i = 0; i < kNumIouThresholds; ++i) t[i] = static_cast<double>(50 + 5 * i) / 100.0;
  return t;
}

double iou_bbox(const Box& a, const Box& b) {
  const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::uint64_t rle_intersection(const RleMask& a, const RleMask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw EvalError("mask size mismatch: " + std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                    std::to_string(b.width) + "x" + std::to_string(b.height));
  }
  std::uint64_t inter = 0;
  std::size_t i = 0, j = 0;
  std::uint64_t ra = a.counts.empty() ? 0 : a.counts[0];
  std::uint64_t rb = b.counts.empty() ? 0 : b.counts[0];
  while (i < a.counts.size() && j < b.counts.size()) {
    const std::uint64_t step = std::min(ra, rb);
    if ((i & 1) && (j & 1)) inter += step;
    ra -= step;
    rb -= step;
    if (ra == 0 && ++i < a.counts.size()) ra = a.counts[i];
    if (rb == 0 && ++j < b.counts.size()) rb = b.counts[j];
  }
  return inter;
}

double iou_mask(const RleMask& a, const RleMask& b) {
  const std::uint64_t inter = rle_intersection(a, b);
  const std::uint64_t uni = rle_area(a) + rle_area(b) - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

MatchResult match_by_iou(const IouMatrix& iou, double threshold) {
  MatchResult r;
  r.matched_gt.assign(iou.rows, -1);
  std::vector<bool> taken(iou.cols, false);
  std::size_t matched = 0;
  for (std::size_t d = 0; d < iou.rows; ++d) {
    int best = -1;
    double best_iou = threshold;
    for (std::size_t g = 0; g < iou.cols; ++g) {
      if (taken[g]) continue;
      const double v = iou.at(d, g);
      if (v < threshold) continue;
      if (best < 0 || v > best_iou) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    if (best >= 0) {
      taken[static_cast<std::size_t>(best)] = true;
      r.matched_gt[d] = best;
      ++matched;
    }
  }
  r.unmatched_gt = iou.cols - matched;
  return r;
}

IouMatrix compute_ious(std::span<const Detection> dets, std::span<const InstanceAnnotation> gts, IouKind kind) {
  IouMatrix m{dets.size(), gts.size(), std::vector<double>(dets.size() * gts.size(), 0.0)};
  for (std::size_t d = 0; d < dets.size(); ++d) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      double v;
      if (kind == IouKind::kBbox) {
        v = iou_bbox(dets[d].bbox, to_box(gts[g].bbox));
      } else {
        if (!dets[d].segmentation) throw EvalError("segm IoU requested for a detection without a mask");
        v = iou_mask(*dets[d].segmentation, gts[g].segmentation);
      }
      m.values[d * m.cols + g] = v;
    }
  }
  return m;
}

MatchResult match_detections(std::span<const Detection> dets, std::span<const InstanceAnnotation> gts,
                             double threshold, IouKind kind) {
  return match_by_iou(compute_ious(dets, gts, kind), threshold);
}

PrCurve precision_recall(std::span<const ScoredLabel> labels, std::size_t total_gt) {
  std::vector<ScoredLabel> sorted(labels.begin(), labels.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });
  PrCurve curve;
  curve.recall.reserve(sorted.size());
  curve.precision.reserve(sorted.size());
  std::size_t tp = 0, fp = 0;
  for (const auto& l : sorted) {
    (l.true_positive ? tp : fp) += 1;
    curve.recall.push_back(total_gt > 0 ? static_cast<double>(tp) / static_cast<double>(total_gt) : 0.0);
    curve.precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }
  // Right-to-left running max makes precision nonincreasing in recall.
  std::vector<double> envelope = curve.precision;
  for (std::size_t i = envelope.size(); i > 1; --i) envelope[i - 2] = std::max(envelope[i - 2], envelope[i - 1]);
  for (int r = 0; r < kNumRecallPoints; ++r) {
    const double target = static_cast<double>(r) / 100.0;
    const auto it = std::lower_bound(curve.recall.begin(), curve.recall.end(), target);
    curve.interpolated[r] = it == curve.recall.end() ? 0.0 : envelope[static_cast<std::size_t>(it - curve.recall.begin())];
  }
  return curve;
}

std::optional<double> average_precision(std::span<const ScoredLabel> labels, std::size_t total_gt) {
  if (total_gt == 0) return std::nullopt;
  const PrCurve curve = precision_recall(labels, total_gt);
  double sum = 0.0;
  for (double p : curve.interpolated) sum += p;
  return sum / kNumRecallPoints;
}

std::array<std::optional<double>, 6> EvalReport::columns() const {
  std::array<std::optional<double>, 6> c{};
  if (bbox) {
    c[0] = bbox->map;
    c[1] = bbox->ap50;
    c[2] = bbox->ap75;
  }
  if (segm) {
    c[3] = segm->map;
    c[4] = segm->ap50;
    c[5] = segm->ap75;
  }
  return c;
}

const std::array<const char*, 6>& EvalReport::column_names() {
  static const std::array<const char*, 6> names = {"bbox_mAP", "bbox_mAP_50", "bbox_mAP_75",
                                                   "segm_mAP", "segm_mAP_50", "segm_mAP_75"};
  return names;
}

EvalReport evaluate(const CocoDataset& gt, std::span<const Detection> dets, const EvalOptions& options) {
  std::unordered_map<std::int64_t, bool> known;
  for (const auto& im : gt.images) known[im.id] = true;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (!known.count(dets[i].image_id)) {
      throw EvalError("detection " + std::to_string(i) + " references unknown image " +
                      std::to_string(dets[i].image_id));
    }
    if (options.segm && !dets[i].segmentation) {
      throw EvalError("segm evaluation requested but detection " + std::to_string(i) + " has no segmentation");
    }
  }
  EvalReport report;
  if (options.bbox) report.bbox = evaluate_kind(gt, dets, IouKind::kBbox);
  if (options.segm) report.segm = evaluate_kind(gt, dets, IouKind::kSegm);
  return report;
}

std::string format_summary(const EvalReport& report) {
  std::string out;
  const auto cols = report.columns();
  char buf[64];
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", *cols[i]);
    } else {
      std::snprintf(buf, sizeof(buf), "nan");
    }
    out += EvalReport::column_names()[i];
    out += ' ';
    out += buf;
    out += '\n';
  }
  return out;
}

std::string format_table(const EvalReport& report) {
  std::string header, values;
  const auto cols = report.columns();
  char buf[64];
  for (std::size_t i = 0; i < cols.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-13s", EvalReport::column_names()[i]);
    header += buf;
    if (cols[i]) {
      std::snprintf(buf, sizeof(buf), "%-13.4f", *cols[i]);
    } else {
      std::snprintf(buf, sizeof(buf), "%-13s", "-");
    }
    values += buf;
  }
  return header + "\n" + values + "\n";
}

}  // namespace synthseg
