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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "synthseg/annotate.hpp"
#include "synthseg/error.hpp"

namespace synthseg {

struct ImageRecord {
  std::int64_t id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
  bool operator==(const ImageRecord&) const = default;
};

struct Category {
  std::int64_t id = 0;
  std::string name;
  bool operator==(const Category&) const = default;
};

struct CocoDataset {
  std::vector<ImageRecord> images;
  std::vector<InstanceAnnotation> annotations;
  std::vector<Category> categories;
  nlohmann::json info = nlohmann::json::object();
  bool operator==(const CocoDataset&) const = default;
};

/// Real-valued box (x, y, w, h), top-left origin.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  bool operator==(const Box&) const = default;
};

struct Detection {
  std::int64_t image_id = 0;
  std::int64_t category_id = kChickenCategoryId;
  double score = 0.0;
  Box bbox;
  std::optional<RleMask> segmentation;
  bool operator==(const Detection&) const = default;
};

struct Violation {
  std::string code;
  std::string message;
};

class DatasetError : public Error {
 public:
  explicit DatasetError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

inline constexpr std::size_t kMaxReportedViolations = 20;

/// Referential-integrity and mask checks; returns at most `limit` findings.
std::vector<Violation> find_violations(const CocoDataset& dataset, std::size_t limit = kMaxReportedViolations);

/// Throws DatasetError when find_violations reports anything.
void validate_dataset(const CocoDataset& dataset);

/// Single-category list used by generated datasets.
std::vector<Category> default_categories();

/// Canonical text: sorted keys, arrays in id order, one record per line.
/// Equal datasets serialize to identical bytes.
std::string serialize_dataset(const CocoDataset& dataset);
CocoDataset parse_dataset(std::string_view text, const std::string& source_name = "<memory>");

/// Validates, then writes serialize_dataset() atomically (temp file + rename).
void write_dataset(const CocoDataset& dataset, const std::filesystem::path& path);
CocoDataset read_dataset(const std::filesystem::path& path);

/// COCO results format: a JSON array of detections. Masks may use either
/// integer counts or the compressed string form. A missing bbox is derived
/// from the mask.
std::vector<Detection> parse_detections(std::string_view text, const CocoDataset& gt,
                                        const std::string& source_name = "<memory>");
std::vector<Detection> read_detections(const std::filesystem::path& path, const CocoDataset& gt);
std::string serialize_detections(std::span<const Detection> detections);

/// Ground truth rewritten as score-1 detections, in annotation order.
std::vector<Detection> dataset_as_detections(const CocoDataset& dataset);

Box to_box(const PixelBox& b);

/// Reads a whole file into memory. Throws IoError.
std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames over `path`.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace synthseg
