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

#include "synthseg/coco_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace synthseg {

using nlohmann::json;

namespace {

std::string join_violations(const std::vector<Violation>& v) {
  std::string msg = "dataset has " + std::to_string(v.size()) + " integrity violation(s)";
  for (const auto& x : v) msg += "\n  [" + x.code + "] " + x.message;
  return msg;
}

json annotation_to_json(const InstanceAnnotation& a) {
  json seg;
  seg["size"] = {a.segmentation.height, a.segmentation.width};
  seg["counts"] = a.segmentation.counts;
  return json{{"id", a.annotation_id},
              {"image_id", a.image_id},
              {"category_id", a.category_id},
              {"segmentation", seg},
              {"area", a.area},
              {"bbox", {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h}},
              {"iscrowd", 0}};
}

json image_to_json(const ImageRecord& im) {
  return json{{"id", im.id}, {"file_name", im.file_name}, {"width", im.width}, {"height", im.height}};
}

// Reads COCO `segmentation` into an RLE of the given image size. Polygons are
// not supported.
RleMask segmentation_from_json(const json& seg) {
  if (!seg.is_object()) throw Error("segmentation must be an RLE object (polygons are not supported)");
  const auto& size = seg.at("size");
  if (!size.is_array() || size.size() != 2) throw Error("segmentation.size must be [height, width]");
  const int h = size[0].get<int>();
  const int w = size[1].get<int>();
  const auto& counts = seg.at("counts");
  if (counts.is_string()) return rle_from_compressed(counts.get<std::string>(), w, h);
  RleMask rle{w, h, {}};
  rle.counts.reserve(counts.size());
  for (const auto& c : counts) {
    const auto v = c.get<std::int64_t>();
    if (v < 0 || v > static_cast<std::int64_t>(UINT32_MAX)) throw Error("segmentation count out of range");
    rle.counts.push_back(static_cast<std::uint32_t>(v));
  }
  return rle;
}

template <typename T>
void sort_by_id(std::vector<T>& v, auto key) {
  std::stable_sort(v.begin(), v.end(), [&](const T& a, const T& b) { return key(a) < key(b); });
}

json parse_json(std::string_view text, const std::string& source_name) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw IoError(source_name + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

}  // namespace

DatasetError::DatasetError(std::vector<Violation> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

std::vector<Category> default_categories() { return {{kChickenCategoryId, "chicken"}}; }

std::vector<Violation> find_violations(const CocoDataset& d, std::size_t limit) {
  std::vector<Violation> out;
  auto report = [&](std::string code, std::string message) {
    if (out.size() < limit) out.push_back({std::move(code), std::move(message)});
  };

  std::unordered_map<std::int64_t, const ImageRecord*> images;
  for (const auto& im : d.images) {
    if (!images.emplace(im.id, &im).second) report("duplicate-image-id", "image id " + std::to_string(im.id));
    if (im.width <= 0 || im.height <= 0) {
      report("invalid-image-size", "image " + std::to_string(im.id) + " has non-positive size");
    }
  }
  std::unordered_set<std::int64_t> categories;
  for (const auto& c : d.categories) {
    if (!categories.insert(c.id).second) report("duplicate-category-id", "category id " + std::to_string(c.id));
  }
  std::unordered_set<std::int64_t> ann_ids;
  for (const auto& a : d.annotations) {
    const std::string tag = "annotation " + std::to_string(a.annotation_id);
    if (!ann_ids.insert(a.annotation_id).second) report("duplicate-annotation-id", tag);
    auto it = images.find(a.image_id);
    if (it == images.end()) {
      report("dangling-image-id", tag + " references missing image " + std::to_string(a.image_id));
    }
    if (!categories.count(a.category_id)) {
      report("dangling-category-id", tag + " references missing category " + std::to_string(a.category_id));
    }
    const RleMask& rle = a.segmentation;
    std::uint64_t sum = 0;
    bool interior_zero = false;
    for (std::size_t i = 0; i < rle.counts.size(); ++i) {
      sum += rle.counts[i];
      if (i > 0 && rle.counts[i] == 0) interior_zero = true;
    }
    if (rle.width <= 0 || rle.height <= 0 || sum != rle.pixel_count()) {
      report("rle-length-mismatch", tag + ": counts sum " + std::to_string(sum) + " != " +
                                        std::to_string(rle.width) + "x" + std::to_string(rle.height));
      continue;
    }
    if (interior_zero) {
      report("rle-zero-run", tag + ": zero-length run after the first count");
      continue;
    }
    if (it != images.end() && (rle.width != it->second->width || rle.height != it->second->height)) {
      report("rle-size-mismatch", tag + ": mask size differs from image " + std::to_string(a.image_id));
    }
    const std::uint64_t area = rle_area(rle);
    if (area == 0) {
      report("empty-mask", tag + ": mask has no pixels");
      continue;
    }
    if (area != a.area) {
      report("area-mismatch", tag + ": area " + std::to_string(a.area) + " != mask pixels " + std::to_string(area));
    }
    if (rle_to_bbox(rle) != a.bbox) report("bbox-mismatch", tag + ": bbox is not the tight mask box");
  }
  return out;
}

void validate_dataset(const CocoDataset& dataset) {
  auto v = find_violations(dataset);
  if (!v.empty()) throw DatasetError(std::move(v));
}

std::string serialize_dataset(const CocoDataset& dataset) {
  std::vector<ImageRecord> images = dataset.images;
  std::vector<InstanceAnnotation> anns = dataset.annotations;
  std::vector<Category> cats = dataset.categories;
  sort_by_id(images, [](const ImageRecord& x) { return x.id; });
  sort_by_id(anns, [](const InstanceAnnotation& x) { return x.annotation_id; });
  sort_by_id(cats, [](const Category& x) { return x.id; });

  std::string out = "{\n";
  auto emit_array = [&out](const char* key, const std::vector<json>& items, bool last) {
    out += "\"";
    out += key;
    out += "\": [";
    for (std::size_t i = 0; i < items.size(); ++i) {
      out += i == 0 ? "\n" : ",\n";
      out += items[i].dump();
    }
    out += items.empty() ? "]" : "\n]";
    out += last ? "\n" : ",\n";
  };
  std::vector<json> items;
  for (const auto& a : anns) items.push_back(annotation_to_json(a));
  emit_array("annotations", items, false);
  items.clear();
  for (const auto& c : cats) items.push_back(json{{"id", c.id}, {"name", c.name}});
  emit_array("categories", items, false);
  items.clear();
  for (const auto& im : images) items.push_back(image_to_json(im));
  emit_array("images", items, false);
  out += "\"info\": " + dataset.info.dump() + "\n}\n";
  return out;
}

CocoDataset parse_dataset(std::string_view text, const std::string& source_name) {
  const json root = parse_json(text, source_name);
  if (!root.is_object()) throw IoError(source_name + ": top-level value must be an object");

  CocoDataset d;
  std::vector<Violation> schema;
  auto schema_error = [&](const std::string& what, const std::exception& e) {
    if (schema.size() < kMaxReportedViolations) schema.push_back({"schema", what + ": " + e.what()});
  };

  if (root.contains("images")) {
    std::size_t i = 0;
    for (const auto& j : root.at("images")) {
      try {
        d.images.push_back({j.at("id").get<std::int64_t>(), j.value("file_name", std::string()),
                            j.at("width").get<int>(), j.at("height").get<int>()});
      } catch (const std::exception& e) {
        schema_error("images[" + std::to_string(i) + "]", e);
      }
      ++i;
    }
  }
  if (root.contains("categories")) {
    std::size_t i = 0;
    for (const auto& j : root.at("categories")) {
      try {
        d.categories.push_back({j.at("id").get<std::int64_t>(), j.value("name", std::string())});
      } catch (const std::exception& e) {
        schema_error("categories[" + std::to_string(i) + "]", e);
      }
      ++i;
    }
  }
  if (root.contains("annotations")) {
    std::size_t i = 0;
    for (const auto& j : root.at("annotations")) {
      try {
        InstanceAnnotation a;
        a.annotation_id = j.at("id").get<std::int64_t>();
        a.image_id = j.at("image_id").get<std::int64_t>();
        a.category_id = j.at("category_id").get<std::int64_t>();
        const auto& seg = j.at("segmentation");
        if (!seg.is_object()) throw Error("segmentation must be an RLE object (polygons are not supported)");
        if (seg.at("counts").is_string()) {
          a.segmentation = segmentation_from_json(seg);
        } else {
          // Integer counts are kept as-is so validation can name what is wrong.
          a.segmentation.height = seg.at("size").at(0).get<int>();
          a.segmentation.width = seg.at("size").at(1).get<int>();
          a.segmentation.counts = seg.at("counts").get<std::vector<std::uint32_t>>();
        }
        const auto& bb = j.at("bbox");
        a.bbox = {bb.at(0).get<int>(), bb.at(1).get<int>(), bb.at(2).get<int>(), bb.at(3).get<int>()};
        a.area = j.at("area").get<std::uint64_t>();
        d.annotations.push_back(std::move(a));
      } catch (const std::exception& e) {
        schema_error("annotations[" + std::to_string(i) + "]", e);
      }
      ++i;
    }
  }
  if (root.contains("info")) d.info = root.at("info");
  if (!schema.empty()) throw DatasetError(std::move(schema));
  return d;
}

void write_dataset(const CocoDataset& dataset, const std::filesystem::path& path) {
  validate_dataset(dataset);
  write_text_file_atomic(path, serialize_dataset(dataset));
}

CocoDataset read_dataset(const std::filesystem::path& path) {
  CocoDataset d = parse_dataset(read_text_file(path), path.string());
  validate_dataset(d);
  return d;
}

std::vector<Detection> parse_detections(std::string_view text, const CocoDataset& gt,
                                        const std::string& source_name) {
  const json root = parse_json(text, source_name);
  if (!root.is_array()) throw IoError(source_name + ": detections file must be a JSON array");
  std::unordered_map<std::int64_t, const ImageRecord*> images;
  for (const auto& im : gt.images) images.emplace(im.id, &im);

  std::vector<Detection> out;
  out.reserve(root.size());
  for (std::size_t i = 0; i < root.size(); ++i) {
    const json& j = root[i];
    const std::string tag = source_name + ": detection " + std::to_string(i);
    Detection det;
    try {
      det.image_id = j.at("image_id").get<std::int64_t>();
      det.category_id = j.value("category_id", kChickenCategoryId);
      det.score = j.at("score").get<double>();
      if (j.contains("segmentation") && !j.at("segmentation").is_null()) {
        det.segmentation = segmentation_from_json(j.at("segmentation"));
        validate_rle(*det.segmentation);
      }
      if (j.contains("bbox")) {
        const auto& bb = j.at("bbox");
        det.bbox = {bb.at(0).get<double>(), bb.at(1).get<double>(), bb.at(2).get<double>(), bb.at(3).get<double>()};
      } else if (det.segmentation) {
        det.bbox = rle_area(*det.segmentation) > 0 ? to_box(rle_to_bbox(*det.segmentation)) : Box{};
      } else {
        throw Error("needs a bbox or a segmentation");
      }
    } catch (const Error& e) {
      throw IoError(tag + ": " + e.what());
    } catch (const json::exception& e) {
      throw IoError(tag + ": " + e.what());
    }
    auto it = images.find(det.image_id);
    if (it == images.end()) {
      throw IoError(tag + ": unknown image_id " + std::to_string(det.image_id));
    }
    if (!(det.score >= 0.0 && det.score <= 1.0)) {
      throw IoError(tag + ": score " + j.at("score").dump() + " outside [0, 1]");
    }
    if (!(det.bbox.w >= 0.0 && det.bbox.h >= 0.0)) throw IoError(tag + ": negative bbox size");
    if (det.segmentation &&
        (det.segmentation->width != it->second->width || det.segmentation->height != it->second->height)) {
      throw IoError(tag + ": mask size differs from image " + std::to_string(det.image_id));
    }
    out.push_back(std::move(det));
  }
  return out;
}

std::vector<Detection> read_detections(const std::filesystem::path& path, const CocoDataset& gt) {
  return parse_detections(read_text_file(path), gt, path.string());
}

std::string serialize_detections(std::span<const Detection> detections) {
  std::string out = "[";
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Detection& d = detections[i];
    json j{{"image_id", d.image_id},
           {"category_id", d.category_id},
           {"score", d.score},
           {"bbox", {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h}}};
    if (d.segmentation) {
      j["segmentation"] = json{{"size", {d.segmentation->height, d.segmentation->width}},
                               {"counts", d.segmentation->counts}};
    }
    out += i == 0 ? "\n" : ",\n";
    out += j.dump();
  }
  out += detections.empty() ? "]\n" : "\n]\n";
  return out;
}

std::vector<Detection> dataset_as_detections(const CocoDataset& dataset) {
  std::vector<Detection> out;
  out.reserve(dataset.annotations.size());
  for (const auto& a : dataset.annotations) {
    out.push_back({a.image_id, a.category_id, 1.0, to_box(a.bbox), a.segmentation});
  }
  return out;
}

Box to_box(const PixelBox& b) {
  return {static_cast<double>(b.x), static_cast<double>(b.y), static_cast<double>(b.w), static_cast<double>(b.h)};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError(path.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(path.string() + ": rename failed: " + ec.message());
}

}  // namespace synthseg
