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

#include "synthseg/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "synthseg/random.hpp"

namespace synthseg {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSplitStream = 0x5E11;
constexpr std::uint64_t kPoolStream = 0x9001;

// Cut points tolerate representation error in n * fraction (0.2 * 300 must
// give 60, not 59).
std::size_t cut_point(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
}

std::vector<const ImageRecord*> images_by_id(const CocoDataset& d) {
  std::vector<const ImageRecord*> out;
  out.reserve(d.images.size());
  for (const auto& im : d.images) out.push_back(&im);
  std::sort(out.begin(), out.end(), [](const ImageRecord* a, const ImageRecord* b) { return a->id < b->id; });
  return out;
}

std::map<std::int64_t, std::vector<const InstanceAnnotation*>> annotations_by_image(const CocoDataset& d) {
  std::map<std::int64_t, std::vector<const InstanceAnnotation*>> out;
  for (const auto& a : d.annotations) out[a.image_id].push_back(&a);
  for (auto& [id, list] : out) {
    std::sort(list.begin(), list.end(), [](const InstanceAnnotation* a, const InstanceAnnotation* b) {
      return a->annotation_id < b->annotation_id;
    });
  }
  return out;
}

CocoDataset subset(const CocoDataset& d, const std::vector<const ImageRecord*>& images, const char* split_name,
                   std::uint64_t seed) {
  CocoDataset out;
  out.categories = d.categories;
  out.info = d.info.is_object() ? d.info : json::object();
  out.info["split"] = split_name;
  out.info["split_seed"] = seed;
  std::vector<std::int64_t> ids;
  for (const auto* im : images) {
    out.images.push_back(*im);
    ids.push_back(im->id);
  }
  std::sort(ids.begin(), ids.end());
  for (const auto& a : d.annotations) {
    if (std::binary_search(ids.begin(), ids.end(), a.image_id)) out.annotations.push_back(a);
  }
  return out;
}

}  // namespace

Ratio Ratio::of(std::uint64_t num, std::uint64_t den) {
  const std::uint64_t g = std::gcd(num, den);
  return g == 0 ? Ratio{0, 1} : Ratio{num / g, den / g};
}

json MixReport::to_json() const {
  json j{{"real_train", real_train},
         {"real_val", real_val},
         {"real_test", real_test},
         {"synthetic", synthetic},
         {"training_images", training_images},
         {"training_annotations", training_annotations},
         {"split_seed", split_seed},
         {"pool_seed", pool_seed}};
  if (synthetic_to_real) {
    j["synthetic_to_real"] = synthetic_to_real->value();
    j["synthetic_to_real_exact"] = {synthetic_to_real->numerator, synthetic_to_real->denominator};
  } else {
    j["synthetic_to_real"] = nullptr;
    j["synthetic_to_real_exact"] = nullptr;
  }
  return j;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::uint64_t split_seed(const MixSpec& spec) { return derive_seed(spec.seed, kSplitStream); }
std::uint64_t pool_seed(const MixSpec& spec) { return derive_seed(spec.seed, kPoolStream); }

RealSplit split_real(const CocoDataset& dataset, const MixSpec& spec) {
  const SplitFractions& f = spec.split;
  if (!(f.train > 0.0 && f.val > 0.0 && f.test > 0.0)) {
    throw MixError("split fractions must all be positive (empty splits are not allowed)");
  }
  if (std::abs(f.train + f.val + f.test - 1.0) > 1e-9) throw MixError("split fractions must sum to 1");
  const auto images = images_by_id(dataset);
  const std::size_t n = images.size();
  if (n < 3) throw MixError("split needs at least 3 images, got " + std::to_string(n));

  const std::size_t a = cut_point(n, f.train);
  const std::size_t b = cut_point(n, f.train + f.val);
  if (a == 0 || b == a || b >= n) {
    throw MixError("split of " + std::to_string(n) + " images produces an empty split (" + std::to_string(a) +
                   "/" + std::to_string(b - a) + "/" + std::to_string(n - b) + ")");
  }

  const std::uint64_t seed = split_seed(spec);
  const auto perm = seeded_permutation(n, seed);
  std::vector<const ImageRecord*> train, val, test;
  for (std::size_t i = 0; i < n; ++i) {
    const ImageRecord* im = images[perm[i]];
    (i < a ? train : (i < b ? val : test)).push_back(im);
  }
  return {subset(dataset, train, "train", seed), subset(dataset, val, "val", seed),
          subset(dataset, test, "test", seed)};
}

std::pair<CocoDataset, MixReport> compose_training_set(const CocoDataset& real_train,
                                                       const CocoDataset& synthetic_pool, const MixSpec& spec) {
  if (spec.synthetic_count > synthetic_pool.images.size()) {
    throw MixError("requested " + std::to_string(spec.synthetic_count) + " synthetic images but the pool has " +
                   std::to_string(synthetic_pool.images.size()));
  }
  for (const auto& c : synthetic_pool.categories) {
    const bool known = std::any_of(real_train.categories.begin(), real_train.categories.end(),
                                   [&](const Category& r) { return r.id == c.id; });
    if (!known) throw MixError("synthetic category id " + std::to_string(c.id) + " is absent from the real set");
  }

  const auto real_images = images_by_id(real_train);
  const auto pool_images = images_by_id(synthetic_pool);
  const auto real_anns = annotations_by_image(real_train);
  const auto pool_anns = annotations_by_image(synthetic_pool);
  const std::uint64_t seed = pool_seed(spec);
  const auto perm = seeded_permutation(pool_images.size(), seed);

  CocoDataset out;
  out.categories = real_train.categories;
  json provenance = json::array();
  std::int64_t next_image = 1;
  std::int64_t next_ann = 1;

  auto append = [&](const ImageRecord& im, const std::string& prefix, const char* source,
                    const std::map<std::int64_t, std::vector<const InstanceAnnotation*>>& anns) {
    ImageRecord rec = im;
    rec.id = next_image++;
    rec.file_name = prefix + im.file_name;
    out.images.push_back(rec);
    provenance.push_back(json{{"id", rec.id}, {"source", source}, {"source_id", im.id}});
    if (auto it = anns.find(im.id); it != anns.end()) {
      for (const InstanceAnnotation* a : it->second) {
        InstanceAnnotation copy = *a;
        copy.annotation_id = next_ann++;
        copy.image_id = rec.id;
        out.annotations.push_back(std::move(copy));
      }
    }
  };

  for (const ImageRecord* im : real_images) append(*im, spec.real_prefix, "real", real_anns);
  for (std::size_t i = 0; i < spec.synthetic_count; ++i) {
    append(*pool_images[perm[i]], spec.synthetic_prefix, "synthetic", pool_anns);
  }

  MixReport report;
  report.real_train = real_images.size();
  report.synthetic = spec.synthetic_count;
  report.training_images = out.images.size();
  report.training_annotations = out.annotations.size();
  if (report.real_train > 0) report.synthetic_to_real = Ratio::of(report.synthetic, report.real_train);
  report.split_seed = split_seed(spec);
  report.pool_seed = seed;

  out.info = json{{"mix", report.to_json()}, {"provenance", std::move(provenance)}};
  return {std::move(out), report};
}

}  // namespace synthseg
