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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synthseg/coco_io.hpp"

namespace synthseg {

struct SplitFractions {
  double train = 0.2;
  double val = 0.2;
  double test = 0.6;
};

struct MixSpec {
  SplitFractions split;
  std::size_t synthetic_count = 0;
  std::uint64_t seed = 0;
  // Prepended to file_name of merged images so both image roots resolve.
  std::string real_prefix;
  std::string synthetic_prefix;
};

/// Exact nonnegative rational, always reduced.
struct Ratio {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  static Ratio of(std::uint64_t num, std::uint64_t den);
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  bool operator==(const Ratio&) const = default;
};

struct MixReport {
  std::size_t real_train = 0;
  std::size_t real_val = 0;
  std::size_t real_test = 0;
  std::size_t synthetic = 0;
  std::size_t training_images = 0;
  std::size_t training_annotations = 0;
  std::optional<Ratio> synthetic_to_real;  // empty when there are no real images
  std::uint64_t split_seed = 0;
  std::uint64_t pool_seed = 0;

  nlohmann::json to_json() const;
};

struct RealSplit {
  CocoDataset train;
  CocoDataset val;
  CocoDataset test;
};

/// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// Stream seeds derived from MixSpec::seed.
std::uint64_t split_seed(const MixSpec& spec);
std::uint64_t pool_seed(const MixSpec& spec);

/// Shuffles the images (taken in id order) with the split seed and cuts at
/// floor(n * train) and floor(n * (train + val)). Image ids are kept.
/// Throws MixError on invalid fractions or when any split comes out empty.
RealSplit split_real(const CocoDataset& dataset, const MixSpec& spec);

/// All real training images followed by the first `synthetic_count` images of
/// a seeded permutation of the pool, re-indexed densely from 1 (real first).
/// Provenance of every image is recorded under info["provenance"].
std::pair<CocoDataset, MixReport> compose_training_set(const CocoDataset& real_train,
                                                       const CocoDataset& synthetic_pool, const MixSpec& spec);

}  // namespace synthseg
