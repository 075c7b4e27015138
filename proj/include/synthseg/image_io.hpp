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
#include <span>
#include <vector>

namespace synthseg {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB
};

/// 8-bit RGB PNG bytes. Output is deterministic for equal input.
std::vector<std::uint8_t> encode_png_rgb(int width, int height, std::span<const std::uint8_t> rgb);

/// 16-bit single-channel PNG bytes.
std::vector<std::uint8_t> encode_png_gray16(int width, int height, std::span<const std::uint16_t> values);

/// Decodes an 8-bit RGB PNG (other formats are converted to RGB8).
RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes);

void write_binary_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);

}  // namespace synthseg
