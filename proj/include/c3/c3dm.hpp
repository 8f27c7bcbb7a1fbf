// Copyright 2026 The c3kit Authors. All Rights Reserved.
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
#include <string>
#include <vector>

#include "c3/density.hpp"

namespace c3 {

/// Binary density map container:
///
///   offset 0   "C3DM"              magic
///   offset 4   u8                  version (1)
///   offset 5   u32 LE              height
///   offset 9   u32 LE              width
///   offset 13  f32 LE              norm_factor
///   offset 17  f32 LE x (h * w)    values, row-major
///
/// No padding and no checksum. Values are narrowed to float on write.
inline constexpr std::uint8_t kC3dmVersion = 1;
inline constexpr std::size_t kC3dmHeaderSize = 17;

std::vector<std::uint8_t> encode_c3dm(const DensityMap& map);

/// Throws kData naming the byte offset where a truncated or malformed
/// stream stops making sense.
DensityMap decode_c3dm(std::span<const std::uint8_t> bytes);

void write_c3dm(const std::filesystem::path& path, const DensityMap& map);
DensityMap read_c3dm(const std::filesystem::path& path);

}  // namespace c3
