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

#include "c3/c3dm.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "c3/error.hpp"
#include "c3/io_util.hpp"

namespace c3 {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

[[noreturn]] void format_error(std::size_t offset, const std::string& what) {
  fail(ErrorKind::kData, "C3DM: " + what + " at byte offset " + std::to_string(offset));
}

}  // namespace

std::vector<std::uint8_t> encode_c3dm(const DensityMap& map) {
  if (map.height < 0 || map.width < 0 || map.values.size() != map.shape().cells()) {
    fail(ErrorKind::kInvalidArgument, "C3DM: map dimensions do not match its values");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kC3dmHeaderSize + 4 * map.values.size());
  for (char c : {'C', '3', 'D', 'M'}) out.push_back(static_cast<std::uint8_t>(c));
  out.push_back(kC3dmVersion);
  put_u32(out, static_cast<std::uint32_t>(map.height));
  put_u32(out, static_cast<std::uint32_t>(map.width));
  put_f32(out, static_cast<float>(map.norm_factor));
  for (double v : map.values) put_f32(out, static_cast<float>(v));
  return out;
}

DensityMap decode_c3dm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) format_error(bytes.size(), "truncated magic");
  if (std::memcmp(bytes.data(), "C3DM", 4) != 0) format_error(0, "bad magic");
  if (bytes.size() < 5) format_error(bytes.size(), "truncated version");
  if (bytes[4] != kC3dmVersion) format_error(4, "unsupported version " + std::to_string(bytes[4]));
  if (bytes.size() < kC3dmHeaderSize) format_error(bytes.size(), "truncated header");

  const std::uint32_t h = get_u32(bytes.data() + 5);
  const std::uint32_t w = get_u32(bytes.data() + 9);
  if (h > (1u << 30) || w > (1u << 30)) format_error(5, "implausible dimensions");
  const float norm = get_f32(bytes.data() + 13);
  if (!std::isfinite(norm) || norm <= 0.0f) format_error(13, "norm_factor must be positive");

  const std::size_t cells = static_cast<std::size_t>(h) * w;
  const std::size_t expected = kC3dmHeaderSize + 4 * cells;
  if (bytes.size() < expected) {
    format_error(bytes.size(), "truncated payload (expected " + std::to_string(expected) + " bytes)");
  }
  if (bytes.size() > expected) format_error(expected, "trailing bytes");

  DensityMap map(static_cast<int>(h), static_cast<int>(w), norm);
  const std::uint8_t* p = bytes.data() + kC3dmHeaderSize;
  for (std::size_t i = 0; i < cells; ++i, p += 4) {
    const float v = get_f32(p);
    if (!std::isfinite(v) || v < 0.0f) format_error(kC3dmHeaderSize + 4 * i, "negative or non-finite value");
    map.values[i] = v;
  }
  return map;
}

void write_c3dm(const std::filesystem::path& path, const DensityMap& map) {
  const auto bytes = encode_c3dm(map);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

DensityMap read_c3dm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_c3dm(bytes);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace c3
