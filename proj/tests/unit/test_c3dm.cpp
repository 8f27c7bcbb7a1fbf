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

#include <doctest.h>

#include <cstring>
#include <random>
#include <string>

#include "c3/c3dm.hpp"
#include "c3/error.hpp"
#include "support/tempdir.hpp"

using namespace c3;

TEST_CASE("byte layout of a 1x2 map") {
  DensityMap m(1, 2, 100.0);
  m.values = {0.5, 2.0};
  const auto b = encode_c3dm(m);
  const std::vector<std::uint8_t> expected = {
      'C', '3', 'D', 'M', 1,                  // magic, version
      1, 0, 0, 0, 2, 0, 0, 0,                 // height, width
      0x00, 0x00, 0xc8, 0x42,                 // 100.0f
      0x00, 0x00, 0x00, 0x3f, 0x00, 0x00, 0x00, 0x40};  // 0.5f, 2.0f
  CHECK(b == expected);
  const auto back = decode_c3dm(b);
  CHECK(back == m);
}

TEST_CASE("float-representable maps round-trip exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(0.0f, 3.0f);
  DensityMap m(7, 13);
  for (double& v : m.values) v = u(rng);
  CHECK(decode_c3dm(encode_c3dm(m)) == m);

  testing::TempDir dir;
  write_c3dm(dir / "m.c3dm", m);
  CHECK(read_c3dm(dir / "m.c3dm") == m);
  CHECK(std::filesystem::file_size(dir / "m.c3dm") == kC3dmHeaderSize + 4 * 7 * 13);
}

TEST_CASE("malformed streams report the byte offset") {
  DensityMap m(2, 2);
  m.values = {1, 2, 3, 4};
  auto b = encode_c3dm(m);

  auto message = [](std::vector<std::uint8_t> bytes) -> std::string {
    try {
      decode_c3dm(bytes);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kData);
      return e.what();
    }
    return "";
  };

  auto truncated = b;
  truncated.resize(25);
  CHECK(message(truncated).find("byte offset 25") != std::string::npos);
  CHECK(message({'C', '3'}).find("byte offset 2") != std::string::npos);
  auto bad_magic = b;
  bad_magic[0] = 'X';
  CHECK(message(bad_magic).find("bad magic") != std::string::npos);
  auto bad_version = b;
  bad_version[4] = 2;
  CHECK(message(bad_version).find("byte offset 4") != std::string::npos);
  auto trailing = b;
  trailing.push_back(0);
  CHECK(message(trailing).find("trailing") != std::string::npos);
  auto negative = b;
  negative[kC3dmHeaderSize + 7] = 0xbf;  // sign bit of the second value
  CHECK(message(negative).find("byte offset 21") != std::string::npos);

  testing::TempDir dir;
  CHECK_THROWS_AS(read_c3dm(dir / "missing.c3dm"), Error);
}
