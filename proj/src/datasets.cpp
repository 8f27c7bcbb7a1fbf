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

#include "c3/datasets.hpp"

#include <algorithm>
#include <cctype>

#include "c3/error.hpp"

namespace c3 {

DatasetRules rule_for(DatasetId dataset) {
  constexpr int kMaxSide = 1024;
  switch (dataset) {
    case DatasetId::kUcf50: return {ResizeRule::ratio_preserving(kMaxSide), KernelSpec::fixed()};
    case DatasetId::kShtA: return {ResizeRule::ratio_preserving(kMaxSide), KernelSpec::adaptive()};
    case DatasetId::kShtB: return {ResizeRule::fixed_size(768, 1024), KernelSpec::fixed()};
    case DatasetId::kWe: return {ResizeRule::fixed_size(576, 720), KernelSpec::fixed()};
    case DatasetId::kQnrf: return {ResizeRule::ratio_preserving(kMaxSide), KernelSpec::fixed()};
    case DatasetId::kGcc: return {ResizeRule::fixed_size(544, 960), KernelSpec::fixed()};
    case DatasetId::kCustom: break;
  }
  fail(ErrorKind::kInvalidArgument, "dataset CUSTOM has no built-in rules; supply explicit resize and kernel settings");
}

const char* to_string(DatasetId id) {
  switch (id) {
    case DatasetId::kUcf50: return "UCF50";
    case DatasetId::kShtA: return "SHT_A";
    case DatasetId::kShtB: return "SHT_B";
    case DatasetId::kWe: return "WE";
    case DatasetId::kQnrf: return "QNRF";
    case DatasetId::kGcc: return "GCC";
    case DatasetId::kCustom: return "CUSTOM";
  }
  return "?";
}

DatasetId parse_dataset_id(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (DatasetId id : {DatasetId::kUcf50, DatasetId::kShtA, DatasetId::kShtB, DatasetId::kWe, DatasetId::kQnrf,
                       DatasetId::kGcc, DatasetId::kCustom}) {
    if (upper == to_string(id)) return id;
  }
  fail(ErrorKind::kInvalidArgument, "unknown dataset '" + std::string(name) + "'");
}

}  // namespace c3
