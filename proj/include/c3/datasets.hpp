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

#include <array>
#include <string>
#include <string_view>

#include "c3/density.hpp"
#include "c3/preprocess.hpp"

namespace c3 {

enum class DatasetId { kUcf50, kShtA, kShtB, kWe, kQnrf, kGcc, kCustom };

inline constexpr std::array<DatasetId, 6> kKnownDatasets = {DatasetId::kUcf50, DatasetId::kShtA, DatasetId::kShtB,
                                                           DatasetId::kWe,    DatasetId::kQnrf, DatasetId::kGcc};

struct DatasetRules {
  ResizeRule resize;
  KernelSpec kernel;
};

/// Per-dataset sizing and kernel defaults:
///
///   UCF50   keep ratio, max side 1024, dims % 16 == 0   fixed 15x15
///   SHT_A   keep ratio, max side 1024, dims % 16 == 0   geometry-adaptive
///   SHT_B   768 x 1024                                  fixed 15x15
///   WE      576 x 720                                   fixed 15x15
///   QNRF    keep ratio, max side 1024, dims % 16 == 0   fixed 15x15
///   GCC     544 x 960                                   fixed 15x15
///
/// CUSTOM has no defaults; callers must supply explicit rules.
DatasetRules rule_for(DatasetId dataset);

const char* to_string(DatasetId id);

/// Accepts the canonical names ("SHT_A", "UCF50", ...) case-insensitively.
DatasetId parse_dataset_id(std::string_view name);

}  // namespace c3
