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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "c3/datasets.hpp"
#include "c3/expdb.hpp"
#include "c3/labels.hpp"
#include "c3/metrics.hpp"
#include "c3/preprocess.hpp"

namespace c3 {

/// Everything a pipeline command needs. Rule overrides are partial JSON
/// objects merged field-by-field over the dataset defaults.
struct PipelineConfig {
  DatasetId dataset = DatasetId::kShtB;
  nlohmann::json kernel_overrides = nlohmann::json::object();
  nlohmann::json resize_overrides = nlohmann::json::object();
  std::optional<DownsampleSpec> downsample;
  std::optional<NormalizationSpec> normalization;
  std::filesystem::path manifest;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  bool strict = false;

  /// Dataset defaults with overrides applied. CUSTOM needs a complete
  /// "resize" override ("kind" plus its dimensions); the kernel falls back to
  /// the fixed 15x15 default.
  DatasetRules effective_rules() const;

  /// Fully resolved parameters, suitable for hashing into a RunRecord.
  nlohmann::json snapshot() const;
};

/// Parses the config file schema. Unknown keys and mistyped values are
/// kInvalidArgument errors.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const KernelSpec& spec);
KernelSpec merge_kernel_spec(KernelSpec base, const nlohmann::json& overrides);
ResizeRule merge_resize_rule(ResizeRule base, const nlohmann::json& overrides);

struct GengtImage {
  std::string image_id;
  std::size_t points = 0;
  std::size_t clamped_points = 0;
  Shape source;
  Shape resized;
  Shape map;
  double map_count = 0.0;  // count() of the written map
  std::vector<std::string> flags;
};

struct GengtResult {
  std::vector<GengtImage> images;
  std::vector<std::string> warnings;
  std::optional<std::string> run_id;
};

/// Annotations -> resize -> render -> optional downsample/normalize, one
/// `<image_id>.c3dm` per manifest entry plus `manifest.out.json`. Output
/// bytes depend only on the config, never on the thread count. When `store`
/// is given the run is recorded there.
GengtResult run_gengt(const PipelineConfig& config, ExperimentStore* store);

struct PreprocessOptions {
  /// Group consecutive images into batches of this size and write
  /// batch_plans.json. 0 disables.
  int batch_size = 0;
  BatchStrategy batch_strategy = BatchStrategy::kCropToMin;
};

struct PreprocessFailure {
  std::string source;  // file that failed
  std::string message;
  ErrorKind kind = ErrorKind::kData;
};

struct PreprocessResult {
  std::vector<ManifestEntry> outputs;
  std::vector<PreprocessFailure> failures;
};

/// Resizes images (bilinear) and their annotations per the dataset rule.
/// Writes `images/`, `annotations/`, `manifest.json` and `resize_plans.json`
/// under the output dir. Per-file failures are collected, not thrown.
PreprocessResult run_preprocess(const PipelineConfig& config, const PreprocessOptions& opts);

struct MapStats {
  Shape shape;
  double norm_factor = 1.0;
  double sum = 0.0;
  double count = 0.0;
  double min = 0.0;
  double max = 0.0;
};

MapStats inspect_map(const DensityMap& map);

/// Peak-normalized heat map (black -> red -> yellow -> white) as PNG.
void write_heatmap_png(const DensityMap& map, const std::filesystem::path& path);

}  // namespace c3
