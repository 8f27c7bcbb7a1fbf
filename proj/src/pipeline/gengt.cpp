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

#include <algorithm>
#include <map>

#include "c3/c3dm.hpp"
#include "c3/error.hpp"
#include "c3/io_util.hpp"
#include "c3/parallel.hpp"
#include "c3/pipeline.hpp"

namespace c3 {

using nlohmann::json;

namespace {

void check_image_id(const std::string& id) {
  if (id == "." || id == ".." || id.find_first_of("/\\") != std::string::npos) {
    fail(ErrorKind::kData, "image_id '" + id + "' cannot be used as a file name");
  }
}

json shape_json(Shape s) { return {{"height", s.height}, {"width", s.width}}; }

}  // namespace

GengtResult run_gengt(const PipelineConfig& config, ExperimentStore* store) {
  const DatasetRules rules = config.effective_rules();
  if (config.manifest.empty()) fail(ErrorKind::kInvalidArgument, "gengt: no manifest given");
  if (config.output_dir.empty()) fail(ErrorKind::kInvalidArgument, "gengt: no output directory given");
  const auto entries = load_manifest(config.manifest);

  GengtResult result;
  if (entries.empty()) result.warnings.push_back("manifest " + config.manifest.string() + " lists no images");

  // Load and validate everything before writing anything.
  std::vector<LoadedAnnotations> loaded(entries.size());
  parallel_for(entries.size(), config.threads, [&](std::size_t i) {
    const auto& e = entries[i];
    std::error_code ec;
    if (!std::filesystem::exists(e.annotation, ec)) fail(ErrorKind::kIo, "missing annotation file " + e.annotation.string());
    if (!std::filesystem::exists(e.image, ec)) fail(ErrorKind::kIo, "missing image file " + e.image.string());
    try {
      loaded[i] = load_annotations(e.annotation, config.strict);
    } catch (const Error& err) {
      fail(err.kind(), e.annotation.string() + ": " + err.what());
    }
    check_image_id(loaded[i].annotations.image_id);
  });
  std::map<std::string, std::size_t> first_seen;
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    const auto& id = loaded[i].annotations.image_id;
    if (auto [it, fresh] = first_seen.emplace(id, i); !fresh) {
      fail(ErrorKind::kData, "duplicate image_id '" + id + "' in " + entries[it->second].annotation.string() + " and " +
                                 entries[i].annotation.string());
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + config.output_dir.string() + ": " + ec.message());

  result.images.resize(entries.size());
  parallel_for(entries.size(), config.threads, [&](std::size_t i) {
    const AnnotationSet& ann = loaded[i].annotations;
    GengtImage& out = result.images[i];
    try {
      out.image_id = ann.image_id;
      out.points = ann.count();
      out.clamped_points = loaded[i].clamped_points;
      out.source = {ann.height, ann.width};
      if (out.clamped_points > 0) out.flags.push_back("clamped_points:" + std::to_string(out.clamped_points));

      const ResizePlan plan = plan_resize(out.source, rules.resize);
      out.resized = plan.dst;
      const AnnotationSet resized = apply_resize(ann, plan);
      DensityMap map = render(resized, rules.kernel, plan.dst);
      if (config.downsample && config.downsample->factor > 1) {
        map = downsample_sum_preserving(map, *config.downsample);
        out.flags.push_back("downsampled:" + std::to_string(config.downsample->factor));
      }
      if (config.normalization) {
        map = normalize_labels(map, *config.normalization);
        out.flags.push_back("normalized:" + json(config.normalization->label_factor).dump());
      }
      out.map = map.shape();
      const auto path = config.output_dir / (ann.image_id + ".c3dm");
      write_c3dm(path, map);
      out.map_count = count(read_c3dm(path));
    } catch (const Error& err) {
      fail(err.kind(), ann.image_id + ": " + err.what());
    }
  });

  json images = json::array();
  for (const auto& img : result.images) {
    images.push_back({{"image_id", img.image_id},
                      {"points", img.points},
                      {"count", img.map_count},
                      {"source", shape_json(img.source)},
                      {"resized", shape_json(img.resized)},
                      {"map", shape_json(img.map)},
                      {"file", img.image_id + ".c3dm"},
                      {"flags", img.flags}});
  }
  const json summary = {{"dataset", to_string(config.dataset)},
                        {"images", std::move(images)},
                        {"warnings", result.warnings}};
  write_file_atomic(config.output_dir / "manifest.out.json", summary.dump(2) + "\n");

  if (store) {
    const auto run = store->create_run(config.snapshot(), config.dataset,
                                       "gengt: " + std::to_string(result.images.size()) + " images -> " +
                                           config.output_dir.string());
    result.run_id = run.run_id;
  }
  return result;
}

MapStats inspect_map(const DensityMap& map) {
  MapStats s;
  s.shape = map.shape();
  s.norm_factor = map.norm_factor;
  s.count = count(map);
  s.sum = s.count * map.norm_factor;
  if (!map.values.empty()) {
    const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
    s.min = *lo;
    s.max = *hi;
  }
  return s;
}

}  // namespace c3
