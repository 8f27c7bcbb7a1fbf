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
#include <cctype>
#include <mutex>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "c3/error.hpp"
#include "c3/io_util.hpp"
#include "c3/parallel.hpp"
#include "c3/pipeline.hpp"

namespace c3 {

using nlohmann::json;

namespace {

std::string output_extension(const std::filesystem::path& src) {
  std::string ext = src.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp") return ext;
  return ".png";
}

struct Outcome {
  bool ok = false;
  ManifestEntry entry;  // relative to the output dir
  std::string image_id;
  ResizePlan plan;
  PreprocessFailure failure;
};

Outcome preprocess_one(const ManifestEntry& e, const DatasetRules& rules, const PipelineConfig& config) {
  Outcome o;
  std::string current = e.annotation.string();
  try {
    const AnnotationSet ann = load_annotations(e.annotation, config.strict).annotations;
    if (ann.image_id.find_first_of("/\\") != std::string::npos) {
      fail(ErrorKind::kData, "image_id '" + ann.image_id + "' cannot be used as a file name");
    }
    o.image_id = ann.image_id;

    current = e.image.string();
    std::error_code ec;
    if (!std::filesystem::exists(e.image, ec)) fail(ErrorKind::kIo, "missing image file");
    const cv::Mat img = cv::imread(e.image.string(), cv::IMREAD_UNCHANGED);
    if (img.empty()) fail(ErrorKind::kData, "undecodable image");
    if (img.rows != ann.height || img.cols != ann.width) {
      fail(ErrorKind::kData, "image is " + std::to_string(img.rows) + "x" + std::to_string(img.cols) +
                                 " but annotation " + e.annotation.string() + " says " + std::to_string(ann.height) +
                                 "x" + std::to_string(ann.width));
    }

    o.plan = plan_resize({ann.height, ann.width}, rules.resize);
    const AnnotationSet resized = apply_resize(ann, o.plan);

    const std::filesystem::path rel_img = std::filesystem::path("images") / (ann.image_id + output_extension(e.image));
    const std::filesystem::path rel_ann = std::filesystem::path("annotations") / (ann.image_id + ".json");
    const auto out_img = config.output_dir / rel_img;
    std::filesystem::create_directories(out_img.parent_path(), ec);
    if (o.plan.dst == o.plan.src && output_extension(e.image) == e.image.extension().string()) {
      std::filesystem::copy_file(e.image, out_img, std::filesystem::copy_options::overwrite_existing, ec);
      if (ec) fail(ErrorKind::kIo, "copy to " + out_img.string() + ": " + ec.message());
    } else {
      cv::Mat dst;
      if (o.plan.dst == o.plan.src) {
        dst = img;
      } else {
        cv::resize(img, dst, cv::Size(o.plan.dst.width, o.plan.dst.height), 0.0, 0.0, cv::INTER_LINEAR);
      }
      bool written = false;
      try {
        written = cv::imwrite(out_img.string(), dst);
      } catch (const cv::Exception& ex) {
        fail(ErrorKind::kIo, "cannot write " + out_img.string() + ": " + ex.what());
      }
      if (!written) fail(ErrorKind::kIo, "cannot write " + out_img.string());
    }
    current = (config.output_dir / rel_ann).string();
    save_annotations(config.output_dir / rel_ann, resized);
    o.entry = {rel_ann, rel_img};
    o.ok = true;
  } catch (const Error& err) {
    o.failure = {current, err.what(), err.kind()};
  } catch (const cv::Exception& ex) {
    o.failure = {current, ex.what(), ErrorKind::kData};
  }
  return o;
}

}  // namespace

PreprocessResult run_preprocess(const PipelineConfig& config, const PreprocessOptions& opts) {
  const DatasetRules rules = config.effective_rules();
  if (config.manifest.empty()) fail(ErrorKind::kInvalidArgument, "preprocess: no manifest given");
  if (config.output_dir.empty()) fail(ErrorKind::kInvalidArgument, "preprocess: no output directory given");
  if (opts.batch_size < 0) fail(ErrorKind::kInvalidArgument, "preprocess: negative batch size");
  const auto entries = load_manifest(config.manifest);

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + config.output_dir.string() + ": " + ec.message());

  std::vector<Outcome> outcomes(entries.size());
  parallel_for(entries.size(), config.threads, [&](std::size_t i) { outcomes[i] = preprocess_one(entries[i], rules, config); });

  PreprocessResult result;
  json plans = json::array();
  std::vector<const Outcome*> ok;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      result.failures.push_back(o.failure);
      continue;
    }
    result.outputs.push_back(o.entry);
    plans.push_back({{"image_id", o.image_id}, {"plan", to_json(o.plan)}});
    ok.push_back(&o);
  }
  save_manifest(config.output_dir / "manifest.json", result.outputs);
  write_file_atomic(config.output_dir / "resize_plans.json", plans.dump(2) + "\n");

  if (opts.batch_size > 0) {
    json batches = json::array();
    for (std::size_t start = 0, b = 0; start < ok.size(); start += static_cast<std::size_t>(opts.batch_size), ++b) {
      const std::size_t end = std::min(ok.size(), start + static_cast<std::size_t>(opts.batch_size));
      std::vector<Shape> sizes;
      json ids = json::array();
      for (std::size_t i = start; i < end; ++i) {
        sizes.push_back(ok[i]->plan.dst);
        ids.push_back(ok[i]->image_id);
      }
      const auto plan = plan_batch(sizes, static_cast<int>(sizes.size()), opts.batch_strategy, config.seed + b);
      batches.push_back({{"images", std::move(ids)}, {"plan", to_json(plan)}});
    }
    write_file_atomic(config.output_dir / "batch_plans.json", batches.dump(2) + "\n");
  }
  return result;
}

void write_heatmap_png(const DensityMap& map, const std::filesystem::path& path) {
  if (map.height < 1 || map.width < 1) fail(ErrorKind::kInvalidArgument, "heat map: empty map");
  const double peak = *std::max_element(map.values.begin(), map.values.end());
  cv::Mat img(map.height, map.width, CV_8UC3);
  for (int r = 0; r < map.height; ++r) {
    auto* row = img.ptr<cv::Vec3b>(r);
    for (int c = 0; c < map.width; ++c) {
      const double t = peak > 0.0 ? map.at(r, c) / peak : 0.0;
      auto channel = [t](double offset) {
        return static_cast<unsigned char>(std::lround(255.0 * std::clamp(3.0 * t - offset, 0.0, 1.0)));
      };
      row[c] = cv::Vec3b(channel(2.0), channel(1.0), channel(0.0));  // BGR
    }
  }
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (!cv::imwrite(path.string(), img)) fail(ErrorKind::kIo, "cannot write " + path.string());
}

}  // namespace c3
