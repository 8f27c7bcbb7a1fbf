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

#include <set>

#include "c3/error.hpp"
#include "c3/io_util.hpp"
#include "c3/pipeline.hpp"

namespace c3 {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::kInvalidArgument, "config: " + what); }

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T typed(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw std::invalid_argument("expected boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw std::invalid_argument("expected integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw std::invalid_argument("expected number");
    } else {
      if (!v.is_string()) throw std::invalid_argument("expected string");
    }
    return v.get<T>();
  } catch (const std::exception& e) {
    config_error("'" + key + "': " + e.what());
  }
}

const char* mode_name(KernelMode m) { return m == KernelMode::kFixed ? "fixed" : "adaptive"; }

}  // namespace

json to_json(const KernelSpec& spec) {
  return {{"mode", mode_name(spec.mode)},     {"fixed_size", spec.fixed_size}, {"fixed_sigma", spec.fixed_sigma},
          {"knn_k", spec.knn_k},              {"beta", spec.beta},             {"sigma_cap", spec.sigma_cap},
          {"truncation", spec.truncation}};
}

KernelSpec merge_kernel_spec(KernelSpec base, const json& o) {
  reject_unknown(o, {"mode", "fixed_size", "fixed_sigma", "knn_k", "beta", "sigma_cap", "truncation"}, "kernel");
  if (o.contains("mode")) {
    const auto m = typed<std::string>(o["mode"], "kernel.mode");
    if (m == "fixed") {
      base.mode = KernelMode::kFixed;
    } else if (m == "adaptive") {
      base.mode = KernelMode::kAdaptive;
    } else {
      config_error("kernel.mode must be 'fixed' or 'adaptive'");
    }
  }
  if (o.contains("fixed_size")) base.fixed_size = typed<int>(o["fixed_size"], "kernel.fixed_size");
  if (o.contains("fixed_sigma")) base.fixed_sigma = typed<double>(o["fixed_sigma"], "kernel.fixed_sigma");
  if (o.contains("knn_k")) base.knn_k = typed<int>(o["knn_k"], "kernel.knn_k");
  if (o.contains("beta")) base.beta = typed<double>(o["beta"], "kernel.beta");
  if (o.contains("sigma_cap")) base.sigma_cap = typed<double>(o["sigma_cap"], "kernel.sigma_cap");
  if (o.contains("truncation")) base.truncation = typed<double>(o["truncation"], "kernel.truncation");
  base.validate();
  return base;
}

ResizeRule merge_resize_rule(ResizeRule base, const json& o) {
  reject_unknown(o, {"kind", "fixed", "max_side", "divisor", "upscale"}, "resize");
  if (o.contains("kind")) {
    const auto k = typed<std::string>(o["kind"], "resize.kind");
    if (k == "fixed_size") {
      base.kind = ResizeKind::kFixedSize;
    } else if (k == "ratio_preserving") {
      base.kind = ResizeKind::kRatioPreserving;
    } else {
      config_error("resize.kind must be 'fixed_size' or 'ratio_preserving'");
    }
  }
  if (o.contains("fixed")) {
    const json& f = o["fixed"];
    if (f.is_null()) {
      base.fixed.reset();
    } else {
      reject_unknown(f, {"height", "width"}, "resize.fixed");
      if (!f.contains("height") || !f.contains("width")) config_error("resize.fixed needs height and width");
      base.fixed = Shape{typed<int>(f["height"], "resize.fixed.height"), typed<int>(f["width"], "resize.fixed.width")};
    }
  }
  if (o.contains("max_side")) {
    if (o["max_side"].is_null()) {
      base.max_side.reset();
    } else {
      base.max_side = typed<int>(o["max_side"], "resize.max_side");
    }
  }
  if (o.contains("divisor")) base.divisor = typed<int>(o["divisor"], "resize.divisor");
  if (o.contains("upscale")) base.upscale = typed<bool>(o["upscale"], "resize.upscale");
  base.validate();
  return base;
}

DatasetRules PipelineConfig::effective_rules() const {
  DatasetRules rules;
  if (dataset == DatasetId::kCustom) {
    if (!resize_overrides.contains("kind")) {
      config_error("dataset CUSTOM has no built-in rules; give a complete \"resize\" section");
    }
    rules.resize = ResizeRule{};
    rules.resize.max_side.reset();
    rules.kernel = KernelSpec::fixed();
  } else {
    rules = rule_for(dataset);
  }
  rules.resize = merge_resize_rule(rules.resize, resize_overrides);
  rules.kernel = merge_kernel_spec(rules.kernel, kernel_overrides);
  return rules;
}

json PipelineConfig::snapshot() const {
  const auto rules = effective_rules();
  json j;
  j["dataset"] = to_string(dataset);
  j["kernel"] = to_json(rules.kernel);
  j["resize"] = to_json(rules.resize);
  j["downsample"] = downsample ? json{{"factor", downsample->factor}} : json(nullptr);
  j["normalization"] = normalization ? json{{"label_factor", normalization->label_factor}} : json(nullptr);
  j["manifest"] = manifest.string();
  j["output_dir"] = output_dir.string();
  j["seed"] = seed;
  j["threads"] = threads;
  j["strict"] = strict;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  reject_unknown(j, {"dataset", "kernel", "resize", "downsample", "normalization", "manifest", "output_dir", "seed",
                     "threads", "strict"},
                 "config");
  PipelineConfig c;
  if (j.contains("dataset")) c.dataset = parse_dataset_id(typed<std::string>(j["dataset"], "dataset"));
  if (j.contains("kernel") && !j["kernel"].is_null()) {
    reject_unknown(j["kernel"], {"mode", "fixed_size", "fixed_sigma", "knn_k", "beta", "sigma_cap", "truncation"}, "kernel");
    c.kernel_overrides = j["kernel"];
  }
  if (j.contains("resize") && !j["resize"].is_null()) {
    reject_unknown(j["resize"], {"kind", "fixed", "max_side", "divisor", "upscale"}, "resize");
    c.resize_overrides = j["resize"];
  }
  if (j.contains("downsample") && !j["downsample"].is_null()) {
    reject_unknown(j["downsample"], {"factor"}, "downsample");
    const int f = typed<int>(j["downsample"].at("factor"), "downsample.factor");
    if (f < 1) config_error("downsample.factor must be >= 1");
    c.downsample = DownsampleSpec{f};
  }
  if (j.contains("normalization") && !j["normalization"].is_null()) {
    reject_unknown(j["normalization"], {"label_factor"}, "normalization");
    const double f = typed<double>(j["normalization"].at("label_factor"), "normalization.label_factor");
    if (!(f > 0.0)) config_error("normalization.label_factor must be positive");
    c.normalization = NormalizationSpec{f};
  }
  if (j.contains("manifest")) c.manifest = typed<std::string>(j["manifest"], "manifest");
  if (j.contains("output_dir")) c.output_dir = typed<std::string>(j["output_dir"], "output_dir");
  if (j.contains("seed")) c.seed = typed<std::uint64_t>(j["seed"], "seed");
  if (j.contains("threads")) c.threads = typed<int>(j["threads"], "threads");
  if (j.contains("strict")) c.strict = typed<bool>(j["strict"], "strict");
  if (c.threads < 1) config_error("threads must be >= 1");
  c.effective_rules();  // type-check overrides against the dataset now
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    config_error(path.string() + ": " + e.what());
  }
  auto c = config_from_json(j);
  const auto base = path.parent_path();
  if (!c.manifest.empty() && c.manifest.is_relative()) c.manifest = base / c.manifest;
  if (!c.output_dir.empty() && c.output_dir.is_relative()) c.output_dir = base / c.output_dir;
  return c;
}

}  // namespace c3
