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

#include "c3/ingest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "c3/error.hpp"
#include "c3/io_util.hpp"

namespace c3 {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorKind::kData, std::string("annotation: missing field '") + key + "'");
  return *it;
}

int read_dimension(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_number_integer()) fail(ErrorKind::kData, std::string("annotation: '") + key + "' must be an integer");
  const auto d = v.get<long long>();
  if (d < 1 || d > (1LL << 30)) {
    fail(ErrorKind::kData, std::string("annotation: '") + key + "' must be positive, got " + std::to_string(d));
  }
  return static_cast<int>(d);
}

}  // namespace

bool clamp_coordinate(double& v, int extent) noexcept {
  if (v < 0.0) {
    v = 0.0;
    return true;
  }
  const double hi = static_cast<double>(extent);
  if (v >= hi) {
    v = std::nextafter(hi, 0.0);
    return true;
  }
  return false;
}

LoadedAnnotations parse_annotations(const std::string& json_text, bool strict) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kData, std::string("annotation: parse error: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::kData, "annotation: top level must be an object");

  LoadedAnnotations out;
  AnnotationSet& ann = out.annotations;
  const json& id = require(doc, "image_id");
  if (!id.is_string() || id.get<std::string>().empty()) {
    fail(ErrorKind::kData, "annotation: 'image_id' must be a non-empty string");
  }
  ann.image_id = id.get<std::string>();
  ann.width = read_dimension(doc, "width");
  ann.height = read_dimension(doc, "height");

  const json& pts = require(doc, "points");
  if (!pts.is_array()) fail(ErrorKind::kData, "annotation: 'points' must be an array");
  ann.points.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const json& p = pts[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      fail(ErrorKind::kData, ann.image_id + ": point " + std::to_string(i) + " must be [x, y]");
    }
    Point pt{p[0].get<double>(), p[1].get<double>()};
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y)) {
      fail(ErrorKind::kData, ann.image_id + ": point " + std::to_string(i) + " is not finite");
    }
    const bool inside = pt.x >= 0.0 && pt.x < ann.width && pt.y >= 0.0 && pt.y < ann.height;
    if (!inside) {
      if (strict) {
        std::ostringstream msg;
        msg << ann.image_id << ": point " << i << " (" << pt.x << ", " << pt.y << ") outside " << ann.width << "x"
            << ann.height << " image";
        fail(ErrorKind::kData, msg.str());
      }
      clamp_coordinate(pt.x, ann.width);
      clamp_coordinate(pt.y, ann.height);
      ++out.clamped_points;
    }
    ann.points.push_back(pt);
  }
  return out;
}

LoadedAnnotations load_annotations(const std::filesystem::path& path, bool strict) {
  return parse_annotations(read_text_file(path), strict);
}

std::string serialize_annotations(const AnnotationSet& ann) {
  json pts = json::array();
  for (const Point& p : ann.points) pts.push_back({p.x, p.y});
  json doc = {{"image_id", ann.image_id}, {"width", ann.width}, {"height", ann.height}, {"points", std::move(pts)}};
  return doc.dump();
}

void save_annotations(const std::filesystem::path& path, const AnnotationSet& ann) {
  write_file_atomic(path, serialize_annotations(ann) + "\n");
}

void validate(const AnnotationSet& ann) {
  if (ann.image_id.empty()) fail(ErrorKind::kData, "annotation: empty image_id");
  if (ann.width < 1 || ann.height < 1) {
    fail(ErrorKind::kData, ann.image_id + ": non-positive dimensions");
  }
  for (std::size_t i = 0; i < ann.points.size(); ++i) {
    const Point& p = ann.points[i];
    if (!(p.x >= 0.0 && p.x < ann.width && p.y >= 0.0 && p.y < ann.height)) {
      fail(ErrorKind::kData, ann.image_id + ": point " + std::to_string(i) + " outside image or not finite");
    }
  }
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kData, path.string() + ": parse error: " + e.what());
  }
  if (!doc.is_array()) fail(ErrorKind::kData, path.string() + ": manifest must be a JSON array");
  const auto base = path.parent_path();
  std::vector<ManifestEntry> entries;
  entries.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& e = doc[i];
    if (!e.is_object() || !e.contains("annotation") || !e["annotation"].is_string() || !e.contains("image") ||
        !e["image"].is_string()) {
      fail(ErrorKind::kData, path.string() + ": entry " + std::to_string(i) + " needs string 'annotation' and 'image'");
    }
    std::filesystem::path ann = e["annotation"].get<std::string>();
    std::filesystem::path img = e["image"].get<std::string>();
    if (ann.is_relative()) ann = base / ann;
    if (img.is_relative()) img = base / img;
    entries.push_back({std::move(ann), std::move(img)});
  }
  return entries;
}

void save_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  json doc = json::array();
  for (const auto& e : entries) doc.push_back({{"annotation", e.annotation.string()}, {"image", e.image.string()}});
  write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace c3
