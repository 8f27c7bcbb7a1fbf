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

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace c3 {

/// A head position in continuous pixel coordinates. x runs along columns,
/// y along rows; a point inside pixel (r, c) satisfies c <= x < c + 1.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// One image's head-point annotations plus the image dimensions.
struct AnnotationSet {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<Point> points;

  std::size_t count() const noexcept { return points.size(); }

  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

struct LoadedAnnotations {
  AnnotationSet annotations;
  /// Points moved onto the image border (non-strict mode only).
  std::size_t clamped_points = 0;
};

/// Reads the JSON interchange form
/// `{"image_id": str, "width": int, "height": int, "points": [[x, y], ...]}`.
/// Out-of-bounds points are an error when `strict`, otherwise they are clamped
/// into [0, width) x [0, height) and counted.
LoadedAnnotations load_annotations(const std::filesystem::path& path, bool strict);

/// Same as load_annotations but from an in-memory document.
LoadedAnnotations parse_annotations(const std::string& json_text, bool strict);

std::string serialize_annotations(const AnnotationSet& ann);
void save_annotations(const std::filesystem::path& path, const AnnotationSet& ann);

/// Throws unless dimensions are positive, the id is non-empty and every
/// point is finite and inside the image.
void validate(const AnnotationSet& ann);

/// Moves a coordinate into [0, extent). Returns true when it changed.
bool clamp_coordinate(double& v, int extent) noexcept;

struct ManifestEntry {
  std::filesystem::path annotation;
  std::filesystem::path image;
};

/// Reads a manifest: a JSON array of {"annotation": path, "image": path}.
/// Relative paths resolve against the manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

void save_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

}  // namespace c3
