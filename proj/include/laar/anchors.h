/* Copyright 2026 The LAAR Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef LAAR_ANCHORS_H_
#define LAAR_ANCHORS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "laar/geometry.h"

namespace laar {

struct ImageSize {
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

struct AnchorLevel {
  double stride = 0.0;
  double base_size = 0.0;

  friend bool operator==(const AnchorLevel&, const AnchorLevel&) = default;
};

// Multi-level anchor layout. Aspect ratios are h / w.
struct AnchorLayout {
  ImageSize image_size;
  std::vector<AnchorLevel> levels;
  std::vector<double> scales = {1.0};
  std::vector<double> aspect_ratios = {1.0};
  // SSD-style runs clip anchors to the image; RetinaNet-style runs do not.
  bool clip = false;

  // Throws ConfigError ("empty layout", non-increasing strides, ...).
  void Validate() const;

  std::size_t ShapesPerCell() const {
    return scales.size() * aspect_ratios.size();
  }
  std::size_t Columns(std::size_t level) const;
  std::size_t Rows(std::size_t level) const;
  // Exact anchor count: sum over levels of cols * rows * |scales| * |ratios|.
  std::size_t AnchorCount() const;

  friend bool operator==(const AnchorLayout&, const AnchorLayout&) = default;
};

// Anchors in level-major, then row-major cell, then (scale x ratio) order.
// The index into `anchors` is the anchor id.
struct AnchorGrid {
  AnchorLayout layout;
  std::vector<Box> anchors;
  // level_offsets[l] is the id of the first anchor of level l.
  std::vector<std::size_t> level_offsets;
};

AnchorGrid GenerateAnchors(const AnchorLayout& layout);

// Id of the anchor with the highest IoU against `box`; ties resolve to the
// lowest id among the candidates examined. Unclipped grids use a local
// search around the nearest cell per (level, shape), which is exact because
// for a fixed anchor shape the overlap is non-increasing in center distance
// along each axis. Clipped grids fall back to a full scan.
std::int64_t NearestAnchor(const AnchorGrid& grid, const Box& box);

struct GroundTruth {
  Box box;
  int class_id = 0;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct Scene {
  std::int64_t image_id = 0;
  ImageSize image_size;
  std::vector<GroundTruth> ground_truths;

  friend bool operator==(const Scene&, const Scene&) = default;
};

// Clips every ground truth to the image bounds and checks class ids.
Scene MakeScene(std::int64_t image_id, ImageSize size,
                std::vector<GroundTruth> ground_truths);

enum class Assignment { kNegative, kIgnore, kPositive };

struct AnchorMatch {
  double aiou = 0.0;
  // Absent when the scene has no ground truth or no overlap at all.
  std::optional<std::size_t> matched_gt;
};

// Max IoU of one anchor against every ground truth of the scene; ties go to
// the lowest ground-truth index.
AnchorMatch MatchAnchor(const Box& anchor, const Scene& scene);

struct AnchorTargets {
  std::vector<double> aiou_target;
  std::vector<std::optional<std::size_t>> matched_gt;
  std::vector<Assignment> assignment;
};

inline constexpr double kDefaultPositiveThreshold = 0.5;
inline constexpr double kDefaultNegativeThreshold = 0.4;

// Per-anchor AIoU regression targets. Positive when aiou >= pos_thr,
// negative when aiou < neg_thr, ignore otherwise. Requires
// 0 <= neg_thr <= pos_thr <= 1.
AnchorTargets ComputeAiouTargets(
    const AnchorGrid& grid, const Scene& scene,
    double pos_thr = kDefaultPositiveThreshold,
    double neg_thr = kDefaultNegativeThreshold);

}  // namespace laar

#endif  // LAAR_ANCHORS_H_
