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

#include "laar/anchors.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "laar/errors.h"

namespace laar {
namespace {

std::size_t CellCount(double extent, double stride) {
  return static_cast<std::size_t>(std::ceil(extent / stride));
}

// Cell indices whose centers are nearest to `coord` along one axis, clamped
// to [0, cells). The set always contains the nearest cell and both of its
// neighbours, which covers equidistant ties.
std::vector<std::size_t> NearestCells(double coord, double stride,
                                      std::size_t cells) {
  const double raw = std::floor(coord / stride);
  const double last = static_cast<double>(cells) - 1.0;
  std::vector<std::size_t> out;
  for (double d = -1.0; d <= 1.0; d += 1.0) {
    const auto c = static_cast<std::size_t>(std::clamp(raw + d, 0.0, last));
    if (out.empty() || out.back() != c) out.push_back(c);
  }
  return out;
}

}  // namespace

void AnchorLayout::Validate() const {
  if (levels.empty()) throw ConfigError("empty layout");
  if (!(image_size.width > 0.0) || !(image_size.height > 0.0)) {
    throw ConfigError("anchor layout image size must be positive");
  }
  if (scales.empty() || aspect_ratios.empty()) {
    throw ConfigError("anchor layout needs at least one scale and ratio");
  }
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (!(levels[l].stride > 0.0) || !(levels[l].base_size > 0.0)) {
      throw ConfigError("level " + std::to_string(l) +
                        ": stride and base_size must be positive");
    }
    if (l > 0 && !(levels[l].stride > levels[l - 1].stride)) {
      throw ConfigError("strides must be strictly increasing across levels");
    }
  }
  for (double s : scales) {
    if (!(s > 0.0)) throw ConfigError("anchor scales must be positive");
  }
  for (double r : aspect_ratios) {
    if (!(r > 0.0)) throw ConfigError("aspect ratios must be positive");
  }
}

std::size_t AnchorLayout::Columns(std::size_t level) const {
  return CellCount(image_size.width, levels.at(level).stride);
}

std::size_t AnchorLayout::Rows(std::size_t level) const {
  return CellCount(image_size.height, levels.at(level).stride);
}

std::size_t AnchorLayout::AnchorCount() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    n += Columns(l) * Rows(l) * ShapesPerCell();
  }
  return n;
}

AnchorGrid GenerateAnchors(const AnchorLayout& layout) {
  layout.Validate();
  AnchorGrid grid;
  grid.layout = layout;
  grid.anchors.reserve(layout.AnchorCount());
  for (std::size_t l = 0; l < layout.levels.size(); ++l) {
    grid.level_offsets.push_back(grid.anchors.size());
    const AnchorLevel& level = layout.levels[l];
    const std::size_t cols = layout.Columns(l);
    const std::size_t rows = layout.Rows(l);
    for (std::size_t j = 0; j < rows; ++j) {
      const double cy = (static_cast<double>(j) + 0.5) * level.stride;
      for (std::size_t i = 0; i < cols; ++i) {
        const double cx = (static_cast<double>(i) + 0.5) * level.stride;
        for (double scale : layout.scales) {
          for (double ratio : layout.aspect_ratios) {
            const double w = level.base_size * scale * std::sqrt(1.0 / ratio);
            const double h = level.base_size * scale * std::sqrt(ratio);
            Box anchor(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
            if (layout.clip) {
              anchor = anchor.ClippedTo(layout.image_size.width,
                                        layout.image_size.height);
            }
            grid.anchors.push_back(anchor);
          }
        }
      }
    }
  }
  return grid;
}

std::int64_t NearestAnchor(const AnchorGrid& grid, const Box& box) {
  if (grid.anchors.empty()) return -1;
  double best_iou = -1.0;
  std::size_t best_id = 0;
  auto consider = [&](std::size_t id) {
    const double v = Iou(grid.anchors[id], box);
    if (v > best_iou || (v == best_iou && id < best_id)) {
      best_iou = v;
      best_id = id;
    }
  };

  const AnchorLayout& layout = grid.layout;
  if (layout.clip) {
    for (std::size_t id = 0; id < grid.anchors.size(); ++id) consider(id);
    return static_cast<std::int64_t>(best_id);
  }

  const std::size_t shapes = layout.ShapesPerCell();
  for (std::size_t l = 0; l < layout.levels.size(); ++l) {
    const double stride = layout.levels[l].stride;
    const std::size_t cols = layout.Columns(l);
    const auto xs = NearestCells(box.center_x(), stride, cols);
    const auto ys = NearestCells(box.center_y(), stride, layout.Rows(l));
    for (std::size_t j : ys) {
      for (std::size_t i : xs) {
        const std::size_t cell_base =
            grid.level_offsets[l] + (j * cols + i) * shapes;
        for (std::size_t s = 0; s < shapes; ++s) consider(cell_base + s);
      }
    }
  }
  return static_cast<std::int64_t>(best_id);
}

Scene MakeScene(std::int64_t image_id, ImageSize size,
                std::vector<GroundTruth> ground_truths) {
  Scene scene;
  scene.image_id = image_id;
  scene.image_size = size;
  for (GroundTruth& gt : ground_truths) {
    if (gt.class_id < 0) {
      throw DataError("negative class id in image " +
                      std::to_string(image_id));
    }
    gt.box = gt.box.ClippedTo(size.width, size.height);
  }
  scene.ground_truths = std::move(ground_truths);
  return scene;
}

AnchorMatch MatchAnchor(const Box& anchor, const Scene& scene) {
  AnchorMatch match;
  for (std::size_t g = 0; g < scene.ground_truths.size(); ++g) {
    const double v = Iou(anchor, scene.ground_truths[g].box);
    if (v > match.aiou) {
      match.aiou = v;
      match.matched_gt = g;
    }
  }
  return match;
}

AnchorTargets ComputeAiouTargets(const AnchorGrid& grid, const Scene& scene,
                                 double pos_thr, double neg_thr) {
  if (!(0.0 <= neg_thr && neg_thr <= pos_thr && pos_thr <= 1.0)) {
    throw ConfigError("need 0 <= neg_thr <= pos_thr <= 1");
  }
  const std::size_t n = grid.anchors.size();
  AnchorTargets targets;
  targets.aiou_target.resize(n);
  targets.matched_gt.resize(n);
  targets.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AnchorMatch m = MatchAnchor(grid.anchors[i], scene);
    targets.aiou_target[i] = m.aiou;
    targets.matched_gt[i] = m.matched_gt;
    if (m.matched_gt && m.aiou >= pos_thr) {
      targets.assignment[i] = Assignment::kPositive;
    } else if (!m.matched_gt || m.aiou < neg_thr) {
      targets.assignment[i] = Assignment::kNegative;
    } else {
      targets.assignment[i] = Assignment::kIgnore;
    }
  }
  return targets;
}

}  // namespace laar
