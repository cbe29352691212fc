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

#ifndef LAAR_SIMULATION_H_
#define LAAR_SIMULATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "laar/anchors.h"
#include "laar/evaluation.h"
#include "laar/scoring.h"
#include "laar/suppression.h"

namespace laar {

// Standard deviation of the classification-score noise term.
inline constexpr double kScoreNoiseSigma = 0.05;

// Synthetic detector. Each ground truth spawns proposals_per_gt jittered
// copies; background proposals are random boxes. For every proposal
//
//   score    = clamp(a * iou(box, gt) + (1 - a) * (U(0,1) + N(0, 0.05)), 0, 1)
//   locscore = clamp(aiou(anchor) + N(0, sigma_lc), 0, 1)
//
// where a is score_alignment and anchor is the max-IoU anchor of the box.
struct SimConfig {
  std::uint64_t seed = 0;
  int images = 100;
  int classes = 3;
  int gts_per_image_min = 1;
  int gts_per_image_max = 8;
  ImageSize image_size{512.0, 512.0};
  // Ground-truth sqrt(area) is log-uniform in this range (pixels).
  double box_scale_min = 16.0;
  double box_scale_max = 256.0;
  // Jitter in (cx, cy, log w, log h), as a fraction of the box size.
  double jitter_sigma = 0.15;
  double score_alignment = 0.3;
  double locscore_noise_sigma = 0.05;
  int proposals_per_gt = 10;
  double background_fp_rate = 2.0;

  void Validate() const;
};

// RetinaNet-style layout: strides 8..128, base 4 x stride, three octave
// scales and aspect ratios {0.5, 1, 2}.
AnchorLayout DefaultSimLayout(ImageSize image_size);

enum class ProposalSource { kJitteredGt, kBackground };

struct Provenance {
  // IoU of the proposal box with matched_gt (0 when absent).
  double true_iou_with_gt = 0.0;
  // AIoU target of the proposal's anchor.
  double true_aiou = 0.0;
  ProposalSource source = ProposalSource::kJitteredGt;
  std::optional<std::size_t> matched_gt;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct SimOutput {
  std::vector<Scene> scenes;
  // Grouped by image, in scene order.
  std::vector<Proposal> proposals;
  std::vector<Provenance> provenance;
};

// Pure function of (cfg, grid). Image i draws from its own substream
// DeriveSeed(cfg.seed, i), and every random draw is made whether or not its
// coefficient is zero, so changing sigma_lc or the score alignment leaves
// all other draws unchanged.
SimOutput Simulate(const SimConfig& cfg, const AnchorGrid& grid);

struct ComparisonRow {
  NmsConfig nms;
  EvalReport report;
  // Differences against the reference row.
  double d_ap = 0.0;
  double d_ap_50 = 0.0;
  double d_ap_75 = 0.0;
  double d_ap_small = 0.0;
  double d_ap_medium = 0.0;
  double d_ap_large = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  // First baseline-mode row, or row 0 when no mode is baseline.
  std::size_t reference_row = 0;
};

// SuppressImage applied per image. Images are processed in order of first
// appearance; the result is the concatenation of per-image outputs.
std::vector<Detection> SuppressAll(std::span<const Proposal> proposals,
                                   const NmsConfig& nms);

// One shared simulation, then suppression and evaluation per mode.
ComparisonTable RunComparison(const SimConfig& cfg, const AnchorGrid& grid,
                              std::span<const NmsConfig> modes,
                              const EvalConfig& eval_cfg);

// Same, over an existing simulation.
ComparisonTable CompareModes(const SimOutput& sim,
                             std::span<const NmsConfig> modes,
                             const EvalConfig& eval_cfg);

}  // namespace laar

#endif  // LAAR_SIMULATION_H_
