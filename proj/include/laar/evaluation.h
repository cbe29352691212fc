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

#ifndef LAAR_EVALUATION_H_
#define LAAR_EVALUATION_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laar/anchors.h"
#include "laar/suppression.h"

namespace laar {

enum class Interpolation {
  kAllPoint,   // area under the monotone precision envelope
  kPoints101,  // envelope sampled at recall 0.00, 0.01, ..., 1.00
  kPoints11,   // envelope sampled at recall 0.0, 0.1, ..., 1.0
};

Interpolation ParseInterpolation(std::string_view name);
std::string InterpolationName(Interpolation interp);

// Ground-truth area strata: small < 32^2 <= medium <= 96^2 < large.
inline constexpr double kSmallMaxArea = 32.0 * 32.0;
inline constexpr double kMediumMaxArea = 96.0 * 96.0;

struct EvalConfig {
  std::vector<double> iou_thresholds;
  Interpolation interpolation = Interpolation::kPoints101;
  int max_dets_per_image = 100;

  // 0.50:0.05:0.95 with 101-point interpolation.
  static EvalConfig Coco();
  // Single 0.5 threshold with all-point interpolation.
  static EvalConfig Voc();

  // Thresholds must be strictly increasing within (0, 1].
  void Validate() const;
};

struct PrCurve {
  int class_id = 0;
  double iou_threshold = 0.0;
  std::vector<double> recall;
  std::vector<double> precision;
};

struct EvalReport {
  double ap_mean = 0.0;
  double ap_50 = 0.0;
  double ap_75 = 0.0;
  // Size-bucket APs are 0 when no class has ground truth in the bucket.
  double ap_small = 0.0;
  double ap_medium = 0.0;
  double ap_large = 0.0;
  // Mean over the configured thresholds, per class with ground truth.
  std::map<int, double> per_class_ap;
  std::vector<PrCurve> pr_curves;
};

enum class MatchFlag { kFalsePositive, kTruePositive, kIgnored };

// Greedy matching of one image's detections against its ground truth. In
// confidence order (ties: input index) each detection takes the unmatched
// same-class ground truth with the highest IoU >= iou_thr. Flags are
// returned in input order. Image ids are not checked.
std::vector<MatchFlag> MatchDetections(std::span<const Detection> dets,
                                       const Scene& scene, double iou_thr);

struct ScoredFlag {
  double confidence = 0.0;
  bool true_positive = false;
};

// Average precision of a ranked list with n_gt ground truths. Sorted
// internally by confidence descending, ties by input index. Throws
// DataError("undefined AP") when n_gt is 0.
double AveragePrecision(std::span<const ScoredFlag> flags, int n_gt,
                        Interpolation interp);

// Raw precision/recall points of a ranked list, same ordering rule.
PrCurve PrecisionRecall(std::span<const ScoredFlag> flags, int n_gt);

// Dataset-level AP family. Every detection's image_id must name a scene,
// otherwise DataError lists the offending ids.
EvalReport Evaluate(std::span<const Detection> dets,
                    std::span<const Scene> scenes, const EvalConfig& cfg);

}  // namespace laar

#endif  // LAAR_EVALUATION_H_
