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

#ifndef LAAR_SCORING_H_
#define LAAR_SCORING_H_

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "laar/anchors.h"
#include "laar/geometry.h"

namespace laar {

// A candidate detection produced from one anchor: per-class confidences
// P(c|a) and a predicted localization score P(lc|a).
struct Proposal {
  Box box;
  std::vector<double> class_scores;
  double locscore = 0.0;
  std::int64_t anchor_id = -1;
  std::int64_t image_id = 0;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

// Clamps the locscore into [0, 1] and rejects class scores outside [0, 1]
// with DataError.
Proposal MakeProposal(Box box, std::vector<double> class_scores,
                      double locscore, std::int64_t anchor_id,
                      std::int64_t image_id);

// Calibrated quality score: classification confidence times locscore.
double Cqs(double p_class, double p_loc);

enum class LocscoreLossKind { kBce, kSmoothL1 };

LocscoreLossKind ParseLocscoreLossKind(std::string_view name);

struct LossValue {
  double value = 0.0;
  double grad = 0.0;
};

// Predictions are clamped to [kBceEpsilon, 1 - kBceEpsilon] before the log.
inline constexpr double kBceEpsilon = 1e-7;

// Locscore regression loss against a soft AIoU label.
//   bce:       -t ln p - (1 - t) ln(1 - p),  d/dp = (p - t) / (p (1 - p))
//   smooth_l1: beta = 1 Huber loss,          d/dp = clamp(p - t, -1, 1)
LossValue LocscoreLoss(double pred, double target, LocscoreLossKind kind);

struct BoxLossValue {
  double value = 0.0;
  std::array<double, 4> grad = {0.0, 0.0, 0.0, 0.0};
};

// Sum of per-coordinate smooth-L1 (beta = 1) terms over box deltas.
BoxLossValue SmoothL1BoxLoss(const std::array<double, 4>& pred_deltas,
                             const std::array<double, 4>& target_deltas);

// How per-anchor locscore losses are reduced to one scalar.
enum class LossReduction {
  kMeanOverPositives,   // sum over positives / number of positives
  kMeanOverAll,         // sum over non-ignored anchors / their count
  kSumOverPositiveCount,  // sum over non-ignored anchors / number of positives
};

LossReduction ParseLossReduction(std::string_view name);

// A reduced loss term with the gradient with respect to every input.
struct LossTerm {
  double value = 0.0;
  std::vector<double> grad;
};

// Reduces per-anchor locscore losses. Ignored anchors never contribute and
// get zero gradient. A zero denominator yields a zero loss.
LossTerm ReduceLocscoreLoss(std::span<const double> preds,
                            std::span<const double> targets,
                            std::span<const Assignment> assignment,
                            LocscoreLossKind kind, LossReduction reduction);

struct LossWeights {
  double lambda_cl = 1.0;
  double lambda_bb = 1.0;
  double lambda_lc = 1.0;
};

struct LossReport {
  double l_cl = 0.0;
  double l_bb = 0.0;
  double l_lc = 0.0;
  double l_total = 0.0;
  // d l_total / d input, already scaled by the term weights.
  std::vector<double> grad_bb;
  std::vector<double> grad_lc;
};

// l_total = lambda_cl * l_cl + lambda_bb * l_bb + lambda_lc * l_lc.
// Throws ConfigError("negative loss component") for negative or
// non-finite terms, and for negative weights.
LossReport CombinedLoss(double l_cl, double l_bb, double l_lc,
                        const LossWeights& w = {});
LossReport CombinedLoss(double l_cl, const LossTerm& bb, const LossTerm& lc,
                        const LossWeights& w = {});

}  // namespace laar

#endif  // LAAR_SCORING_H_
