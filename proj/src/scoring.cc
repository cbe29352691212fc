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

#include "laar/scoring.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "laar/errors.h"

namespace laar {
namespace {

double Huber(double d) {
  const double a = std::abs(d);
  return a < 1.0 ? 0.5 * d * d : a - 0.5;
}

double HuberGrad(double d) { return std::clamp(d, -1.0, 1.0); }

}  // namespace

Proposal MakeProposal(Box box, std::vector<double> class_scores,
                      double locscore, std::int64_t anchor_id,
                      std::int64_t image_id) {
  for (double s : class_scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw DataError("class score " + std::to_string(s) +
                      " outside [0, 1] in image " + std::to_string(image_id));
    }
  }
  if (std::isnan(locscore)) throw DataError("locscore is NaN");
  Proposal p;
  p.box = box;
  p.class_scores = std::move(class_scores);
  p.locscore = std::clamp(locscore, 0.0, 1.0);
  p.anchor_id = anchor_id;
  p.image_id = image_id;
  return p;
}

double Cqs(double p_class, double p_loc) { return p_class * p_loc; }

LocscoreLossKind ParseLocscoreLossKind(std::string_view name) {
  if (name == "bce") return LocscoreLossKind::kBce;
  if (name == "smooth_l1") return LocscoreLossKind::kSmoothL1;
  throw ConfigError("unknown locscore loss kind '" + std::string(name) + "'");
}

LossValue LocscoreLoss(double pred, double target, LocscoreLossKind kind) {
  switch (kind) {
    case LocscoreLossKind::kBce: {
      const double p = std::clamp(pred, kBceEpsilon, 1.0 - kBceEpsilon);
      return {-target * std::log(p) - (1.0 - target) * std::log1p(-p),
              (p - target) / (p * (1.0 - p))};
    }
    case LocscoreLossKind::kSmoothL1: {
      const double d = pred - target;
      return {Huber(d), HuberGrad(d)};
    }
  }
  throw ConfigError("unknown locscore loss kind");
}

BoxLossValue SmoothL1BoxLoss(const std::array<double, 4>& pred_deltas,
                             const std::array<double, 4>& target_deltas) {
  BoxLossValue out;
  for (std::size_t k = 0; k < 4; ++k) {
    const double d = pred_deltas[k] - target_deltas[k];
    out.value += Huber(d);
    out.grad[k] = HuberGrad(d);
  }
  return out;
}

LossReduction ParseLossReduction(std::string_view name) {
  if (name == "mean_positives") return LossReduction::kMeanOverPositives;
  if (name == "mean_all") return LossReduction::kMeanOverAll;
  if (name == "sum_over_positives") return LossReduction::kSumOverPositiveCount;
  throw ConfigError("unknown loss reduction '" + std::string(name) + "'");
}

LossTerm ReduceLocscoreLoss(std::span<const double> preds,
                            std::span<const double> targets,
                            std::span<const Assignment> assignment,
                            LocscoreLossKind kind, LossReduction reduction) {
  if (preds.size() != targets.size() || preds.size() != assignment.size()) {
    throw ConfigError("locscore loss inputs differ in length");
  }
  const std::size_t n = preds.size();
  std::size_t positives = 0;
  std::size_t counted = 0;
  for (Assignment a : assignment) {
    if (a == Assignment::kPositive) ++positives;
    if (a != Assignment::kIgnore) ++counted;
  }

  const bool positives_only = reduction == LossReduction::kMeanOverPositives;
  std::size_t denom = 0;
  switch (reduction) {
    case LossReduction::kMeanOverPositives:
    case LossReduction::kSumOverPositiveCount:
      denom = positives;
      break;
    case LossReduction::kMeanOverAll:
      denom = counted;
      break;
  }

  LossTerm term;
  term.grad.assign(n, 0.0);
  if (denom == 0) return term;
  const double scale = 1.0 / static_cast<double>(denom);
  for (std::size_t i = 0; i < n; ++i) {
    if (assignment[i] == Assignment::kIgnore) continue;
    if (positives_only && assignment[i] != Assignment::kPositive) continue;
    const LossValue v = LocscoreLoss(preds[i], targets[i], kind);
    term.value += v.value * scale;
    term.grad[i] = v.grad * scale;
  }
  return term;
}

LossReport CombinedLoss(double l_cl, double l_bb, double l_lc,
                        const LossWeights& w) {
  for (double v : {l_cl, l_bb, l_lc}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError("negative loss component");
    }
  }
  if (w.lambda_cl < 0.0 || w.lambda_bb < 0.0 || w.lambda_lc < 0.0) {
    throw ConfigError("loss weights must be non-negative");
  }
  LossReport r;
  r.l_cl = l_cl;
  r.l_bb = l_bb;
  r.l_lc = l_lc;
  r.l_total = w.lambda_cl * l_cl + w.lambda_bb * l_bb + w.lambda_lc * l_lc;
  return r;
}

LossReport CombinedLoss(double l_cl, const LossTerm& bb, const LossTerm& lc,
                        const LossWeights& w) {
  LossReport r = CombinedLoss(l_cl, bb.value, lc.value, w);
  r.grad_bb.reserve(bb.grad.size());
  for (double g : bb.grad) r.grad_bb.push_back(w.lambda_bb * g);
  r.grad_lc.reserve(lc.grad.size());
  for (double g : lc.grad) r.grad_lc.push_back(w.lambda_lc * g);
  return r;
}

}  // namespace laar
