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

#ifndef LAAR_SUPPRESSION_H_
#define LAAR_SUPPRESSION_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laar/geometry.h"
#include "laar/scoring.h"

namespace laar {

enum class NmsMode {
  kBaseline,     // rank by classification confidence
  kLaar,         // rank by calibrated quality score
  kLaarCluster,  // rank by calibrated quality score, report cluster max
};

// Accepts "baseline", "laar", "laar_cluster" and "laar-cluster".
NmsMode ParseNmsMode(std::string_view name);
std::string NmsModeName(NmsMode mode);

struct NmsConfig {
  double epsilon = 0.5;
  NmsMode mode = NmsMode::kLaarCluster;
  int top_k = 100;
  bool per_class = true;
  // Pre-filter applied by SuppressImage: a proposal enters the candidate set
  // of class c only when its class-c score is >= score_floor. Zero disables.
  double score_floor = 0.01;

  void Validate() const;
};

struct Detection {
  Box box;
  int class_id = 0;
  // Reported score: the classification confidence of the survivor, raised to
  // the cluster maximum in kLaarCluster mode.
  double confidence = 0.0;
  // Ranking score the survivor was selected with.
  double cqs = 0.0;
  std::int64_t image_id = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Greedy suppression over one class. Each round picks the remaining proposal
// with the highest ranking score (ties: lower input index), removes every
// remaining proposal with IoU strictly greater than epsilon against it and,
// in cluster mode, raises the reported confidence to the maximum
// classification score over the removed set. Output is in selection order.
//
// Proposals lacking a score for `class_id` are treated as score 0.
std::vector<Detection> LaarNms(std::span<const Proposal> proposals,
                               int class_id, const NmsConfig& cfg);

// Full per-image inference: score floor, per-class (or class-agnostic)
// suppression, merge, sort by confidence descending (stable), keep top_k.
//
// With per_class = false, each proposal competes once under its arg-max
// class (ties: lowest class id).
std::vector<Detection> SuppressImage(std::span<const Proposal> proposals,
                                     const NmsConfig& cfg);

}  // namespace laar

#endif  // LAAR_SUPPRESSION_H_
