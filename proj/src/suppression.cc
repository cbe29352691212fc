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

#include "laar/suppression.h"

#include <algorithm>
#include <numeric>

#include "laar/errors.h"

namespace laar {
namespace {

struct Candidate {
  const Box* box;
  double class_score;
  double locscore;
  int label;
  std::int64_t image_id;
};

double ScoreFor(const Proposal& p, int class_id) {
  if (class_id < 0 || static_cast<std::size_t>(class_id) >= p.class_scores.size()) {
    return 0.0;
  }
  return p.class_scores[class_id];
}

// Arg-max class of a proposal, lowest id on ties. -1 when it has no scores.
int ArgMaxClass(const Proposal& p) {
  int best = -1;
  double best_score = -1.0;
  for (std::size_t c = 0; c < p.class_scores.size(); ++c) {
    if (p.class_scores[c] > best_score) {
      best_score = p.class_scores[c];
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<Detection> GreedySuppress(const std::vector<Candidate>& cands,
                                      const NmsConfig& cfg) {
  const std::size_t n = cands.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    rank[i] = cfg.mode == NmsMode::kBaseline
                  ? cands[i].class_score
                  : Cqs(cands[i].class_score, cands[i].locscore);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rank[a] > rank[b]; });

  std::vector<bool> removed(n, false);
  std::vector<Detection> out;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t m = order[pos];
    if (removed[m]) continue;
    removed[m] = true;
    double reported = cands[m].class_score;
    for (std::size_t q = pos + 1; q < n; ++q) {
      const std::size_t j = order[q];
      if (removed[j]) continue;
      if (Iou(*cands[m].box, *cands[j].box) > cfg.epsilon) {
        removed[j] = true;
        if (cfg.mode == NmsMode::kLaarCluster) {
          reported = std::max(cands[j].class_score, reported);
        }
      }
    }
    Detection d;
    d.box = *cands[m].box;
    d.class_id = cands[m].label;
    d.confidence = reported;
    d.cqs = Cqs(cands[m].class_score, cands[m].locscore);
    d.image_id = cands[m].image_id;
    out.push_back(d);
  }
  return out;
}

}  // namespace

NmsMode ParseNmsMode(std::string_view name) {
  if (name == "baseline") return NmsMode::kBaseline;
  if (name == "laar") return NmsMode::kLaar;
  if (name == "laar_cluster" || name == "laar-cluster") {
    return NmsMode::kLaarCluster;
  }
  throw ConfigError("unknown nms mode '" + std::string(name) +
                    "' (expected baseline, laar or laar-cluster)");
}

std::string NmsModeName(NmsMode mode) {
  switch (mode) {
    case NmsMode::kBaseline:
      return "baseline";
    case NmsMode::kLaar:
      return "laar";
    case NmsMode::kLaarCluster:
      return "laar_cluster";
  }
  return "unknown";
}

void NmsConfig::Validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("nms epsilon must lie in [0, 1]");
  }
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (!(score_floor >= 0.0 && score_floor <= 1.0)) {
    throw ConfigError("score_floor must lie in [0, 1]");
  }
}

std::vector<Detection> LaarNms(std::span<const Proposal> proposals,
                               int class_id, const NmsConfig& cfg) {
  cfg.Validate();
  std::vector<Candidate> cands;
  cands.reserve(proposals.size());
  for (const Proposal& p : proposals) {
    cands.push_back({&p.box, ScoreFor(p, class_id), p.locscore, class_id,
                     p.image_id});
  }
  return GreedySuppress(cands, cfg);
}

std::vector<Detection> SuppressImage(std::span<const Proposal> proposals,
                                     const NmsConfig& cfg) {
  cfg.Validate();
  std::vector<Detection> merged;

  if (cfg.per_class) {
    std::size_t num_classes = 0;
    for (const Proposal& p : proposals) {
      num_classes = std::max(num_classes, p.class_scores.size());
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      const int cls = static_cast<int>(c);
      std::vector<Candidate> cands;
      for (const Proposal& p : proposals) {
        const double s = ScoreFor(p, cls);
        if (cfg.score_floor > 0.0 && s < cfg.score_floor) continue;
        cands.push_back({&p.box, s, p.locscore, cls, p.image_id});
      }
      auto dets = GreedySuppress(cands, cfg);
      merged.insert(merged.end(), dets.begin(), dets.end());
    }
  } else {
    std::vector<Candidate> cands;
    for (const Proposal& p : proposals) {
      const int cls = ArgMaxClass(p);
      if (cls < 0) continue;
      const double s = p.class_scores[cls];
      if (cfg.score_floor > 0.0 && s < cfg.score_floor) continue;
      cands.push_back({&p.box, s, p.locscore, cls, p.image_id});
    }
    merged = GreedySuppress(cands, cfg);
  }

  std::stable_sort(merged.begin(), merged.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.confidence > b.confidence;
                   });
  if (merged.size() > static_cast<std::size_t>(cfg.top_k)) {
    merged.resize(cfg.top_k);
  }
  return merged;
}

}  // namespace laar
