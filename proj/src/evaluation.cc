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

#include "laar/evaluation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "laar/errors.h"

namespace laar {
namespace {

enum class SizeBucket { kAll = 0, kSmall, kMedium, kLarge };
constexpr int kNumBuckets = 4;

bool InBucket(double area, SizeBucket bucket) {
  switch (bucket) {
    case SizeBucket::kAll:
      return true;
    case SizeBucket::kSmall:
      return area < kSmallMaxArea;
    case SizeBucket::kMedium:
      return area >= kSmallMaxArea && area <= kMediumMaxArea;
    case SizeBucket::kLarge:
      return area > kMediumMaxArea;
  }
  return false;
}

// Stable order: confidence descending, then position.
std::vector<std::size_t> RankOrder(std::span<const ScoredFlag> flags) {
  std::vector<std::size_t> order(flags.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return flags[a].confidence > flags[b].confidence;
  });
  return order;
}

// Right-to-left running maximum of precision.
std::vector<double> Envelope(const std::vector<double>& precision) {
  std::vector<double> env = precision;
  for (std::size_t i = env.size(); i-- > 1;) {
    env[i - 1] = std::max(env[i - 1], env[i]);
  }
  return env;
}

double SampledAp(const std::vector<double>& recall,
                 const std::vector<double>& env, int samples) {
  const int steps = samples - 1;
  double sum = 0.0;
  for (int s = 0; s <= steps; ++s) {
    const double r = static_cast<double>(s) / static_cast<double>(steps);
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += env[it - recall.begin()];
  }
  return sum / static_cast<double>(samples);
}

// One (image, class) matching problem, shared across thresholds and buckets.
struct ImageClassBlock {
  std::vector<std::size_t> det_ids;  // global detection index, ranked
  std::vector<double> det_area;
  std::vector<double> gt_area;
  IouMatrix ious{0, 0};
};

// Greedy match for one block. Unmatched ground truth outside the bucket is
// ignored; a detection matched to ignored ground truth, or unmatched and
// itself outside the bucket, is ignored.
std::vector<MatchFlag> MatchBlock(const ImageClassBlock& block, double thr,
                                  SizeBucket bucket) {
  const std::size_t nd = block.det_ids.size();
  const std::size_t ng = block.gt_area.size();
  std::vector<bool> gt_ignored(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    gt_ignored[g] = !InBucket(block.gt_area[g], bucket);
  }
  std::vector<bool> used(ng, false);
  std::vector<MatchFlag> flags(nd, MatchFlag::kFalsePositive);
  for (std::size_t d = 0; d < nd; ++d) {
    int match = -1;
    for (int pass = 0; pass < 2 && match < 0; ++pass) {
      const bool want_ignored = pass == 1;
      double best = -1.0;
      for (std::size_t g = 0; g < ng; ++g) {
        if (used[g] || gt_ignored[g] != want_ignored) continue;
        const double v = block.ious(d, g);
        if (v >= thr && v > best) {
          best = v;
          match = static_cast<int>(g);
        }
      }
    }
    if (match >= 0) {
      used[match] = true;
      flags[d] = gt_ignored[match] ? MatchFlag::kIgnored : MatchFlag::kTruePositive;
    } else if (!InBucket(block.det_area[d], bucket)) {
      flags[d] = MatchFlag::kIgnored;
    }
  }
  return flags;
}

std::vector<double> CocoThresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50.0 + 5.0 * i) / 100.0);
  return t;
}

std::size_t FindThreshold(const std::vector<double>& thresholds, double t) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (std::abs(thresholds[i] - t) < 1e-12) return i;
  }
  return thresholds.size();
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

Interpolation ParseInterpolation(std::string_view name) {
  if (name == "all_point") return Interpolation::kAllPoint;
  if (name == "points_101") return Interpolation::kPoints101;
  if (name == "points_11") return Interpolation::kPoints11;
  throw ConfigError("unknown interpolation '" + std::string(name) + "'");
}

std::string InterpolationName(Interpolation interp) {
  switch (interp) {
    case Interpolation::kAllPoint:
      return "all_point";
    case Interpolation::kPoints101:
      return "points_101";
    case Interpolation::kPoints11:
      return "points_11";
  }
  return "unknown";
}

EvalConfig EvalConfig::Coco() {
  EvalConfig cfg;
  cfg.iou_thresholds = CocoThresholds();
  cfg.interpolation = Interpolation::kPoints101;
  return cfg;
}

EvalConfig EvalConfig::Voc() {
  EvalConfig cfg;
  cfg.iou_thresholds = {0.5};
  cfg.interpolation = Interpolation::kAllPoint;
  return cfg;
}

void EvalConfig::Validate() const {
  if (iou_thresholds.empty()) throw ConfigError("no IoU thresholds");
  for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
    const double t = iou_thresholds[i];
    if (!(t > 0.0 && t <= 1.0)) {
      throw ConfigError("IoU thresholds must lie in (0, 1]");
    }
    if (i > 0 && !(t > iou_thresholds[i - 1])) {
      throw ConfigError("IoU thresholds must be strictly increasing");
    }
  }
  if (max_dets_per_image < 1) throw ConfigError("max_dets_per_image must be >= 1");
}

std::vector<MatchFlag> MatchDetections(std::span<const Detection> dets,
                                       const Scene& scene, double iou_thr) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].confidence > dets[b].confidence;
  });
  const auto& gts = scene.ground_truths;
  std::vector<bool> used(gts.size(), false);
  std::vector<MatchFlag> flags(dets.size(), MatchFlag::kFalsePositive);
  for (std::size_t d : order) {
    int match = -1;
    double best = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].class_id != dets[d].class_id) continue;
      const double v = Iou(dets[d].box, gts[g].box);
      if (v >= iou_thr && v > best) {
        best = v;
        match = static_cast<int>(g);
      }
    }
    if (match >= 0) {
      used[match] = true;
      flags[d] = MatchFlag::kTruePositive;
    }
  }
  return flags;
}

PrCurve PrecisionRecall(std::span<const ScoredFlag> flags, int n_gt) {
  if (n_gt <= 0) throw DataError("undefined AP: no ground truth");
  PrCurve curve;
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t i : RankOrder(flags)) {
    if (flags[i].true_positive) {
      tp += 1.0;
    } else {
      fp += 1.0;
    }
    curve.recall.push_back(tp / n_gt);
    curve.precision.push_back(tp / (tp + fp));
  }
  return curve;
}

double AveragePrecision(std::span<const ScoredFlag> flags, int n_gt,
                        Interpolation interp) {
  const PrCurve curve = PrecisionRecall(flags, n_gt);
  const std::vector<double> env = Envelope(curve.precision);
  switch (interp) {
    case Interpolation::kAllPoint: {
      double ap = 0.0;
      double prev_recall = 0.0;
      for (std::size_t i = 0; i < env.size(); ++i) {
        ap += (curve.recall[i] - prev_recall) * env[i];
        prev_recall = curve.recall[i];
      }
      return ap;
    }
    case Interpolation::kPoints101:
      return SampledAp(curve.recall, env, 101);
    case Interpolation::kPoints11:
      return SampledAp(curve.recall, env, 11);
  }
  throw ConfigError("unknown interpolation");
}

EvalReport Evaluate(std::span<const Detection> dets,
                    std::span<const Scene> scenes, const EvalConfig& cfg) {
  cfg.Validate();

  std::unordered_map<std::int64_t, std::size_t> scene_index;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    scene_index.emplace(scenes[s].image_id, s);
  }
  std::set<std::int64_t> unknown;
  for (const Detection& d : dets) {
    if (!scene_index.contains(d.image_id)) unknown.insert(d.image_id);
  }
  if (!unknown.empty()) {
    std::ostringstream os;
    os << "detections reference unknown image ids:";
    for (auto id : unknown) os << " " << id;
    throw DataError(os.str());
  }

  // Per-image detection cap, by confidence with input order on ties.
  std::vector<std::vector<std::size_t>> per_image(scenes.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    per_image[scene_index.at(dets[i].image_id)].push_back(i);
  }
  for (auto& ids : per_image) {
    std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
      return dets[a].confidence > dets[b].confidence;
    });
    if (ids.size() > static_cast<std::size_t>(cfg.max_dets_per_image)) {
      ids.resize(cfg.max_dets_per_image);
    }
  }

  std::set<int> class_set;
  for (const Scene& s : scenes) {
    for (const GroundTruth& gt : s.ground_truths) class_set.insert(gt.class_id);
  }
  const std::vector<int> classes(class_set.begin(), class_set.end());
  std::unordered_map<int, std::size_t> class_slot;
  for (std::size_t c = 0; c < classes.size(); ++c) class_slot[classes[c]] = c;

  std::vector<double> thresholds = cfg.iou_thresholds;
  for (double extra : {0.5, 0.75}) {
    if (FindThreshold(thresholds, extra) == thresholds.size()) {
      thresholds.push_back(extra);
    }
  }
  const std::size_t n_cfg_thr = cfg.iou_thresholds.size();
  const std::size_t nt = thresholds.size();
  const std::size_t nc = classes.size();

  // cells[bucket][thr][class] collects (confidence, global index, tp).
  struct Entry {
    double confidence;
    std::size_t index;
    bool tp;
  };
  std::vector<std::vector<std::vector<std::vector<Entry>>>> cells(
      kNumBuckets, std::vector<std::vector<std::vector<Entry>>>(
                       nt, std::vector<std::vector<Entry>>(nc)));
  std::vector<std::vector<int>> n_gt(kNumBuckets, std::vector<int>(nc, 0));

  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const Scene& scene = scenes[s];
    for (std::size_t c = 0; c < nc; ++c) {
      ImageClassBlock block;
      std::vector<Box> gt_boxes;
      for (const GroundTruth& gt : scene.ground_truths) {
        if (gt.class_id != classes[c]) continue;
        gt_boxes.push_back(gt.box);
        block.gt_area.push_back(Area(gt.box));
      }
      for (int b = 0; b < kNumBuckets; ++b) {
        for (double a : block.gt_area) {
          if (InBucket(a, static_cast<SizeBucket>(b))) ++n_gt[b][c];
        }
      }
      std::vector<Box> det_boxes;
      for (std::size_t id : per_image[s]) {
        if (dets[id].class_id != classes[c]) continue;
        block.det_ids.push_back(id);
        block.det_area.push_back(Area(dets[id].box));
        det_boxes.push_back(dets[id].box);
      }
      if (block.det_ids.empty()) continue;
      block.ious = ComputeIouMatrix(det_boxes, gt_boxes);
      for (int b = 0; b < kNumBuckets; ++b) {
        for (std::size_t t = 0; t < nt; ++t) {
          const auto flags =
              MatchBlock(block, thresholds[t], static_cast<SizeBucket>(b));
          for (std::size_t d = 0; d < flags.size(); ++d) {
            if (flags[d] == MatchFlag::kIgnored) continue;
            const std::size_t id = block.det_ids[d];
            cells[b][t][c].push_back({dets[id].confidence, id,
                                      flags[d] == MatchFlag::kTruePositive});
          }
        }
      }
    }
  }

  auto cell_flags = [&](int b, std::size_t t, std::size_t c) {
    auto& entries = cells[b][t][c];
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
      if (x.confidence != y.confidence) return x.confidence > y.confidence;
      return x.index < y.index;
    });
    std::vector<ScoredFlag> flags;
    flags.reserve(entries.size());
    for (const Entry& e : entries) flags.push_back({e.confidence, e.tp});
    return flags;
  };

  // ap[bucket][thr][class], NaN where the cell has no ground truth.
  const double kSkip = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<std::vector<double>>> ap(
      kNumBuckets, std::vector<std::vector<double>>(nt, std::vector<double>(nc, kSkip)));
  EvalReport report;
  for (int b = 0; b < kNumBuckets; ++b) {
    for (std::size_t t = 0; t < nt; ++t) {
      for (std::size_t c = 0; c < nc; ++c) {
        if (n_gt[b][c] == 0) continue;
        const auto flags = cell_flags(b, t, c);
        ap[b][t][c] = AveragePrecision(flags, n_gt[b][c], cfg.interpolation);
        if (b == 0 && t < n_cfg_thr) {
          PrCurve curve = PrecisionRecall(flags, n_gt[b][c]);
          curve.class_id = classes[c];
          curve.iou_threshold = thresholds[t];
          report.pr_curves.push_back(std::move(curve));
        }
      }
    }
  }

  // Class-major summation order, ascending class id then threshold.
  auto mean_over = [&](int b, std::size_t t_begin, std::size_t t_end) {
    std::vector<double> v;
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t t = t_begin; t < t_end; ++t) {
        if (!std::isnan(ap[b][t][c])) v.push_back(ap[b][t][c]);
      }
    }
    return Mean(v);
  };
  const std::size_t t50 = FindThreshold(thresholds, 0.5);
  const std::size_t t75 = FindThreshold(thresholds, 0.75);
  report.ap_mean = mean_over(0, 0, n_cfg_thr);
  report.ap_50 = mean_over(0, t50, t50 + 1);
  report.ap_75 = mean_over(0, t75, t75 + 1);
  report.ap_small = mean_over(static_cast<int>(SizeBucket::kSmall), 0, n_cfg_thr);
  report.ap_medium = mean_over(static_cast<int>(SizeBucket::kMedium), 0, n_cfg_thr);
  report.ap_large = mean_over(static_cast<int>(SizeBucket::kLarge), 0, n_cfg_thr);
  for (std::size_t c = 0; c < nc; ++c) {
    std::vector<double> v;
    for (std::size_t t = 0; t < n_cfg_thr; ++t) v.push_back(ap[0][t][c]);
    report.per_class_ap[classes[c]] = Mean(v);
  }
  return report;
}

}  // namespace laar
