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

#include "laar/simulation.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "laar/errors.h"
#include "laar/random.h"

namespace laar {
namespace {

constexpr double kMinAspect = 0.5;
constexpr double kMaxAspect = 2.0;

struct Shape {
  double w;
  double h;
};

// sqrt(area) log-uniform in the scale range, aspect log-uniform in
// [0.5, 2], capped to the image.
Shape DrawShape(Rng& rng, const SimConfig& cfg) {
  const double scale = std::exp(
      rng.Uniform(std::log(cfg.box_scale_min), std::log(cfg.box_scale_max)));
  const double log_ratio =
      rng.Uniform(std::log(kMinAspect), std::log(kMaxAspect));
  return {std::min(scale * std::exp(-0.5 * log_ratio), cfg.image_size.width),
          std::min(scale * std::exp(0.5 * log_ratio), cfg.image_size.height)};
}

Box DrawPlacedBox(Rng& rng, const SimConfig& cfg) {
  const Shape s = DrawShape(rng, cfg);
  const double x1 = rng.Uniform(0.0, cfg.image_size.width - s.w);
  const double y1 = rng.Uniform(0.0, cfg.image_size.height - s.h);
  return Box(x1, y1, x1 + s.w, y1 + s.h);
}

double DrawScore(Rng& rng, double alignment, double true_iou) {
  const double u = rng.Uniform();
  const double noise = kScoreNoiseSigma * rng.Normal();
  return std::clamp(alignment * true_iou + (1.0 - alignment) * (u + noise),
                    0.0, 1.0);
}

std::vector<double> OneHot(int classes, int cls, double score) {
  std::vector<double> v(classes, 0.0);
  v[cls] = score;
  return v;
}

double Delta(double a, double b) { return a - b; }

}  // namespace

void SimConfig::Validate() const {
  if (images < 0) throw ConfigError("images must be >= 0");
  if (classes < 1) throw ConfigError("classes must be >= 1");
  if (gts_per_image_min < 0 || gts_per_image_max < gts_per_image_min) {
    throw ConfigError("gts_per_image range is empty");
  }
  if (!(image_size.width > 0.0 && image_size.height > 0.0)) {
    throw ConfigError("image size must be positive");
  }
  if (!(box_scale_min > 0.0) || box_scale_max < box_scale_min) {
    throw ConfigError("box_scale range is empty");
  }
  if (!(jitter_sigma >= 0.0)) throw ConfigError("jitter_sigma must be >= 0");
  if (!(score_alignment >= 0.0 && score_alignment <= 1.0)) {
    throw ConfigError("score_alignment must lie in [0, 1]");
  }
  if (!(locscore_noise_sigma >= 0.0)) {
    throw ConfigError("locscore_noise_sigma must be >= 0");
  }
  if (proposals_per_gt < 0) throw ConfigError("proposals_per_gt must be >= 0");
  if (!(background_fp_rate >= 0.0)) {
    throw ConfigError("background_fp_rate must be >= 0");
  }
}

AnchorLayout DefaultSimLayout(ImageSize image_size) {
  AnchorLayout layout;
  layout.image_size = image_size;
  for (double stride : {8.0, 16.0, 32.0, 64.0, 128.0}) {
    layout.levels.push_back({stride, 4.0 * stride});
  }
  layout.scales = {1.0, std::pow(2.0, 1.0 / 3.0), std::pow(2.0, 2.0 / 3.0)};
  layout.aspect_ratios = {0.5, 1.0, 2.0};
  return layout;
}

SimOutput Simulate(const SimConfig& cfg, const AnchorGrid& grid) {
  cfg.Validate();
  if (!(grid.layout.image_size == cfg.image_size)) {
    throw ConfigError("anchor grid image size differs from simulation image size");
  }
  const double a = cfg.score_alignment;
  const double js = cfg.jitter_sigma;
  const double W = cfg.image_size.width;
  const double H = cfg.image_size.height;

  SimOutput out;
  out.scenes.reserve(cfg.images);
  for (int i = 0; i < cfg.images; ++i) {
    Rng rng(DeriveSeed(cfg.seed, static_cast<std::uint64_t>(i)));
    const std::int64_t image_id = i + 1;

    const auto n_gt = rng.UniformInt(cfg.gts_per_image_min, cfg.gts_per_image_max);
    std::vector<GroundTruth> gts;
    for (std::int64_t g = 0; g < n_gt; ++g) {
      const int cls = static_cast<int>(rng.UniformInt(0, cfg.classes - 1));
      gts.push_back({DrawPlacedBox(rng, cfg), cls});
    }
    Scene scene = MakeScene(image_id, cfg.image_size, std::move(gts));

    auto emit = [&](const Box& box, int cls, double true_iou,
                    std::optional<std::size_t> matched, ProposalSource source) {
      const double score = DrawScore(rng, a, true_iou);
      const double loc_noise = rng.Normal();
      const std::int64_t anchor = NearestAnchor(grid, box);
      const double aiou =
          anchor < 0 ? 0.0 : MatchAnchor(grid.anchors[anchor], scene).aiou;
      const double locscore =
          std::clamp(aiou + cfg.locscore_noise_sigma * loc_noise, 0.0, 1.0);
      out.proposals.push_back(MakeProposal(box, OneHot(cfg.classes, cls, score),
                                           locscore, anchor, image_id));
      out.provenance.push_back({true_iou, aiou, source, matched});
    };

    for (std::size_t g = 0; g < scene.ground_truths.size(); ++g) {
      const GroundTruth& gt = scene.ground_truths[g];
      for (int k = 0; k < cfg.proposals_per_gt; ++k) {
        const double zx = rng.Normal();
        const double zy = rng.Normal();
        const double zw = rng.Normal();
        const double zh = rng.Normal();
        const double w = gt.box.width() * std::exp(js * zw);
        const double h = gt.box.height() * std::exp(js * zh);
        const double cx = gt.box.center_x() + js * gt.box.width() * zx;
        const double cy = gt.box.center_y() + js * gt.box.height() * zy;
        // Without jitter the corners are kept as-is; recomputing them from
        // the center can be off by an ulp.
        const Box box =
            js == 0.0 ? gt.box
                      : Box(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h)
                            .ClippedTo(W, H);
        emit(box, gt.class_id, Iou(box, gt.box), g, ProposalSource::kJitteredGt);
      }
    }

    const int n_bg = rng.Poisson(cfg.background_fp_rate);
    for (int k = 0; k < n_bg; ++k) {
      const int cls = static_cast<int>(rng.UniformInt(0, cfg.classes - 1));
      const Box box = DrawPlacedBox(rng, cfg);
      double best = 0.0;
      std::optional<std::size_t> matched;
      for (std::size_t g = 0; g < scene.ground_truths.size(); ++g) {
        if (scene.ground_truths[g].class_id != cls) continue;
        const double v = Iou(box, scene.ground_truths[g].box);
        if (v > best) {
          best = v;
          matched = g;
        }
      }
      emit(box, cls, best, matched, ProposalSource::kBackground);
    }
    out.scenes.push_back(std::move(scene));
  }
  return out;
}

std::vector<Detection> SuppressAll(std::span<const Proposal> proposals,
                                   const NmsConfig& nms) {
  std::vector<std::int64_t> order;
  std::unordered_map<std::int64_t, std::vector<Proposal>> by_image;
  for (const Proposal& p : proposals) {
    auto [it, inserted] = by_image.try_emplace(p.image_id);
    if (inserted) order.push_back(p.image_id);
    it->second.push_back(p);
  }
  std::vector<Detection> dets;
  for (std::int64_t id : order) {
    auto image_dets = SuppressImage(by_image.at(id), nms);
    dets.insert(dets.end(), image_dets.begin(), image_dets.end());
  }
  return dets;
}

ComparisonTable CompareModes(const SimOutput& sim,
                             std::span<const NmsConfig> modes,
                             const EvalConfig& eval_cfg) {
  if (modes.empty()) throw ConfigError("no suppression modes to compare");
  ComparisonTable table;
  for (const NmsConfig& nms : modes) {
    ComparisonRow row;
    row.nms = nms;
    row.report = Evaluate(SuppressAll(sim.proposals, nms), sim.scenes, eval_cfg);
    table.rows.push_back(std::move(row));
  }
  for (std::size_t r = 0; r < modes.size(); ++r) {
    if (modes[r].mode == NmsMode::kBaseline) {
      table.reference_row = r;
      break;
    }
  }
  const EvalReport& ref = table.rows[table.reference_row].report;
  for (ComparisonRow& row : table.rows) {
    row.d_ap = Delta(row.report.ap_mean, ref.ap_mean);
    row.d_ap_50 = Delta(row.report.ap_50, ref.ap_50);
    row.d_ap_75 = Delta(row.report.ap_75, ref.ap_75);
    row.d_ap_small = Delta(row.report.ap_small, ref.ap_small);
    row.d_ap_medium = Delta(row.report.ap_medium, ref.ap_medium);
    row.d_ap_large = Delta(row.report.ap_large, ref.ap_large);
  }
  return table;
}

ComparisonTable RunComparison(const SimConfig& cfg, const AnchorGrid& grid,
                              std::span<const NmsConfig> modes,
                              const EvalConfig& eval_cfg) {
  if (modes.empty()) throw ConfigError("no suppression modes to compare");
  return CompareModes(Simulate(cfg, grid), modes, eval_cfg);
}

}  // namespace laar
