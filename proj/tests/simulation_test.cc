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

#include <cmath>

#include "gtest/gtest.h"
#include "laar/errors.h"
#include "laar/random.h"

namespace laar {
namespace {

SimConfig SmallConfig(std::uint64_t seed) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.images = 20;
  cfg.image_size = {256, 256};
  cfg.box_scale_max = 128;
  return cfg;
}

AnchorGrid GridFor(const SimConfig& cfg) {
  return GenerateAnchors(DefaultSimLayout(cfg.image_size));
}

double Correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(RandomTest, SplitMixKnownValues) {
  // Reference outputs of the splitmix64 generator seeded with 0.
  EXPECT_EQ(SplitMix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(1, 1));
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(2, 0));
}

TEST(RandomTest, UniformRangeAndPoissonMean) {
  Rng rng(9);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += rng.Poisson(2.0);
  }
  EXPECT_NEAR(sum / 20000, 2.0, 0.05);
  for (int i = 0; i < 1000; ++i) {
    const auto k = rng.UniformInt(3, 5);
    ASSERT_GE(k, 3);
    ASSERT_LE(k, 5);
  }
}

TEST(SimulateTest, NoiseFreeLimit) {
  SimConfig cfg = SmallConfig(4);
  cfg.score_alignment = 1.0;
  cfg.locscore_noise_sigma = 0.0;
  cfg.jitter_sigma = 0.0;
  cfg.background_fp_rate = 0.0;
  const AnchorGrid grid = GridFor(cfg);
  const SimOutput sim = Simulate(cfg, grid);
  ASSERT_FALSE(sim.proposals.empty());
  std::size_t scene_idx = 0;
  for (std::size_t i = 0; i < sim.proposals.size(); ++i) {
    const Proposal& p = sim.proposals[i];
    while (sim.scenes[scene_idx].image_id != p.image_id) ++scene_idx;
    const Scene& scene = sim.scenes[scene_idx];
    const GroundTruth& gt = scene.ground_truths[*sim.provenance[i].matched_gt];
    ASSERT_EQ(p.box, gt.box);
    ASSERT_EQ(p.class_scores[gt.class_id], 1.0);
    const double expect = MatchAnchor(grid.anchors[NearestAnchor(grid, gt.box)], scene).aiou;
    ASSERT_EQ(p.locscore, expect);
  }
}

TEST(SimulateTest, SameSeedIsBitIdentical) {
  const SimConfig cfg = SmallConfig(5);
  const AnchorGrid grid = GridFor(cfg);
  const SimOutput a = Simulate(cfg, grid);
  const SimOutput b = Simulate(cfg, grid);
  EXPECT_EQ(a.scenes, b.scenes);
  EXPECT_EQ(a.proposals, b.proposals);
  EXPECT_EQ(a.provenance, b.provenance);
  SimConfig other = cfg;
  other.seed = 6;
  EXPECT_NE(Simulate(other, grid).proposals, a.proposals);
}

TEST(SimulateTest, UnalignedScoresAreUncorrelatedWithQuality) {
  SimConfig cfg = SmallConfig(7);
  cfg.images = 400;
  cfg.score_alignment = 0.0;
  const SimOutput sim = Simulate(cfg, GridFor(cfg));
  std::vector<double> score, iou;
  for (std::size_t i = 0; i < sim.proposals.size(); ++i) {
    const Proposal& p = sim.proposals[i];
    score.push_back(*std::max_element(p.class_scores.begin(), p.class_scores.end()));
    iou.push_back(sim.provenance[i].true_iou_with_gt);
  }
  ASSERT_GE(score.size(), 10000u);
  EXPECT_LT(std::abs(Correlation(score, iou)), 0.1);
}

TEST(SimulateTest, ProvenanceIsSound) {
  const SimConfig cfg = SmallConfig(8);
  const AnchorGrid grid = GridFor(cfg);
  const SimOutput sim = Simulate(cfg, grid);
  ASSERT_EQ(sim.provenance.size(), sim.proposals.size());
  std::size_t scene_idx = 0;
  for (std::size_t i = 0; i < sim.proposals.size(); ++i) {
    const Proposal& p = sim.proposals[i];
    const Provenance& pv = sim.provenance[i];
    while (sim.scenes[scene_idx].image_id != p.image_id) ++scene_idx;
    const Scene& scene = sim.scenes[scene_idx];
    ASSERT_GE(pv.true_iou_with_gt, 0.0);
    ASSERT_LE(pv.true_iou_with_gt, 1.0);
    if (pv.matched_gt) {
      ASSERT_EQ(pv.true_iou_with_gt, Iou(p.box, scene.ground_truths[*pv.matched_gt].box));
    } else {
      ASSERT_EQ(pv.source, ProposalSource::kBackground);
      ASSERT_EQ(pv.true_iou_with_gt, 0.0);
    }
    ASSERT_GE(p.anchor_id, 0);
    const AnchorTargets t = ComputeAiouTargets(grid, scene);
    ASSERT_EQ(pv.true_aiou, t.aiou_target[p.anchor_id]);
  }
}

TEST(SimulateTest, RejectsBadConfigs) {
  SimConfig cfg = SmallConfig(1);
  const AnchorGrid grid = GridFor(cfg);
  cfg.score_alignment = 1.5;
  EXPECT_THROW(Simulate(cfg, grid), ConfigError);
  cfg = SmallConfig(1);
  cfg.gts_per_image_min = 5;
  cfg.gts_per_image_max = 2;
  EXPECT_THROW(Simulate(cfg, grid), ConfigError);
  cfg = SmallConfig(1);
  cfg.image_size = {128, 128};
  EXPECT_THROW(Simulate(cfg, grid), ConfigError);
}

TEST(RunComparisonTest, SingleModeHasZeroDelta) {
  const SimConfig cfg = SmallConfig(9);
  NmsConfig nms;
  nms.mode = NmsMode::kBaseline;
  const std::vector<NmsConfig> modes = {nms};
  const ComparisonTable t = RunComparison(cfg, GridFor(cfg), modes, EvalConfig::Coco());
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].d_ap, 0.0);
  EXPECT_EQ(t.rows[0].d_ap_50, 0.0);
  EXPECT_EQ(t.rows[0].d_ap_large, 0.0);
}

TEST(RunComparisonTest, OracleLocscoreHelpsUnderMisalignment) {
  SimConfig cfg = SmallConfig(10);
  cfg.images = 200;
  cfg.score_alignment = 0.3;
  cfg.locscore_noise_sigma = 0.0;
  NmsConfig base, laar;
  base.mode = NmsMode::kBaseline;
  laar.mode = NmsMode::kLaar;
  const std::vector<NmsConfig> modes = {base, laar};
  const ComparisonTable t = RunComparison(cfg, GridFor(cfg), modes, EvalConfig::Coco());
  EXPECT_EQ(t.reference_row, 0u);
  EXPECT_GT(t.rows[1].d_ap, 0.0);
}

TEST(SuppressAllTest, KeepsImagesInFirstSeenOrder) {
  const std::vector<Proposal> props = {
      MakeProposal(Box(0, 0, 5, 5), {0.5}, 1, 0, 3),
      MakeProposal(Box(0, 0, 5, 5), {0.5}, 1, 0, 1),
      MakeProposal(Box(10, 10, 15, 15), {0.9}, 1, 0, 3)};
  const auto dets = SuppressAll(props, NmsConfig{});
  ASSERT_EQ(dets.size(), 3u);
  EXPECT_EQ(dets[0].image_id, 3);
  EXPECT_EQ(dets[1].image_id, 3);
  EXPECT_EQ(dets[2].image_id, 1);
}

}  // namespace
}  // namespace laar
