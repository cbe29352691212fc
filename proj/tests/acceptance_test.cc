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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.h"
#include "laar/anchors.h"
#include "laar/cli.h"
#include "laar/dataio.h"
#include "laar/evaluation.h"
#include "laar/geometry.h"
#include "laar/scoring.h"
#include "laar/simulation.h"
#include "laar/suppression.h"
#include "oracles.h"

namespace laar {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

// 1. IoU against unit-cell counting plus invariances, under 5 s.
Outcome GeometryOracle() {
  Outcome o;
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> coord(0, 63);
  auto int_box = [&] {
    int x1 = coord(rng), x2 = coord(rng), y1 = coord(rng), y2 = coord(rng);
    if (x2 < x1) std::swap(x1, x2);
    if (y2 < y1) std::swap(y1, y2);
    return Box(x1, y1, x2, y2);
  };
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Box a = int_box(), b = int_box();
    worst = std::max(worst, std::abs(Iou(a, b) - oracle::CellCountIou(a, b)));
  }
  if (worst > 1e-9) o.Fail(Fmt("max |iou - cells| = %.3g", worst));

  std::uniform_real_distribution<double> pos(-100.0, 100.0);
  std::uniform_real_distribution<double> ext(0.0, 50.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  double worst_inv = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = pos(rng), y = pos(rng), u = pos(rng), v = pos(rng);
    const Box a(x, y, x + ext(rng), y + ext(rng));
    const Box b(u, v, u + ext(rng), v + ext(rng));
    const double base = Iou(a, b);
    if (base != Iou(b, a)) o.Fail("iou is not symmetric");
    if (base < 0.0 || base > 1.0) o.Fail("iou outside [0, 1]");
    const double dx = pos(rng), dy = pos(rng), s = scale(rng);
    worst_inv = std::max(worst_inv,
                         std::abs(Iou(a.Translated(dx, dy), b.Translated(dx, dy)) - base));
    worst_inv = std::max(worst_inv, std::abs(Iou(a.Scaled(s), b.Scaled(s)) - base));
  }
  if (worst_inv > 1e-9) o.Fail(Fmt("invariance drift %.3g", worst_inv));
  if (o.pass) {
    o.detail = Fmt("1e4 integer pairs max err %.3g; invariance drift %.3g", worst, worst_inv);
  }
  return o;
}

std::vector<Proposal> RandomProposalSet(std::mt19937_64& rng, int n, int classes) {
  std::uniform_real_distribution<double> pos(0.0, 100.0);
  std::uniform_real_distribution<double> ext(2.0, 40.0);
  std::uniform_int_distribution<int> coarse(0, 20);
  std::vector<Proposal> out;
  for (int i = 0; i < n; ++i) {
    const double x = pos(rng), y = pos(rng);
    std::vector<double> s(classes);
    for (double& v : s) v = coarse(rng) / 20.0;
    out.push_back(MakeProposal(Box(x, y, x + ext(rng), y + ext(rng)), s, 1.0, i, 1));
  }
  return out;
}

// 2. Hand-traced suppression fixture and the unit-locscore reduction, under 10 s.
Outcome SuppressionFixtures() {
  Outcome o;
  const std::vector<Proposal> pair = {MakeProposal(Box(0, 0, 10, 10), {0.9}, 0.4, 0, 1),
                                      MakeProposal(Box(0, 0, 10, 7), {0.6}, 0.8, 1, 1)};
  NmsConfig cfg;
  cfg.mode = NmsMode::kLaarCluster;
  cfg.epsilon = 0.5;
  const auto dets = LaarNms(pair, 0, cfg);
  if (dets.size() != 1 || !(dets[0].box == pair[1].box) || dets[0].confidence != 0.9 ||
      std::abs(dets[0].cqs - 0.48) > 1e-15) {
    o.Fail("two-box fixture did not yield {b2, 0.9, 0.48}");
  }
  cfg.mode = NmsMode::kLaar;
  const auto plain = LaarNms(pair, 0, cfg);
  if (plain.size() != 1 || plain[0].confidence != 0.6) o.Fail("plain mode confidence != 0.6");

  std::mt19937_64 rng(102);
  std::uniform_int_distribution<int> size(1, 60);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto props = RandomProposalSet(rng, size(rng), 1 + t % 3);
    NmsConfig laar, base;
    laar.mode = NmsMode::kLaar;
    base.mode = NmsMode::kBaseline;
    laar.per_class = base.per_class = (t % 2 == 0);
    if (SuppressImage(props, laar) != SuppressImage(props, base)) ++mismatches;
  }
  if (mismatches) o.Fail(std::to_string(mismatches) + " of 1000 reduction sets differ");
  if (o.pass) o.detail = "fixture {b2, 0.9, 0.48}; 1000/1000 reduction sets identical";
  return o;
}

// 3. Analytic gradients against central differences, exact weighted sums.
Outcome LossGradients() {
  Outcome o;
  constexpr double kH = 1e-6;
  constexpr double kRel = 1e-4;
  // Relative error is measured against max(|fd|, 1e-8) so that exact zeros
  // do not divide by zero.
  auto rel = [](double analytic, double fd) {
    return std::abs(analytic - fd) / std::max(std::abs(fd), 1e-8);
  };
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> p(0.01, 0.99);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  double worst = 0.0;
  int points = 0;
  for (int i = 0; i < 1000; ++i) {
    const double pred = p(rng), target = t(rng);
    for (LocscoreLossKind kind : {LocscoreLossKind::kBce, LocscoreLossKind::kSmoothL1}) {
      const double fd = oracle::CentralDifference(
          [&](double x) { return LocscoreLoss(x, target, kind).value; }, pred, kH);
      worst = std::max(worst, rel(LocscoreLoss(pred, target, kind).grad, fd));
      ++points;
    }
    std::array<double, 4> pr{}, tg{};
    for (int k = 0; k < 4; ++k) {
      pr[k] = d(rng);
      tg[k] = d(rng);
    }
    const BoxLossValue v = SmoothL1BoxLoss(pr, tg);
    for (int k = 0; k < 4; ++k) {
      if (std::abs(std::abs(pr[k] - tg[k]) - 1.0) < 10 * kH) continue;  // kink
      const double fd = oracle::CentralDifference(
          [&](double x) {
            auto q = pr;
            q[k] = x;
            return SmoothL1BoxLoss(q, tg).value;
          },
          pr[k], kH);
      worst = std::max(worst, rel(v.grad[k], fd));
      ++points;
    }
  }
  if (worst > kRel) o.Fail(Fmt("worst relative gradient error %.3g", worst));

  std::uniform_real_distribution<double> l(0.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = l(rng), b = l(rng), c = l(rng);
    if (CombinedLoss(a, b, c).l_total != a + b + c) {
      o.Fail("unit-weight combined loss is not the exact sum");
      break;
    }
  }
  if (CombinedLoss(1.0, 2.0, 0.5).l_total != 3.5) o.Fail("combined (1, 2, 0.5) != 3.5");
  if (o.pass) {
    o.detail = Fmt("%.0f gradient points, worst relative error %.3g; sums exact", points, worst);
  }
  return o;
}

// 4. AP engine against the naive evaluator, plus pinned fixtures.
Outcome EvaluatorOracle() {
  Outcome o;
  std::mt19937_64 rng(104);
  double worst_101 = 0.0;
  int exact_all = 0;
  for (int t = 0; t < 100; ++t) {
    const auto ds = fixture::RandomEvalDataset(rng, 5, 20, 2);
    for (auto [interp, naive] :
         {std::pair{Interpolation::kAllPoint, oracle::NaiveInterp::kAllPoint},
          std::pair{Interpolation::kPoints101, oracle::NaiveInterp::kPoints101}}) {
      EvalConfig cfg = EvalConfig::Coco();
      cfg.interpolation = interp;
      const EvalReport got = Evaluate(ds.dets, ds.scenes, cfg);
      const oracle::NaiveReport want =
          oracle::NaiveEvaluator(cfg.iou_thresholds, naive, cfg.max_dets_per_image)
              .Run(ds.dets, ds.scenes);
      std::vector<std::pair<double, double>> vals = {
          {got.ap_mean, want.ap_mean},   {got.ap_50, want.ap_50},
          {got.ap_75, want.ap_75},       {got.ap_small, want.ap_small},
          {got.ap_medium, want.ap_medium}, {got.ap_large, want.ap_large}};
      for (const auto& [c, v] : want.per_class_ap) {
        vals.push_back({got.per_class_ap.count(c) ? got.per_class_ap.at(c) : -1.0, v});
      }
      if (got.per_class_ap.size() != want.per_class_ap.size()) o.Fail("class sets differ");
      for (const auto& [g, w] : vals) {
        if (interp == Interpolation::kAllPoint) {
          if (g != w) o.Fail(Fmt("all_point mismatch %.17g vs %.17g", g, w));
        } else {
          worst_101 = std::max(worst_101, std::abs(g - w));
        }
      }
      if (interp == Interpolation::kAllPoint && o.pass) ++exact_all;
    }
  }
  if (worst_101 > 1e-9) o.Fail(Fmt("points_101 max error %.3g", worst_101));

  const std::vector<ScoredFlag> tp = {{0.9, true}};
  const std::vector<ScoredFlag> fp_tp = {{0.9, false}, {0.8, true}};
  if (AveragePrecision(tp, 1, Interpolation::kAllPoint) != 1.0 ||
      AveragePrecision(tp, 1, Interpolation::kPoints101) != 1.0) {
    o.Fail("[tp] fixture != 1.0");
  }
  if (AveragePrecision(fp_tp, 1, Interpolation::kAllPoint) != 0.5) o.Fail("[fp,tp] fixture != 0.5");
  if (o.pass) {
    o.detail = Fmt("100 datasets: all_point exact, points_101 max error %.3g; fixtures hold",
                   worst_101);
  }
  return o;
}

// One-sided sign test: P(X >= k) for X ~ Binomial(n, 1/2).
double SignTestP(int positives, int n) {
  double p = 0.0;
  for (int k = positives; k <= n; ++k) {
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) -
                  n * std::log(2.0));
  }
  return p;
}

// 5. Desk-scale ΔAP experiment, under 5 minutes.
Outcome DeltaApExperiment() {
  Outcome o;
  constexpr int kSeeds = 20;
  const std::vector<double> sigmas = {0.3, 0.15, 0.05, 0.0};
  SimConfig cfg;
  cfg.images = 500;
  cfg.score_alignment = 0.3;
  cfg.jitter_sigma = 0.15;
  const AnchorGrid grid = GenerateAnchors(DefaultSimLayout(cfg.image_size));
  NmsConfig base, cluster;
  base.mode = NmsMode::kBaseline;
  cluster.mode = NmsMode::kLaarCluster;
  base.epsilon = cluster.epsilon = 0.5;
  base.top_k = cluster.top_k = 100;
  const std::vector<NmsConfig> modes = {base, cluster};

  std::vector<double> means;
  int positives_at_005 = 0;
  for (double sigma : sigmas) {
    cfg.locscore_noise_sigma = sigma;
    double sum = 0.0;
    int positives = 0;
    for (int s = 1; s <= kSeeds; ++s) {
      cfg.seed = static_cast<std::uint64_t>(s);
      const ComparisonTable t = RunComparison(cfg, grid, modes, EvalConfig::Coco());
      sum += t.rows[1].d_ap;
      positives += t.rows[1].d_ap > 0.0;
    }
    means.push_back(sum / kSeeds);
    if (sigma == 0.05) positives_at_005 = positives;
  }
  const double mean_005 = means[2];
  const double p = SignTestP(positives_at_005, kSeeds);
  if (!(mean_005 > 0.0)) o.Fail(Fmt("mean dAP at sigma 0.05 = %.4g", mean_005));
  if (!(p < 0.05)) o.Fail(Fmt("sign test p = %.3g (%.0f/20 positive)", p, positives_at_005));
  for (std::size_t i = 1; i < means.size(); ++i) {
    if (means[i] < means[i - 1]) {
      o.Fail(Fmt("mean dAP decreases from sigma %.2f to %.2f", sigmas[i - 1], sigmas[i]));
    }
  }
  std::ostringstream os;
  os << "sigma 0.05: mean dAP " << mean_005 << ", " << positives_at_005
     << "/20 positive, sign-test p " << p << "; means by sigma (0.3, 0.15, 0.05, 0):";
  for (double m : means) os << " " << m;
  if (o.pass) {
    o.detail = os.str();
  } else {
    o.detail += "; " + os.str();
  }
  return o;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 6. Every command rerun with the same config gives byte-identical files.
Outcome CliDeterminism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "laar_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "config.json";
  WriteTextFile(config, R"({"simulation": {"images": 20, "seed": 5},
                            "nms": {"mode": "laar_cluster"}})");
  std::ostringstream sink;
  int files = 0;
  for (const char* cmd : {"anchors", "simulate", "nms", "eval", "compare"}) {
    std::vector<std::string> runs = {"run1", "run2"};
    for (const std::string& run : runs) {
      const std::string out = (root / run).string();
      const std::string cfg = config.string();
      const char* argv[] = {"laar", "--config", cfg.c_str(), "--out", out.c_str(), cmd};
      const int code = cli::Run(6, argv, sink, sink);
      if (code != 0) o.Fail(std::string(cmd) + " exited " + std::to_string(code));
    }
  }
  for (const auto& entry : fs::directory_iterator(root / "run1")) {
    const std::string a = Slurp(entry.path());
    const std::string b = Slurp(root / "run2" / entry.path().filename());
    if (ConfigHash(a) != ConfigHash(b) || a != b) {
      o.Fail(entry.path().filename().string() + " differs between runs");
    }
    ++files;
  }
  if (files != 7) o.Fail("expected 7 output files, found " + std::to_string(files));
  fs::remove_all(root);
  if (o.pass) o.detail = "anchors/simulate/nms/eval/compare: 7 files byte-identical";
  return o;
}

// 7. AIoU targets against direct IoU with the matched ground truth.
Outcome AiouTargets() {
  Outcome o;
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> n_gt(0, 6);
  int no_gt_scenes = 0;
  for (int t = 0; t < 1000; ++t) {
    AnchorLayout layout;
    const double w = 32 + std::floor(u(rng) * 96), h = 32 + std::floor(u(rng) * 96);
    layout.image_size = {w, h};
    const double stride = 8.0 * (1 + t % 3);
    layout.levels = {{stride, stride * (1.0 + 3.0 * u(rng))}};
    if (t % 2) layout.levels.push_back({2 * stride, 4 * stride});
    layout.scales = {1.0, 1.0 + u(rng)};
    layout.aspect_ratios = {0.5, 1.0, 2.0};
    layout.clip = t % 5 == 0;
    const AnchorGrid grid = GenerateAnchors(layout);

    std::vector<GroundTruth> gts;
    const int g = t % 10 == 0 ? 0 : n_gt(rng);
    for (int k = 0; k < g; ++k) {
      double x1 = u(rng) * w, x2 = u(rng) * w, y1 = u(rng) * h, y2 = u(rng) * h;
      if (x2 < x1) std::swap(x1, x2);
      if (y2 < y1) std::swap(y1, y2);
      gts.push_back({Box(x1, y1, x2, y2), k % 3});
    }
    const Scene scene = MakeScene(1, {w, h}, std::move(gts));
    const AnchorTargets targets = ComputeAiouTargets(grid, scene);
    if (scene.ground_truths.empty()) ++no_gt_scenes;
    for (std::size_t i = 0; i < grid.anchors.size(); ++i) {
      const auto& m = targets.matched_gt[i];
      if (scene.ground_truths.empty()) {
        if (targets.aiou_target[i] != 0.0 || m) o.Fail("no-GT scene has a nonzero target");
        continue;
      }
      double best = 0.0;
      for (const GroundTruth& gt : scene.ground_truths) {
        best = std::max(best, Iou(grid.anchors[i], gt.box));
      }
      const double direct = m ? Iou(grid.anchors[i], scene.ground_truths[*m].box) : 0.0;
      if (targets.aiou_target[i] != direct || targets.aiou_target[i] != best) {
        o.Fail(Fmt("target mismatch in trial %.0f", t));
      }
    }
  }
  if (o.pass) {
    o.detail = "1000 (grid, scene) pairs exact; " + std::to_string(no_gt_scenes) +
               " no-GT scenes all zero";
  }
  return o;
}

}  // namespace
}  // namespace laar

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<laar::Outcome()> run;
    double budget_s;  // 0 means no runtime bound
  };
  const std::vector<Criterion> criteria = {
      {1, "geometry oracle", laar::GeometryOracle, 5.0},
      {2, "suppression fixtures", laar::SuppressionFixtures, 10.0},
      {3, "loss gradients", laar::LossGradients, 0.0},
      {4, "evaluator oracle", laar::EvaluatorOracle, 0.0},
      {5, "delta AP experiment", laar::DeltaApExperiment, 300.0},
      {6, "cli determinism", laar::CliDeterminism, 0.0},
      {7, "aiou targets", laar::AiouTargets, 0.0},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    laar::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.Fail(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.Fail(laar::Fmt("took %.1f s, budget %.0f s", secs, c.budget_s));
    }
    failures += !o.pass;
    std::printf("%s [%d] %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
