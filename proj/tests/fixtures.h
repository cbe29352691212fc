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

// Random fixtures shared by unit and acceptance tests.

#ifndef LAAR_TESTS_FIXTURES_H_
#define LAAR_TESTS_FIXTURES_H_

#include <algorithm>
#include <random>
#include <vector>

#include "laar/anchors.h"
#include "laar/suppression.h"

namespace laar::fixture {

struct EvalDataset {
  std::vector<Scene> scenes;
  std::vector<Detection> dets;
};

// Up to `max_images` images and `max_dets` detections. Detections are mostly
// jittered copies of ground truth; confidences come from a coarse grid so
// ties are frequent. Box sizes straddle the area buckets.
inline EvalDataset RandomEvalDataset(std::mt19937_64& rng, int max_images = 5,
                                     int max_dets = 20, int classes = 2) {
  std::uniform_int_distribution<int> n_img(1, max_images);
  std::uniform_int_distribution<int> n_gt(0, 4);
  std::uniform_int_distribution<int> n_det(0, max_dets);
  std::uniform_int_distribution<int> cls(0, classes - 1);
  std::uniform_real_distribution<double> pos(0.0, 150.0);
  std::uniform_real_distribution<double> ext(8.0, 140.0);
  std::uniform_real_distribution<double> jit(-6.0, 6.0);
  std::uniform_int_distribution<int> conf(1, 12);
  std::bernoulli_distribution from_gt(0.7);

  EvalDataset ds;
  const int images = n_img(rng);
  for (int i = 0; i < images; ++i) {
    std::vector<GroundTruth> gts;
    const int g = n_gt(rng);
    for (int k = 0; k < g; ++k) {
      const double x = pos(rng), y = pos(rng);
      gts.push_back({Box(x, y, x + ext(rng), y + ext(rng)), cls(rng)});
    }
    ds.scenes.push_back(MakeScene(i + 1, {300, 300}, std::move(gts)));
  }
  std::uniform_int_distribution<int> pick_img(0, images - 1);
  const int nd = n_det(rng);
  for (int k = 0; k < nd; ++k) {
    const Scene& s = ds.scenes[pick_img(rng)];
    Detection d;
    d.image_id = s.image_id;
    if (!s.ground_truths.empty() && from_gt(rng)) {
      std::uniform_int_distribution<std::size_t> pick_gt(0, s.ground_truths.size() - 1);
      const GroundTruth& gt = s.ground_truths[pick_gt(rng)];
      const double x1 = gt.box.x1() + jit(rng), y1 = gt.box.y1() + jit(rng);
      const double x2 = std::max(x1 + 1.0, gt.box.x2() + jit(rng));
      const double y2 = std::max(y1 + 1.0, gt.box.y2() + jit(rng));
      d.box = Box(x1, y1, x2, y2);
      d.class_id = from_gt(rng) ? gt.class_id : cls(rng);
    } else {
      const double x = pos(rng), y = pos(rng);
      d.box = Box(x, y, x + ext(rng), y + ext(rng));
      d.class_id = cls(rng);
    }
    d.confidence = conf(rng) / 12.0;
    d.cqs = d.confidence;
    ds.dets.push_back(d);
  }
  return ds;
}

}  // namespace laar::fixture

#endif  // LAAR_TESTS_FIXTURES_H_
