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

#include "laar/geometry.h"

#include <random>

#include "gtest/gtest.h"
#include "laar/errors.h"
#include "oracles.h"

namespace laar {
namespace {

Box RandomIntBox(std::mt19937_64& rng, int limit) {
  std::uniform_int_distribution<int> coord(0, limit);
  int x1 = coord(rng), x2 = coord(rng), y1 = coord(rng), y2 = coord(rng);
  if (x2 < x1) std::swap(x1, x2);
  if (y2 < y1) std::swap(y1, y2);
  return Box(x1, y1, x2, y2);
}

Box RandomBox(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-50.0, 150.0);
  std::uniform_real_distribution<double> ext(0.0, 80.0);
  const double x = pos(rng), y = pos(rng);
  return Box(x, y, x + ext(rng), y + ext(rng));
}

TEST(BoxTest, RejectsNegativeExtent) {
  EXPECT_THROW(Box(5, 0, 4, 1), DataError);
  EXPECT_THROW(Box(0, 5, 1, 4), DataError);
  EXPECT_THROW(Box(0, 0, std::nan(""), 1), DataError);
  EXPECT_NO_THROW(Box(3, 3, 3, 9));
}

TEST(BoxTest, FromXywh) {
  EXPECT_EQ(Box::FromXywh(10, 10, 20, 30), Box(10, 10, 30, 40));
}

TEST(BoxTest, ClippedTo) {
  EXPECT_EQ(Box(-5, -5, 20, 8).ClippedTo(10, 10), Box(0, 0, 10, 8));
  EXPECT_EQ(Box(20, 20, 30, 30).ClippedTo(10, 10), Box(10, 10, 10, 10));
}

TEST(AreaTest, Examples) {
  EXPECT_EQ(Area(Box(0, 0, 10, 10)), 100.0);
  EXPECT_EQ(Area(Box(3, 3, 3, 9)), 0.0);
  EXPECT_EQ(Area(Box(0, 0, 2.5, 4)), 10.0);
}

TEST(IouTest, Examples) {
  const Box a(0, 0, 10, 10);
  EXPECT_EQ(Iou(a, a), 1.0);
  EXPECT_EQ(Iou(a, Box(20, 20, 30, 30)), 0.0);
  EXPECT_NEAR(Iou(a, Box(5, 5, 15, 15)), 1.0 / 7.0, 1e-15);
}

TEST(IouTest, OneSeventhAgreesWithRasterization) {
  const double raster = oracle::RasterIou(Box(0, 0, 10, 10), Box(5, 5, 15, 15), 8);
  EXPECT_NEAR(raster, 1.0 / 7.0, 1e-12);
  EXPECT_NEAR(Iou(Box(0, 0, 10, 10), Box(5, 5, 15, 15)), raster, 1e-12);
}

TEST(IouTest, NonIntegerAgreesWithFineRasterization) {
  const Box a(0.25, 0.5, 7.75, 6.0);
  const Box b(3.5, 1.25, 9.0, 8.5);
  EXPECT_NEAR(Iou(a, b), oracle::RasterIou(a, b, 16), 5e-3);
}

TEST(IouTest, DegenerateBoxesGiveZero) {
  EXPECT_EQ(Iou(Box(1, 1, 1, 1), Box(1, 1, 1, 1)), 0.0);
  EXPECT_EQ(Iou(Box(0, 0, 0, 5), Box(0, 0, 0, 5)), 0.0);
  EXPECT_EQ(Iou(Box(0, 0, 0, 5), Box(0, 0, 4, 5)), 0.0);
}

TEST(IouTest, TouchingEdgesGiveZero) {
  EXPECT_EQ(Iou(Box(0, 0, 1, 1), Box(1, 0, 2, 1)), 0.0);
}

TEST(IouPropertyTest, MatchesCellCountingOracle) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Box a = RandomIntBox(rng, 63);
    const Box b = RandomIntBox(rng, 63);
    ASSERT_NEAR(Iou(a, b), oracle::CellCountIou(a, b), 1e-9)
        << a.ToString() << " " << b.ToString();
  }
}

TEST(IouPropertyTest, SymmetryBoundsAndInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> shift(-1000.0, 1000.0);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int i = 0; i < 5000; ++i) {
    const Box a = RandomBox(rng);
    const Box b = RandomBox(rng);
    const double v = Iou(a, b);
    ASSERT_EQ(v, Iou(b, a));
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
    if (Area(a) > 0.0) ASSERT_EQ(Iou(a, a), 1.0);
    const double dx = shift(rng), dy = shift(rng);
    ASSERT_NEAR(Iou(a.Translated(dx, dy), b.Translated(dx, dy)), v, 1e-9);
    const double s = scale(rng);
    ASSERT_NEAR(Iou(a.Scaled(s), b.Scaled(s)), v, 1e-12);
  }
}

TEST(IouMatrixTest, Examples) {
  const std::vector<Box> one = {Box(1, 2, 3, 4)};
  const IouMatrix m = ComputeIouMatrix(one, one);
  ASSERT_EQ(m.rows(), 1u);
  ASSERT_EQ(m.cols(), 1u);
  EXPECT_EQ(m(0, 0), 1.0);

  const IouMatrix empty = ComputeIouMatrix({}, one);
  EXPECT_EQ(empty.rows(), 0u);
  EXPECT_EQ(empty.cols(), 1u);
}

TEST(IouMatrixTest, BitIdenticalToElementwise) {
  const std::vector<Box> as = {Box(0, 0, 10, 10), Box(100, 100, 110, 110)};
  const std::vector<Box> bs = {Box(0, 0, 10, 10), Box(5, 5, 15, 15), Box(0, 0, 10, 10)};
  const IouMatrix m = ComputeIouMatrix(as, bs);
  for (std::size_t i = 0; i < as.size(); ++i) {
    for (std::size_t j = 0; j < bs.size(); ++j) {
      EXPECT_EQ(m(i, j), Iou(as[i], bs[j]));
    }
  }
}

}  // namespace
}  // namespace laar
