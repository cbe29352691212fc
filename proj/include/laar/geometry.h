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

#ifndef LAAR_GEOMETRY_H_
#define LAAR_GEOMETRY_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace laar {

// Axis-aligned box in continuous image coordinates, corner convention
// [x1, y1, x2, y2]. Area is (x2 - x1) * (y2 - y1) with no +1 pixel term.
//
// Construction rejects negative extent (x2 < x1 or y2 < y1) and non-finite
// coordinates with DataError. Zero width or height is allowed.
class Box {
 public:
  Box() = default;
  Box(double x1, double y1, double x2, double y2);

  // Converts a COCO [x, y, w, h] rectangle.
  static Box FromXywh(double x, double y, double w, double h);

  double x1() const { return x1_; }
  double y1() const { return y1_; }
  double x2() const { return x2_; }
  double y2() const { return y2_; }
  double width() const { return x2_ - x1_; }
  double height() const { return y2_ - y1_; }
  double center_x() const { return 0.5 * (x1_ + x2_); }
  double center_y() const { return 0.5 * (y1_ + y2_); }

  // Intersection with [0, width] x [0, height].
  Box ClippedTo(double width, double height) const;
  Box Translated(double dx, double dy) const;
  Box Scaled(double s) const;

  std::string ToString() const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  double x1_ = 0.0;
  double y1_ = 0.0;
  double x2_ = 0.0;
  double y2_ = 0.0;
};

double Area(const Box& b);

double IntersectionArea(const Box& a, const Box& b);

// Intersection over union. Returns 0 when the union has zero area (two
// degenerate boxes), so the result is always a number in [0, 1].
double Iou(const Box& a, const Box& b);

// Dense row-major matrix of pairwise IoU values.
class IouMatrix {
 public:
  IouMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return values_[i * cols_ + j];
  }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

// Entry (i, j) is Iou(as[i], bs[j]), computed by the same routine.
IouMatrix ComputeIouMatrix(std::span<const Box> as, std::span<const Box> bs);

}  // namespace laar

#endif  // LAAR_GEOMETRY_H_
