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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "laar/errors.h"

namespace laar {

Box::Box(double x1, double y1, double x2, double y2)
    : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
  if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) ||
      !std::isfinite(y2)) {
    throw DataError("non-finite box coordinate in " + ToString());
  }
  if (x2 < x1 || y2 < y1) {
    throw DataError("negative box extent " + ToString());
  }
}

Box Box::FromXywh(double x, double y, double w, double h) {
  return Box(x, y, x + w, y + h);
}

Box Box::ClippedTo(double width, double height) const {
  const double cx1 = std::clamp(x1_, 0.0, width);
  const double cy1 = std::clamp(y1_, 0.0, height);
  const double cx2 = std::clamp(x2_, 0.0, width);
  const double cy2 = std::clamp(y2_, 0.0, height);
  return Box(cx1, cy1, cx2, cy2);
}

Box Box::Translated(double dx, double dy) const {
  return Box(x1_ + dx, y1_ + dy, x2_ + dx, y2_ + dy);
}

Box Box::Scaled(double s) const {
  if (s < 0.0) throw DataError("negative box scale factor");
  return Box(x1_ * s, y1_ * s, x2_ * s, y2_ * s);
}

std::string Box::ToString() const {
  std::ostringstream os;
  os << "[" << x1_ << ", " << y1_ << ", " << x2_ << ", " << y2_ << "]";
  return os.str();
}

double Area(const Box& b) { return b.width() * b.height(); }

double IntersectionArea(const Box& a, const Box& b) {
  const double w = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double h = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double Iou(const Box& a, const Box& b) {
  const double inter = IntersectionArea(a, b);
  const double uni = Area(a) + Area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

IouMatrix ComputeIouMatrix(std::span<const Box> as, std::span<const Box> bs) {
  IouMatrix m(as.size(), bs.size());
  for (std::size_t i = 0; i < as.size(); ++i) {
    for (std::size_t j = 0; j < bs.size(); ++j) {
      m(i, j) = Iou(as[i], bs[j]);
    }
  }
  return m;
}

}  // namespace laar
