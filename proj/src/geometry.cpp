// Copyright 2026 The Sonovortex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sonovortex/geometry.hpp"

#include <string>

#include "sonovortex/error.hpp"

namespace sonovortex::geometry {

bool is_finite(Point3 p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

Point3 normalized(Point3 v) {
  const double n = norm(v);
  if (!std::isfinite(n) || n == 0.0) {
    throw DomainError("cannot normalize a zero or non-finite vector");
  }
  return (1.0 / n) * v;
}

SampleGrid::SampleGrid(Point3 origin, Point3 extent, Counts counts)
    : origin_(origin), extent_(extent), counts_(counts) {
  if (!is_finite(origin)) throw DomainError("grid origin must be finite");
  for (std::size_t a = 0; a < 3; ++a) {
    if (counts_[a] < 1) {
      throw DomainError("grid axis " + std::to_string(a) + " needs at least one sample");
    }
    if (counts_[a] > 1 && !(std::isfinite(extent[a]) && extent[a] > 0.0)) {
      throw DomainError("grid axis " + std::to_string(a) + " extent must be > 0");
    }
  }
}

SampleGrid SampleGrid::centered(Point3 center, Point3 extent, Counts counts) {
  Point3 origin = center;
  if (counts[0] > 1) origin.x -= 0.5 * extent.x;
  if (counts[1] > 1) origin.y -= 0.5 * extent.y;
  if (counts[2] > 1) origin.z -= 0.5 * extent.z;
  return SampleGrid(origin, extent, counts);
}

double SampleGrid::step(Axis axis) const {
  const auto a = static_cast<std::size_t>(axis);
  if (counts_[a] < 2) return 0.0;
  return extent_[a] / static_cast<double>(counts_[a] - 1);
}

std::array<std::size_t, 3> SampleGrid::unravel(std::size_t linear) const {
  const std::size_t i = linear % counts_[0];
  const std::size_t rest = linear / counts_[0];
  return {i, rest % counts_[1], rest / counts_[1]};
}

Point3 SampleGrid::point(std::size_t i, std::size_t j, std::size_t k) const {
  return {origin_.x + static_cast<double>(i) * step(Axis::kX),
          origin_.y + static_cast<double>(j) * step(Axis::kY),
          origin_.z + static_cast<double>(k) * step(Axis::kZ)};
}

Point3 SampleGrid::point(std::size_t linear) const {
  const auto [i, j, k] = unravel(linear);
  return point(i, j, k);
}

bool SampleGrid::contains(Point3 p) const {
  for (std::size_t a = 0; a < 3; ++a) {
    const double h = 0.5 * step(static_cast<Axis>(a));
    const double lo = origin_[a] - h;
    const double hi = origin_[a] + (counts_[a] > 1 ? extent_[a] : 0.0) + h;
    // single-sample axes accept a small slack so a plane slice still
    // "contains" points that sit on it up to rounding
    const double slack = counts_[a] > 1 ? 0.0 : 1e-12;
    if (p[a] < lo - slack || p[a] > hi + slack) return false;
  }
  return true;
}

}  // namespace sonovortex::geometry
