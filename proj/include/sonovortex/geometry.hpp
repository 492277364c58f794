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

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace sonovortex::geometry {

/// Position or displacement in meters.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Point3 operator+(Point3 a, Point3 b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr Point3 operator-(Point3 a, Point3 b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr Point3 operator*(double s, Point3 a) {
    return {s * a.x, s * a.y, s * a.z};
  }
  friend constexpr bool operator==(Point3, Point3) = default;

  double operator[](std::size_t axis) const {
    return axis == 0 ? x : (axis == 1 ? y : z);
  }
};

constexpr double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Point3 cross(Point3 a, Point3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(Point3 a) { return std::hypot(a.x, a.y, a.z); }

/// Euclidean distance. hypot sees only magnitudes, so the result is
/// bitwise symmetric in its arguments.
inline double distance(Point3 a, Point3 b) { return norm(a - b); }

bool is_finite(Point3 p);

/// Throws DomainError for a zero or non-finite vector.
Point3 normalized(Point3 v);

enum class Axis : std::size_t { kX = 0, kY = 1, kZ = 2 };

/// Regular lattice of sample points. Sample (i, j, k) sits at
/// origin + (i * extent.x / (nx - 1), ...); an axis with a single sample
/// collapses onto the origin coordinate and its extent is ignored.
class SampleGrid {
 public:
  using Counts = std::array<std::size_t, 3>;

  /// Throws DomainError unless every count >= 1 and every axis with more
  /// than one sample has a finite positive extent.
  SampleGrid(Point3 origin, Point3 extent, Counts counts);

  /// Grid whose middle sample lies at `center`.
  static SampleGrid centered(Point3 center, Point3 extent, Counts counts);

  Point3 origin() const { return origin_; }
  Point3 extent() const { return extent_; }
  const Counts& counts() const { return counts_; }
  std::size_t size() const { return counts_[0] * counts_[1] * counts_[2]; }

  /// Spacing along `axis`; zero for a single-sample axis.
  double step(Axis axis) const;

  /// Linear index with x fastest, then y, then z.
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (k * counts_[1] + j) * counts_[0] + i;
  }
  std::array<std::size_t, 3> unravel(std::size_t linear) const;

  Point3 point(std::size_t i, std::size_t j, std::size_t k) const;
  Point3 point(std::size_t linear) const;

  /// True when p lies inside the grid's bounding box (inclusive, with a
  /// half-step tolerance on every axis).
  bool contains(Point3 p) const;

  friend bool operator==(const SampleGrid&, const SampleGrid&) = default;

 private:
  Point3 origin_;
  Point3 extent_;
  Counts counts_;
};

}  // namespace sonovortex::geometry
