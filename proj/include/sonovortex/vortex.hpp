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

#include <numbers>
#include <string_view>

#include "sonovortex/geometry.hpp"

namespace sonovortex::vortex {

using geometry::Point3;

/// Stroke ratio above which a ring pinches off a trailing jet.
inline constexpr double kFormationNumberMax = 4.5;
/// Lower edge of the usual formation-number band.
inline constexpr double kFormationNumberMin = 3.6;

/// Five-subwoofer cannon used as the default device.
inline constexpr double kReferenceSlugVolume = 33'670e-9;  // m^3
inline constexpr double kReferenceAperture = 0.021;        // m
inline constexpr double kReferenceVortexSpeed = 7.2;       // m/s

/// Default angular tolerance between the shot axis and a target.
inline constexpr double kDefaultAimTolerance = 5.0 * std::numbers::pi / 180.0;

struct CannonSpec {
  double slug_volume = kReferenceSlugVolume;  ///< m^3
  double aperture = kReferenceAperture;       ///< m
  double t_cone = 0.0;                        ///< s, time for the slug to clear the aperture
  double actuation_hz = 30.0;
  double mechanical_latency = 0.0;            ///< s

  /// Throws DomainError unless V_S > 0, D > 0 and t_cone > 0.
  void validate() const;
};

/// L_S = 4 V_S / (pi D^2).
double slug_length(double slug_volume, double aperture);

/// L_S / D.
double stroke_ratio(double slug_length, double aperture);

enum class Formation { kSubFormation, kAtFormation, kUnstable };

std::string_view to_string(Formation f);

/// Below 3.6: sub-formation; [3.6, 4.5]: at formation; above 4.5: unstable.
Formation classify_formation(double stroke_ratio);

struct StabilityReport {
  bool stable = false;
  double ratio = 0.0;   ///< 4 V_S / (pi D^3)
  double margin = 0.0;  ///< 4.5 - ratio
  Formation formation = Formation::kSubFormation;
};

StabilityReport is_stable(double slug_volume, double aperture);

/// Smallest aperture satisfying the stability inequality:
/// cbrt(4 V_S / (4.5 pi)).
double min_stable_aperture(double slug_volume);

struct VortexSpeed {
  double slug = 0.0;    ///< v_s = L_S / t_cone
  double vortex = 0.0;  ///< v_s / 2
};

VortexSpeed vortex_speed(double slug_length, double t_cone);

/// A launched ring travelling in a straight line at constant speed.
class VortexShot {
 public:
  /// Rejects a non-unit direction and any vortex speed other than exactly
  /// half the slug speed.
  VortexShot(double launch_time, Point3 origin, Point3 direction, double slug_speed,
             double vortex_speed);

  /// Normalizes `direction` and derives the ring speed from the slug speed.
  static VortexShot from_slug_speed(double launch_time, Point3 origin, Point3 direction,
                                    double slug_speed);

  double launch_time() const { return launch_time_; }
  Point3 origin() const { return origin_; }
  Point3 direction() const { return direction_; }
  double slug_speed() const { return slug_speed_; }
  double vortex_speed() const { return vortex_speed_; }

 private:
  double launch_time_;
  Point3 origin_;
  Point3 direction_;
  double slug_speed_;
  double vortex_speed_;
};

/// Seconds from launch until the ring reaches `target`. Throws
/// TargetingError when the target is more than `aim_tolerance` radians off
/// the shot axis and DomainError for a non-moving ring.
double travel_time(const VortexShot& shot, Point3 target,
                   double aim_tolerance = kDefaultAimTolerance);

}  // namespace sonovortex::vortex
