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

#include "sonovortex/vortex.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sonovortex/error.hpp"

namespace sonovortex::vortex {
namespace {

void require_positive(double v, const char* what) {
  if (!(std::isfinite(v) && v > 0.0)) throw DomainError(fmt::format("{} must be > 0", what));
}

}  // namespace

void CannonSpec::validate() const {
  require_positive(slug_volume, "slug volume");
  require_positive(aperture, "aperture diameter");
  require_positive(t_cone, "t_cone");
  if (!(std::isfinite(actuation_hz) && actuation_hz >= 0.0)) {
    throw DomainError("actuation rate must be >= 0");
  }
  if (!(std::isfinite(mechanical_latency) && mechanical_latency >= 0.0)) {
    throw DomainError("mechanical latency must be >= 0");
  }
}

double slug_length(double slug_volume, double aperture) {
  require_positive(slug_volume, "slug volume");
  require_positive(aperture, "aperture diameter");
  return 4.0 * slug_volume / (std::numbers::pi * aperture * aperture);
}

double stroke_ratio(double slug_length, double aperture) {
  require_positive(aperture, "aperture diameter");
  if (!(std::isfinite(slug_length) && slug_length >= 0.0)) {
    throw DomainError("slug length must be >= 0");
  }
  return slug_length / aperture;
}

std::string_view to_string(Formation f) {
  switch (f) {
    case Formation::kSubFormation: return "sub-formation";
    case Formation::kAtFormation: return "at-formation";
    case Formation::kUnstable: return "unstable";
  }
  return "unknown";
}

Formation classify_formation(double ratio) {
  if (ratio > kFormationNumberMax) return Formation::kUnstable;
  if (ratio >= kFormationNumberMin) return Formation::kAtFormation;
  return Formation::kSubFormation;
}

StabilityReport is_stable(double slug_volume, double aperture) {
  require_positive(slug_volume, "slug volume");
  require_positive(aperture, "aperture diameter");
  StabilityReport r;
  r.ratio = 4.0 * slug_volume / (std::numbers::pi * aperture * aperture * aperture);
  r.margin = kFormationNumberMax - r.ratio;
  r.stable = r.ratio <= kFormationNumberMax;
  r.formation = classify_formation(r.ratio);
  return r;
}

double min_stable_aperture(double slug_volume) {
  require_positive(slug_volume, "slug volume");
  return std::cbrt(4.0 * slug_volume / (kFormationNumberMax * std::numbers::pi));
}

VortexSpeed vortex_speed(double slug_length, double t_cone) {
  require_positive(t_cone, "t_cone");
  if (!(std::isfinite(slug_length) && slug_length >= 0.0)) {
    throw DomainError("slug length must be >= 0");
  }
  const double v_s = slug_length / t_cone;
  return {v_s, v_s / 2.0};
}

VortexShot::VortexShot(double launch_time, Point3 origin, Point3 direction,
                       double slug_speed, double vortex_speed)
    : launch_time_(launch_time),
      origin_(origin),
      direction_(direction),
      slug_speed_(slug_speed),
      vortex_speed_(vortex_speed) {
  if (!(std::isfinite(launch_time) && launch_time >= 0.0)) {
    throw DomainError("launch time must be >= 0");
  }
  if (!geometry::is_finite(origin)) throw DomainError("shot origin must be finite");
  if (!(std::abs(geometry::norm(direction) - 1.0) <= 1e-12)) {
    throw DomainError("shot direction must be a unit vector");
  }
  if (!(std::isfinite(slug_speed) && slug_speed >= 0.0)) {
    throw DomainError("slug speed must be >= 0");
  }
  if (vortex_speed != slug_speed / 2.0) {
    throw DomainError(fmt::format("vortex speed {} is not half the slug speed {}",
                                  vortex_speed, slug_speed));
  }
}

VortexShot VortexShot::from_slug_speed(double launch_time, Point3 origin, Point3 direction,
                                       double slug_speed) {
  return VortexShot(launch_time, origin, geometry::normalized(direction), slug_speed,
                    slug_speed / 2.0);
}

double travel_time(const VortexShot& shot, Point3 target, double aim_tolerance) {
  if (!(shot.vortex_speed() > 0.0)) throw DomainError("vortex speed must be > 0");
  if (!geometry::is_finite(target)) throw DomainError("target must be finite");
  const Point3 to_target = target - shot.origin();
  const double d = geometry::norm(to_target);
  if (d == 0.0) return 0.0;
  const double cosang = std::clamp(geometry::dot(to_target, shot.direction()) / d, -1.0, 1.0);
  const double angle = std::acos(cosang);
  if (angle > aim_tolerance) {
    throw TargetingError(fmt::format("target is {:.3f} deg off the shot axis (limit {:.3f})",
                                     angle * 180.0 / std::numbers::pi,
                                     aim_tolerance * 180.0 / std::numbers::pi));
  }
  return d / shot.vortex_speed();
}

}  // namespace sonovortex::vortex
