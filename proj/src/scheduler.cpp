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

#include "sonovortex/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sonovortex/error.hpp"
#include "sonovortex/protocol.hpp"

namespace sonovortex::scheduler {

void HapticImage::validate() const {
  if (points.empty()) throw DomainError("haptic image has no focal points");
  for (const FocalPoint& fp : points) fp.validate();
}

std::string_view to_string(EventKind kind) {
  return kind == EventKind::kCannonTrigger ? "cannon-trigger" : "phase-frame";
}

StimulusSchedule::StimulusSchedule(std::vector<Event> events, double carrier_hz)
    : events_(std::move(events)), carrier_hz_(carrier_hz) {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const double t = events_[i].emit_time;
    if (!(std::isfinite(t) && t >= 0.0)) {
      throw DomainError(fmt::format("event {} has invalid emit time {}", i, t));
    }
  }
  std::stable_sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) {
    if (a.emit_time != b.emit_time) return a.emit_time < b.emit_time;
    if (a.kind() != b.kind()) return a.kind() < b.kind();
    return a.focal_index() < b.focal_index();
  });
}

const Event* StimulusSchedule::first(EventKind kind) const {
  for (const Event& e : events_) {
    if (e.kind() == kind) return &e;
  }
  return nullptr;
}

StimulusSchedule StimulusSchedule::merge(const StimulusSchedule& a, const StimulusSchedule& b) {
  double carrier = a.carrier_hz_;
  if (carrier == 0.0) {
    carrier = b.carrier_hz_;
  } else if (b.carrier_hz_ != 0.0 && b.carrier_hz_ != carrier) {
    throw DomainError("cannot merge schedules with different carrier frequencies");
  }
  std::vector<Event> all(a.events_.begin(), a.events_.end());
  all.insert(all.end(), b.events_.begin(), b.events_.end());
  return StimulusSchedule(std::move(all), carrier);
}

StimulusSchedule render_image(const HapticImage& image, const TransducerArray& array,
                              const std::optional<ModulationConfig>& modulation,
                              double start_time) {
  image.validate();
  if (!(std::isfinite(start_time) && start_time >= 0.0)) {
    throw DomainError("render start time must be >= 0");
  }

  struct Track {
    DelayTable delays;
    double latency;
    std::vector<acoustic::OnInterval> on;
  };
  std::vector<Track> tracks;
  tracks.reserve(image.points.size());
  std::size_t rounds = 0;
  for (const FocalPoint& fp : image.points) {
    Track t{acoustic::compute_delays(array, fp.position).normalized(),
            acoustic::focus_latency(array, fp.position),
            modulation ? acoustic::apply_modulation(*modulation, fp.duration)
                       : std::vector<acoustic::OnInterval>{{0.0, fp.duration}}};
    rounds = std::max(rounds, t.on.size());
    tracks.push_back(std::move(t));
  }

  const double period = modulation ? 1.0 / modulation->frequency_hz : 0.0;
  std::vector<Event> events;
  double cursor = start_time;
  for (std::size_t k = 0; k < rounds; ++k) {
    double t = std::max(start_time + static_cast<double>(k) * period, cursor);
    for (std::size_t p = 0; p < tracks.size(); ++p) {
      const Track& tr = tracks[p];
      if (k >= tr.on.size()) continue;
      const double len = tr.on[k].length();
      const FocalPoint& fp = image.points[p];
      events.push_back(Event{
          t, t + tr.latency, fp.position,
          PhaseFrame{tr.delays, static_cast<std::uint16_t>(std::lround(fp.intensity)), len, p}});
      t += len;
    }
    cursor = t;
  }
  return StimulusSchedule(std::move(events), array.carrier_hz());
}

void CompensationPolicy::validate() const {
  if (!(std::isfinite(mechanical_latency) && mechanical_latency >= 0.0)) {
    throw DomainError("mechanical latency must be >= 0");
  }
  if (mode == Mode::kFixed && !(std::isfinite(fixed_offset) && fixed_offset >= 0.0)) {
    throw DomainError("fixed compensation offset must be >= 0");
  }
}

namespace {

double computed_offset(double vortex_travel, double mechanical_latency,
                       double acoustic_latency) {
  const double offset = (vortex_travel + mechanical_latency) - acoustic_latency;
  if (offset < 0.0) {
    throw ConsistencyError(fmt::format(
        "ultrasound would arrive {:.9g} s after the vortex; check speeds", -offset));
  }
  return offset;
}

}  // namespace

double co_arrival_offset(Point3 target, const vortex::VortexShot& shot,
                         const TransducerArray& array, const CompensationPolicy& policy) {
  policy.validate();
  if (policy.mode == CompensationPolicy::Mode::kFixed) return policy.fixed_offset;
  return computed_offset(vortex::travel_time(shot, target), policy.mechanical_latency,
                         acoustic::focus_latency(array, target));
}

double implied_mechanical_latency(Point3 target, const vortex::VortexShot& shot,
                                  const TransducerArray& array,
                                  const CompensationPolicy& policy) {
  policy.validate();
  return policy.fixed_offset - computed_offset(vortex::travel_time(shot, target), 0.0,
                                               acoustic::focus_latency(array, target));
}

StimulusSchedule schedule_cross_field(const HapticImage& image, const vortex::VortexShot& shot,
                                      Point3 target, const TransducerArray& array,
                                      const std::optional<ModulationConfig>& modulation,
                                      const CompensationPolicy& policy,
                                      const CrossFieldOptions& options) {
  image.validate();
  policy.validate();
  if (geometry::distance(shot.origin(), target) == 0.0) {
    throw GeometryError("vortex target coincides with the cannon aperture");
  }
  for (std::size_t p = 0; p < image.points.size(); ++p) {
    const double miss = geometry::distance(image.points[p].position, target);
    if (miss > options.target_tolerance) {
      throw ConfigError(fmt::format(
          "focal point {} is {:.6g} m from the vortex target (tolerance {:.6g} m)", p, miss,
          options.target_tolerance));
    }
  }

  const double travel = vortex::travel_time(shot, target, options.aim_tolerance);
  const double vortex_arrival = shot.launch_time() + policy.mechanical_latency + travel;

  // The acoustic leg is timed to the first focal point so its first frame
  // lands together with the ring.
  double offset = policy.fixed_offset;
  if (policy.mode == CompensationPolicy::Mode::kComputed) {
    offset = computed_offset(travel, policy.mechanical_latency,
                             acoustic::focus_latency(array, image.points.front().position));
  }

  StimulusSchedule ultrasound =
      render_image(image, array, modulation, shot.launch_time() + offset);
  StimulusSchedule cannon(
      {Event{shot.launch_time(), vortex_arrival, target, CannonTrigger{options.cannon_id}}},
      0.0);
  return StimulusSchedule::merge(cannon, ultrasound);
}

std::vector<std::uint8_t> emit_schedule(const StimulusSchedule& schedule) {
  return protocol::encode(schedule);
}

void write_events_csv(std::ostream& out, const StimulusSchedule& schedule, UnitSystem units) {
  const UnitScale u = unit_scale(units);
  fmt::print(out, "emit_time_{0},kind,target_x_{1},target_y_{1},target_z_{1},predicted_arrival_{0}\n",
             u.time_suffix, u.length_suffix);
  for (const Event& e : schedule.events()) {
    fmt::print(out, "{:.9f},{},{:.9f},{:.9f},{:.9f},{:.9f}\n", e.emit_time * u.time,
               to_string(e.kind()), e.target.x * u.length, e.target.y * u.length,
               e.target.z * u.length, e.predicted_arrival * u.time);
  }
}

}  // namespace sonovortex::scheduler
