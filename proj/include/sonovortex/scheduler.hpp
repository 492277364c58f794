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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sonovortex/acoustic.hpp"
#include "sonovortex/units.hpp"
#include "sonovortex/vortex.hpp"

namespace sonovortex::scheduler {

using acoustic::DelayTable;
using acoustic::FocalPoint;
using acoustic::ModulationConfig;
using acoustic::TransducerArray;
using geometry::Point3;

/// Time-multiplexed focal points, rendered in list order.
struct HapticImage {
  std::vector<FocalPoint> points;

  void validate() const;
};

/// Declaration order is the tie-break rank at equal emit times.
enum class EventKind : std::uint8_t { kCannonTrigger = 0, kPhaseFrame = 1 };

std::string_view to_string(EventKind kind);

struct CannonTrigger {
  std::uint16_t cannon_id = 0;

  friend bool operator==(const CannonTrigger&, const CannonTrigger&) = default;
};

/// One envelope on-interval for one focal point. Delays are normalized
/// (min 0); the frame holds until `on_duration` elapses.
struct PhaseFrame {
  DelayTable delays;
  std::uint16_t intensity = 0;
  double on_duration = 0.0;
  std::size_t focal_index = 0;

  friend bool operator==(const PhaseFrame&, const PhaseFrame&) = default;
};

struct Event {
  double emit_time = 0.0;
  double predicted_arrival = 0.0;
  Point3 target;
  std::variant<CannonTrigger, PhaseFrame> payload;

  EventKind kind() const {
    return std::holds_alternative<CannonTrigger>(payload) ? EventKind::kCannonTrigger
                                                          : EventKind::kPhaseFrame;
  }
  std::size_t focal_index() const {
    const auto* f = std::get_if<PhaseFrame>(&payload);
    return f ? f->focal_index : 0;
  }

  friend bool operator==(const Event&, const Event&) = default;
};

/// Immutable, time-sorted event list. Ties in emit time put cannon
/// triggers first, then phase frames by focal index; remaining ties keep
/// insertion order.
class StimulusSchedule {
 public:
  StimulusSchedule() = default;

  /// Sorts and validates (emit times finite and >= 0). `carrier_hz` is the
  /// carrier the phase-frame delays are quantized against on the wire.
  StimulusSchedule(std::vector<Event> events, double carrier_hz);

  std::span<const Event> events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  double carrier_hz() const { return carrier_hz_; }

  /// First event of the given kind, if any.
  const Event* first(EventKind kind) const;

  /// Union of two schedules sharing a carrier (an empty carrier of 0 adopts
  /// the other's).
  static StimulusSchedule merge(const StimulusSchedule& a, const StimulusSchedule& b);

  friend bool operator==(const StimulusSchedule&, const StimulusSchedule&) = default;

 private:
  std::vector<Event> events_;
  double carrier_hz_ = 0.0;
};

/// Renders focal points round-robin: round k holds the k-th envelope
/// on-interval of every point that still has one, back to back in list
/// order, and starts no earlier than start_time + k / f_mod. Without
/// modulation each point becomes a single frame of its full duration.
StimulusSchedule render_image(const HapticImage& image, const TransducerArray& array,
                              const std::optional<ModulationConfig>& modulation,
                              double start_time = 0.0);

struct CompensationPolicy {
  enum class Mode { kComputed, kFixed };

  Mode mode = Mode::kFixed;
  double fixed_offset = 0.030;      ///< s, ultrasound emission after cannon trigger
  double mechanical_latency = 0.0;  ///< s, trigger-to-launch delay of the cannon

  void validate() const;
};

/// How long after the cannon trigger the ultrasound must be emitted.
/// Computed mode: (d / v_vortex + mechanical latency) - acoustic latency to
/// the target. Fixed mode: the policy's constant. Throws ConsistencyError if
/// the computed offset is negative.
double co_arrival_offset(Point3 target, const vortex::VortexShot& shot,
                         const TransducerArray& array, const CompensationPolicy& policy);

/// fixed_offset - computed offset with zero mechanical latency: the cannon
/// latency a fixed policy implicitly assumes for this geometry.
double implied_mechanical_latency(Point3 target, const vortex::VortexShot& shot,
                                  const TransducerArray& array,
                                  const CompensationPolicy& policy);

struct CrossFieldOptions {
  std::uint16_t cannon_id = 0;
  /// Max distance between any focal point and the vortex target.
  double target_tolerance = 0.02;
  double aim_tolerance = vortex::kDefaultAimTolerance;
};

/// Cannon trigger at the shot's launch time plus the image rendered from
/// launch + offset. In computed mode the first phase frame's predicted
/// arrival equals the ring's predicted arrival at `target`.
StimulusSchedule schedule_cross_field(const HapticImage& image, const vortex::VortexShot& shot,
                                      Point3 target, const TransducerArray& array,
                                      const std::optional<ModulationConfig>& modulation,
                                      const CompensationPolicy& policy,
                                      const CrossFieldOptions& options = {});

/// Wire-format bytes for the schedule (see protocol.hpp).
std::vector<std::uint8_t> emit_schedule(const StimulusSchedule& schedule);

/// emit_time,kind,target_x,target_y,target_z,predicted_arrival with unit
/// suffixes on the headers.
void write_events_csv(std::ostream& out, const StimulusSchedule& schedule,
                      UnitSystem units = UnitSystem::kSi);

}  // namespace sonovortex::scheduler
