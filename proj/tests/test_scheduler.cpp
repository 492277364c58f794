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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "sonovortex/error.hpp"
#include "sonovortex/scheduler.hpp"

using namespace sonovortex;
using namespace sonovortex::scheduler;
using acoustic::Waveform;

namespace {

TransducerArray reference_array() { return TransducerArray::centered(16, 16, 0.010); }

vortex::VortexShot reference_shot() {
  return vortex::VortexShot::from_slug_speed(0.0, {}, {0, 0, 1}, 14.4);
}

// Farthest element of the centered 16 x 16 array to an on-axis point.
double far_latency(double d) {
  const double half = 0.075;
  return std::sqrt(2 * half * half + d * d) / 340.0;
}

}  // namespace

TEST_CASE("one modulated focal point") {
  const HapticImage img{{{{0, 0, 0.15}, 624, 0.2}}};
  const auto s = render_image(img, reference_array(), ModulationConfig{Waveform::kRectangular, 50, 0.5});
  REQUIRE(s.size() == 10);
  double on = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& e = s.events()[i];
    const auto& f = std::get<PhaseFrame>(e.payload);
    on += f.on_duration;
    CHECK(e.emit_time == doctest::Approx(0.02 * static_cast<double>(i)));
    CHECK(f.intensity == 624);
    CHECK(f.delays.min() == 0.0);
    CHECK(e.predicted_arrival - e.emit_time == doctest::Approx(far_latency(0.15)).epsilon(1e-12));
  }
  CHECK(on == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.carrier_hz() == 40000.0);
}

TEST_CASE("continuous wave gives one frame per point") {
  const HapticImage img{{{{0, 0, 0.15}, 600, 0.3}, {{0.01, 0, 0.15}, 300, 0.1}}};
  const auto s = render_image(img, reference_array(), std::nullopt);
  REQUIRE(s.size() == 2);
  CHECK(std::get<PhaseFrame>(s.events()[0].payload).on_duration == 0.3);
  CHECK(s.events()[1].emit_time == doctest::Approx(0.3));
}

TEST_CASE("two focal points alternate strictly") {
  const HapticImage img{{{{-0.01, 0, 0.15}, 624, 0.1}, {{0.01, 0, 0.15}, 312, 0.1}}};
  const auto s = render_image(img, reference_array(), ModulationConfig{Waveform::kRectangular, 50, 0.5});
  REQUIRE(s.size() == 10);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.events()[i].focal_index() == i % 2);
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(s.events()[i].emit_time >= s.events()[i - 1].emit_time +
                                          std::get<PhaseFrame>(s.events()[i - 1].payload).on_duration -
                                          1e-15);
  }
}

TEST_CASE("render preconditions") {
  CHECK_THROWS_AS(render_image({}, reference_array(), std::nullopt), DomainError);
  const HapticImage bad{{{{0, 0, 0.15}, 2000, 0.1}}};
  CHECK_THROWS_AS(render_image(bad, reference_array(), std::nullopt), DomainError);
}

TEST_CASE("schedule ordering is by time, then kind, then focal index") {
  const DelayTable d(1, 1, {0.0});
  std::vector<Event> ev{
      {0.5, 0.6, {}, PhaseFrame{d, 1, 0.1, 2}},
      {0.5, 0.6, {}, PhaseFrame{d, 1, 0.1, 1}},
      {0.5, 0.6, {}, CannonTrigger{3}},
      {0.1, 0.6, {}, PhaseFrame{d, 1, 0.1, 0}},
  };
  const StimulusSchedule s(ev, 40000);
  CHECK(s.events()[0].emit_time == 0.1);
  CHECK(s.events()[1].kind() == EventKind::kCannonTrigger);
  CHECK(s.events()[2].focal_index() == 1);
  CHECK(s.events()[3].focal_index() == 2);
  CHECK_THROWS_AS(StimulusSchedule({{-1.0, 0, {}, CannonTrigger{}}}, 40000), DomainError);
}

TEST_CASE("computed co-arrival offset") {
  CompensationPolicy computed{CompensationPolicy::Mode::kComputed};
  const double off = co_arrival_offset({0, 0, 0.15}, reference_shot(), reference_array(), computed);
  CHECK(off == doctest::Approx(0.15 / 7.2 - far_latency(0.15)).epsilon(1e-12));
  CHECK(off * 1e3 == doctest::Approx(20.3).epsilon(5e-3));

  computed.mechanical_latency = 0.004;
  CHECK(co_arrival_offset({0, 0, 0.15}, reference_shot(), reference_array(), computed) ==
        doctest::Approx(off + 0.004).epsilon(1e-12));
}

TEST_CASE("fixed offset ignores geometry") {
  const CompensationPolicy fixed;
  for (double d : {0.05, 0.15, 0.6}) {
    CHECK(co_arrival_offset({0, 0, d}, reference_shot(), reference_array(), fixed) == 0.030);
  }
  CHECK(implied_mechanical_latency({0, 0, 0.15}, reference_shot(), reference_array(), fixed) ==
        doctest::Approx(0.030 - (0.15 / 7.2 - far_latency(0.15))).epsilon(1e-12));
}

TEST_CASE("offset tends to the mechanical latency as the target approaches") {
  // A single element at the cannon exit removes the acoustic spread.
  const auto one = TransducerArray::centered(1, 1, 0.01, {0, 0, 0});
  CompensationPolicy p{CompensationPolicy::Mode::kComputed, 0.03, 0.005};
  // Acoustic latency d/340 exceeds travel d/7.2 never; the difference shrinks with d.
  const double near = co_arrival_offset({0, 0, 1e-6}, reference_shot(), one, p);
  CHECK(near == doctest::Approx(0.005).epsilon(1e-6));
}

TEST_CASE("ultrasound slower than the ring is inconsistent") {
  const auto slow_air = TransducerArray::centered(16, 16, 0.01, {}, 40000, 5.0);
  const CompensationPolicy p{CompensationPolicy::Mode::kComputed};
  CHECK_THROWS_AS(co_arrival_offset({0, 0, 0.15}, reference_shot(), slow_air, p), ConsistencyError);
}

TEST_CASE("cross-field schedule in computed mode") {
  const HapticImage img{{{{0, 0, 0.15}, 624, 0.1}}};
  const auto s = schedule_cross_field(img, reference_shot(), {0, 0, 0.15}, reference_array(),
                                      ModulationConfig{}, {CompensationPolicy::Mode::kComputed});
  const Event* cannon = s.first(EventKind::kCannonTrigger);
  const Event* us = s.first(EventKind::kPhaseFrame);
  REQUIRE(cannon);
  REQUIRE(us);
  CHECK(cannon->emit_time == 0.0);
  CHECK(us->emit_time * 1e3 == doctest::Approx(20.3).epsilon(5e-3));
  CHECK(cannon->predicted_arrival == doctest::Approx(0.15 / 7.2).epsilon(1e-12));
  CHECK(std::abs(cannon->predicted_arrival - us->predicted_arrival) < 1e-12);
}

TEST_CASE("cross-field schedule in fixed mode") {
  const HapticImage img{{{{0, 0, 0.15}, 624, 0.1}}};
  const auto s = schedule_cross_field(img, reference_shot(), {0, 0, 0.15}, reference_array(),
                                      ModulationConfig{}, CompensationPolicy{});
  CHECK(s.first(EventKind::kPhaseFrame)->emit_time - s.first(EventKind::kCannonTrigger)->emit_time ==
        0.030);
}

TEST_CASE("cross-field preconditions") {
  const HapticImage img{{{{0, 0, 0.15}, 624, 0.1}}};
  CHECK_THROWS_AS(schedule_cross_field(img, reference_shot(), {0, 0, 0}, reference_array(),
                                       std::nullopt, CompensationPolicy{}),
                  GeometryError);
  const HapticImage far{{{{0.05, 0, 0.15}, 624, 0.1}}};
  CHECK_THROWS_AS(schedule_cross_field(far, reference_shot(), {0, 0, 0.15}, reference_array(),
                                       std::nullopt, CompensationPolicy{}),
                  ConfigError);
  const HapticImage off_axis{{{{0.1, 0, 0.02}, 624, 0.1}}};
  CHECK_THROWS_AS(schedule_cross_field(off_axis, reference_shot(), {0.1, 0, 0.02}, reference_array(),
                                       std::nullopt, CompensationPolicy{}),
                  TargetingError);
}

TEST_CASE("merge keeps both event sets and the carrier") {
  const HapticImage img{{{{0, 0, 0.15}, 624, 0.04}}};
  const auto a = render_image(img, reference_array(), ModulationConfig{});
  const StimulusSchedule b({{0.001, 0.02, {}, CannonTrigger{1}}}, 0.0);
  const auto m = StimulusSchedule::merge(b, a);
  CHECK(m.size() == a.size() + 1);
  CHECK(m.carrier_hz() == 40000.0);
  const StimulusSchedule c({}, 20000.0);
  CHECK_THROWS_AS(StimulusSchedule::merge(a, c), DomainError);
}

TEST_CASE("events CSV in both unit systems") {
  const HapticImage img{{{{0, 0, 0.15}, 624, 0.02}}};
  const auto s = render_image(img, reference_array(), std::nullopt);
  std::ostringstream si, mm;
  write_events_csv(si, s, UnitSystem::kSi);
  write_events_csv(mm, s, UnitSystem::kPaper);
  CHECK(si.str().rfind("emit_time_s,kind,target_x_m,target_y_m,target_z_m,predicted_arrival_s\n", 0) == 0);
  CHECK(mm.str().find("phase-frame,0.000000000,0.000000000,150.000000000") != std::string::npos);
}
