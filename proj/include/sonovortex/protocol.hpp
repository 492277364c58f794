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

// Stream format, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "SVX1"
//   4       1     type: 0x01 phase frame, 0x02 cannon trigger, 0x03 end
//   5       8     timestamp, microseconds (u64)
//   13      2     payload length (u16)
//   15      n     payload
//   15+n    4     CRC-32 (ISO-HDLC) over bytes [0, 15+n)
//
// Phase payload:   rows u8, cols u8, rows*cols delays u16 (row-major, in
//                  1/256 carrier periods), intensity u16 (0..1248).
// Cannon payload:  cannon id u16.
// End payload:     empty. Exactly one end frame terminates the stream.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sonovortex/scheduler.hpp"

namespace sonovortex::protocol {

inline constexpr std::array<std::uint8_t, 4> kMagic{'S', 'V', 'X', '1'};
inline constexpr std::size_t kHeaderSize = 15;
inline constexpr std::size_t kCrcSize = 4;
inline constexpr std::size_t kFrameOverhead = kHeaderSize + kCrcSize;
inline constexpr double kDelaySubdivisions = 256.0;

enum class FrameType : std::uint8_t {
  kPhaseFrame = 0x01,
  kCannonTrigger = 0x02,
  kEnd = 0x03,
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// One frame per event followed by an end frame stamped with the last
/// event's time. Emit times are rounded to the microsecond and delays to
/// 1/256 carrier period. Throws EncodeError (with the event index) for a
/// negative or oversized delay, an array wider than 255, or p > 1248.
std::vector<std::uint8_t> encode(const scheduler::StimulusSchedule& schedule);

/// What the wire carries for one event.
struct DecodedEvent {
  std::uint64_t timestamp_us = 0;
  FrameType type = FrameType::kEnd;
  std::optional<acoustic::DelayTable> delays;  ///< phase frames, in seconds
  std::uint16_t intensity = 0;
  std::uint16_t cannon_id = 0;

  double emit_time() const { return static_cast<double>(timestamp_us) * 1e-6; }
};

struct DecodedStream {
  std::vector<DecodedEvent> events;  ///< end frame excluded
  std::uint64_t end_timestamp_us = 0;
};

/// Inverse of encode up to quantization. `carrier_hz` converts delay counts
/// back to seconds. Throws DecodeError naming the fault and byte offset.
DecodedStream decode(std::span<const std::uint8_t> bytes, double carrier_hz);

struct EmulatorRecord {
  std::uint64_t timestamp_us = 0;
  FrameType type = FrameType::kEnd;
  std::string summary;
};

/// Loopback device: replays a stream frame by frame and logs what it would
/// have driven.
std::vector<EmulatorRecord> emulate(std::span<const std::uint8_t> bytes, double carrier_hz);

}  // namespace sonovortex::protocol
