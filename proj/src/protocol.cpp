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

#include "sonovortex/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/crc.hpp>
#include <fmt/format.h>

#include "sonovortex/error.hpp"

namespace sonovortex {

const char* to_string(DecodeFault fault) {
  switch (fault) {
    case DecodeFault::kTruncated: return "truncated frame";
    case DecodeFault::kBadMagic: return "bad magic";
    case DecodeFault::kBadType: return "unknown frame type";
    case DecodeFault::kBadCrc: return "CRC mismatch";
    case DecodeFault::kBadPayload: return "malformed payload";
    case DecodeFault::kTimestampOrder: return "timestamp went backwards";
    case DecodeFault::kMissingEnd: return "missing end frame";
    case DecodeFault::kTrailingBytes: return "bytes after end frame";
  }
  return "decode error";
}

}  // namespace sonovortex

namespace sonovortex::protocol {
namespace {

using scheduler::CannonTrigger;
using scheduler::Event;
using scheduler::PhaseFrame;

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

 private:
  std::vector<std::uint8_t>& out_;
};

std::uint64_t read_le(std::span<const std::uint8_t> b, std::size_t at, int width) {
  std::uint64_t v = 0;
  for (int i = width - 1; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
  return v;
}

void write_frame(std::vector<std::uint8_t>& out, FrameType type, std::uint64_t ts,
                 std::span<const std::uint8_t> payload) {
  const std::size_t start = out.size();
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  Writer w(out);
  w.u8(static_cast<std::uint8_t>(type));
  w.u64(ts);
  w.u16(static_cast<std::uint16_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  w.u32(crc32(std::span(out).subspan(start)));
}

std::vector<std::uint8_t> phase_payload(std::size_t index, const PhaseFrame& frame,
                                        double carrier_hz) {
  const auto& d = frame.delays;
  if (d.rows() > 255 || d.cols() > 255) {
    throw EncodeError(index, "array dimensions exceed 255");
  }
  const std::size_t bytes = 2 + 2 * d.rows() * d.cols() + 2;
  if (bytes > std::numeric_limits<std::uint16_t>::max()) {
    throw EncodeError(index, "phase payload exceeds 65535 bytes");
  }
  if (frame.intensity > acoustic::kIntensityPeriod) {
    throw EncodeError(index, fmt::format("intensity {} exceeds 1248", frame.intensity));
  }
  if (!(carrier_hz > 0.0)) throw EncodeError(index, "schedule has no carrier frequency");

  std::vector<std::uint8_t> out;
  out.reserve(bytes);
  Writer w(out);
  w.u8(static_cast<std::uint8_t>(d.rows()));
  w.u8(static_cast<std::uint8_t>(d.cols()));
  for (const double seconds : d.values()) {
    const double counts = std::round(seconds * carrier_hz * kDelaySubdivisions);
    if (!(counts >= 0.0)) {
      throw EncodeError(index, fmt::format("delay {} s is negative; normalize the table", seconds));
    }
    if (counts > std::numeric_limits<std::uint16_t>::max()) {
      throw EncodeError(index, fmt::format("delay {} s exceeds the 16-bit quantization range",
                                           seconds));
    }
    w.u16(static_cast<std::uint16_t>(counts));
  }
  w.u16(frame.intensity);
  return out;
}

std::uint64_t to_microseconds(std::size_t index, double t) {
  const double us = std::round(t * 1e6);
  if (!(us >= 0.0 && us < 1.8e19)) {
    throw EncodeError(index, fmt::format("emit time {} s is not encodable", t));
  }
  return static_cast<std::uint64_t>(us);
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

std::vector<std::uint8_t> encode(const scheduler::StimulusSchedule& schedule) {
  std::vector<std::uint8_t> out;
  std::uint64_t last = 0;
  const auto events = schedule.events();
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    const std::uint64_t ts = to_microseconds(i, e.emit_time);
    last = std::max(last, ts);
    if (const auto* f = std::get_if<PhaseFrame>(&e.payload)) {
      write_frame(out, FrameType::kPhaseFrame, ts, phase_payload(i, *f, schedule.carrier_hz()));
    } else {
      const auto& c = std::get<CannonTrigger>(e.payload);
      std::vector<std::uint8_t> payload;
      Writer(payload).u16(c.cannon_id);
      write_frame(out, FrameType::kCannonTrigger, ts, payload);
    }
  }
  write_frame(out, FrameType::kEnd, last, {});
  return out;
}

DecodedStream decode(std::span<const std::uint8_t> bytes, double carrier_hz) {
  if (!(std::isfinite(carrier_hz) && carrier_hz > 0.0)) {
    throw DomainError("decode needs a positive carrier frequency");
  }
  DecodedStream stream;
  std::size_t at = 0;
  std::uint64_t prev_ts = 0;
  while (true) {
    if (at == bytes.size()) throw DecodeError(DecodeFault::kMissingEnd, at, "stream ended");
    if (bytes.size() - at < kFrameOverhead) {
      throw DecodeError(DecodeFault::kTruncated, at,
                        fmt::format("{} bytes left, frame needs at least {}", bytes.size() - at,
                                    kFrameOverhead));
    }
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin() + static_cast<std::ptrdiff_t>(at))) {
      throw DecodeError(DecodeFault::kBadMagic, at, "expected SVX1");
    }
    const auto len = static_cast<std::size_t>(read_le(bytes, at + 13, 2));
    if (bytes.size() - at < kFrameOverhead + len) {
      throw DecodeError(DecodeFault::kTruncated, at,
                        fmt::format("payload length {} runs past end of stream", len));
    }
    const std::size_t crc_at = at + kHeaderSize + len;
    const auto stored = static_cast<std::uint32_t>(read_le(bytes, crc_at, 4));
    if (crc32(bytes.subspan(at, kHeaderSize + len)) != stored) {
      throw DecodeError(DecodeFault::kBadCrc, crc_at, "frame checksum does not match");
    }

    const std::uint8_t type = bytes[at + 4];
    const std::uint64_t ts = read_le(bytes, at + 5, 8);
    const auto payload = bytes.subspan(at + kHeaderSize, len);
    if (ts < prev_ts) {
      throw DecodeError(DecodeFault::kTimestampOrder, at + 5,
                        fmt::format("{} us after {} us", ts, prev_ts));
    }
    prev_ts = ts;

    DecodedEvent ev;
    ev.timestamp_us = ts;
    switch (type) {
      case static_cast<std::uint8_t>(FrameType::kPhaseFrame): {
        if (len < 4) throw DecodeError(DecodeFault::kBadPayload, at + kHeaderSize, "short phase payload");
        const std::size_t rows = payload[0];
        const std::size_t cols = payload[1];
        if (rows == 0 || cols == 0 || len != 4 + 2 * rows * cols) {
          throw DecodeError(DecodeFault::kBadPayload, at + kHeaderSize,
                            fmt::format("{}x{} array does not fit {} bytes", rows, cols, len));
        }
        std::vector<double> delays(rows * cols);
        for (std::size_t k = 0; k < delays.size(); ++k) {
          const auto counts = static_cast<double>(read_le(payload, 2 + 2 * k, 2));
          delays[k] = counts / (kDelaySubdivisions * carrier_hz);
        }
        ev.type = FrameType::kPhaseFrame;
        ev.delays.emplace(rows, cols, std::move(delays));
        ev.intensity = static_cast<std::uint16_t>(read_le(payload, len - 2, 2));
        if (ev.intensity > acoustic::kIntensityPeriod) {
          throw DecodeError(DecodeFault::kBadPayload, at + kHeaderSize + len - 2,
                            fmt::format("intensity {} exceeds 1248", ev.intensity));
        }
        stream.events.push_back(std::move(ev));
        break;
      }
      case static_cast<std::uint8_t>(FrameType::kCannonTrigger):
        if (len != 2) {
          throw DecodeError(DecodeFault::kBadPayload, at + kHeaderSize, "cannon payload must be 2 bytes");
        }
        ev.type = FrameType::kCannonTrigger;
        ev.cannon_id = static_cast<std::uint16_t>(read_le(payload, 0, 2));
        stream.events.push_back(std::move(ev));
        break;
      case static_cast<std::uint8_t>(FrameType::kEnd):
        if (len != 0) {
          throw DecodeError(DecodeFault::kBadPayload, at + kHeaderSize, "end frame carries a payload");
        }
        stream.end_timestamp_us = ts;
        at = crc_at + kCrcSize;
        if (at != bytes.size()) {
          throw DecodeError(DecodeFault::kTrailingBytes, at,
                            fmt::format("{} bytes follow the end frame", bytes.size() - at));
        }
        return stream;
      default:
        throw DecodeError(DecodeFault::kBadType, at + 4, fmt::format("type 0x{:02x}", type));
    }
    at = crc_at + kCrcSize;
  }
}

std::vector<EmulatorRecord> emulate(std::span<const std::uint8_t> bytes, double carrier_hz) {
  const DecodedStream stream = decode(bytes, carrier_hz);
  std::vector<EmulatorRecord> log;
  log.reserve(stream.events.size() + 1);
  for (const DecodedEvent& ev : stream.events) {
    if (ev.type == FrameType::kPhaseFrame) {
      const auto& d = *ev.delays;
      log.push_back({ev.timestamp_us, ev.type,
                     fmt::format("phase {}x{} p={} max_delay_us={:.3f}", d.rows(), d.cols(),
                                 ev.intensity, d.max() * 1e6)});
    } else {
      log.push_back({ev.timestamp_us, ev.type, fmt::format("cannon id={}", ev.cannon_id)});
    }
  }
  log.push_back({stream.end_timestamp_us, FrameType::kEnd, "end"});
  return log;
}

}  // namespace sonovortex::protocol
