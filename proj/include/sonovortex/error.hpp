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
#include <stdexcept>
#include <string>

namespace sonovortex {

/// Root of every error the engine throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an input outside an operation's domain. The CLI maps
/// this family to exit code 2.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Focus or sample coincides with a transducer, or a target is unreachable.
class GeometryError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Target lies off the vortex ray beyond the angular tolerance.
class TargetingError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InsufficientDataError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnidentifiableError : public DomainError {
 public:
  using DomainError::DomainError;
};

class OutOfRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An internal invariant failed (e.g. a negative co-arrival offset). Exit 1.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public DomainError {
 public:
  EncodeError(std::size_t event_index, const std::string& what)
      : DomainError("event " + std::to_string(event_index) + ": " + what),
        event_index_(event_index) {}

  std::size_t event_index() const noexcept { return event_index_; }

 private:
  std::size_t event_index_;
};

enum class DecodeFault {
  kTruncated,
  kBadMagic,
  kBadType,
  kBadCrc,
  kBadPayload,
  kTimestampOrder,
  kMissingEnd,
  kTrailingBytes,
};

const char* to_string(DecodeFault fault);

class DecodeError : public DomainError {
 public:
  DecodeError(DecodeFault fault, std::size_t offset, const std::string& detail)
      : DomainError(std::string(to_string(fault)) + " at byte " +
                    std::to_string(offset) + ": " + detail),
        fault_(fault),
        offset_(offset) {}

  DecodeFault fault() const noexcept { return fault_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  DecodeFault fault_;
  std::size_t offset_;
};

}  // namespace sonovortex
