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

#include <string_view>

namespace sonovortex {

/// Everything inside the engine is SI. Exporters and the CLI can present
/// lengths in mm, times in ms, forces in mN and volumes in mm^3 instead.
enum class UnitSystem { kSi, kPaper };

struct UnitScale {
  double length;
  double time;
  double force;
  double volume;
  std::string_view length_suffix;
  std::string_view time_suffix;
  std::string_view force_suffix;
  std::string_view volume_suffix;
};

constexpr UnitScale unit_scale(UnitSystem u) {
  if (u == UnitSystem::kPaper) return {1e3, 1e3, 1e3, 1e9, "mm", "ms", "mN", "mm3"};
  return {1.0, 1.0, 1.0, 1.0, "m", "s", "N", "m3"};
}

}  // namespace sonovortex
