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

// Config file loading. Every file is YAML with a fixed key
// set (docs/config-format.md); unknown keys are rejected. Values are SI.

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "sonovortex/acoustic.hpp"
#include "sonovortex/calibration.hpp"
#include "sonovortex/psychophysics.hpp"
#include "sonovortex/scheduler.hpp"
#include "sonovortex/vortex.hpp"

namespace sonovortex::config {

struct EngineConfig {
  // Array geometry. The array lies in the plane z = array_center.z, facing +z.
  std::size_t rows = acoustic::kDefaultRows;
  std::size_t cols = acoustic::kDefaultCols;
  double pitch = acoustic::kDefaultPitch;
  geometry::Point3 array_center{};
  std::size_t reference_row = 0;
  std::size_t reference_col = 0;
  double carrier_hz = acoustic::kDefaultCarrierHz;
  double speed_of_sound = acoustic::kDefaultSpeedOfSound;

  vortex::CannonSpec cannon;
  geometry::Point3 cannon_origin{};
  geometry::Point3 cannon_direction{0.0, 0.0, 1.0};
  double observed_vortex_speed = vortex::kReferenceVortexSpeed;

  std::optional<acoustic::ModulationConfig> modulation = acoustic::ModulationConfig{};
  scheduler::CompensationPolicy compensation;

  std::optional<calibration::CalibrationCurve> cannon_curve;
  std::optional<calibration::CalibrationCurve> ultrasound_curve;

  psychophysics::PerceiverModel perceiver;
  psychophysics::StimulusModelParams stimulus;

  acoustic::TransducerArray array() const;
  /// Ring shot launched at `launch_time` using the cannon's t_cone.
  vortex::VortexShot shot(double launch_time = 0.0) const;
  /// Stimulus-model parameters with the array fields taken from this config.
  psychophysics::StimulusModelParams stimulus_model() const;

  /// Checks every module invariant; throws ConfigError naming the key.
  void validate() const;
};

/// Defaults, with t_cone derived from the observed ring speed.
EngineConfig default_config();

EngineConfig parse_config(const std::string& yaml_text);
EngineConfig load_config(const std::filesystem::path& path);
std::string dump_config(const EngineConfig& config);
void save_config(const std::filesystem::path& path, const EngineConfig& config);

struct Scene {
  scheduler::HapticImage image;
  /// Absent key: use the engine's modulation. "none": continuous wave.
  std::optional<std::optional<acoustic::ModulationConfig>> modulation;
  std::optional<geometry::Point3> vortex_target;
  double start_time = 0.0;
};

Scene parse_scene(const std::string& yaml_text);
Scene load_scene(const std::filesystem::path& path);

/// Perceiver file: optional `perceiver:` and `stimulus:` sections that
/// override the matching parts of `base`.
void apply_perceiver_file(const std::filesystem::path& path, EngineConfig& base);
void apply_perceiver_text(const std::string& yaml_text, EngineConfig& base);

}  // namespace sonovortex::config
