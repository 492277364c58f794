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

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "sonovortex/vortex.hpp"

namespace sonovortex::calibration {

/// A device setting (volts for the cannon, intensity units for the array)
/// and the force it produced, in newtons.
struct CalibrationPoint {
  double setting = 0.0;
  double force = 0.0;
};

enum class CurveKind { kCannonLinear, kUltrasoundSin2 };

std::string_view to_string(CurveKind kind);
CurveKind curve_kind_from_string(std::string_view name);

struct CalibrationCurve {
  CurveKind kind = CurveKind::kCannonLinear;
  double slope = 0.0;      ///< N per volt (cannon)
  double intercept = 0.0;  ///< N (cannon)
  double f_max = 0.0;      ///< N (ultrasound)
  double residual = 0.0;   ///< RMS fit residual, N
  double setting_min = 0.0;
  double setting_max = 0.0;

  static CalibrationCurve cannon_linear(double slope, double intercept, double setting_min,
                                        double setting_max);
  static CalibrationCurve ultrasound_sin2(double f_max, double setting_min = 0.0,
                                          double setting_max = 624.0);

  void validate() const;
};

/// Least-squares line force = slope * V + intercept. Needs two distinct
/// settings.
CalibrationCurve fit_cannon_curve(std::span<const CalibrationPoint> points);

/// Least-squares scale of force = f_max * sin^2(pi p / 1248). Throws
/// UnidentifiableError when every point sits on a zero of sin^2.
CalibrationCurve fit_ultrasound_fmax(std::span<const CalibrationPoint> points);

/// Force the curve predicts at `setting`; a linear fit is clamped at zero.
double predict(const CalibrationCurve& curve, double setting);

/// Inverse of predict. For sin^2 the rising branch p in [0, 624] is used.
/// Throws OutOfRangeError for a negative force or one above the curve's
/// maximum over its calibrated range.
double setting_for_force(const CalibrationCurve& curve, double force);

struct TConeEstimate {
  double t_cone = 0.0;
  bool degenerate = false;  ///< zero slug length
};

/// Displacement time implied by an observed ring speed: L_S / (2 v).
TConeEstimate implied_t_cone(double slug_length, double observed_vortex_speed);
TConeEstimate implied_t_cone(const vortex::CannonSpec& spec, double observed_vortex_speed);

/// Reads `setting,force_mN` CSV (header required). Forces are converted to
/// newtons. Throws ConfigError with the line number on malformed input.
std::vector<CalibrationPoint> read_points_csv(std::istream& in);

}  // namespace sonovortex::calibration
