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

#include "sonovortex/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <string>
#include <tuple>

#include <fmt/format.h>

#include "sonovortex/acoustic.hpp"
#include "sonovortex/error.hpp"

namespace sonovortex::calibration {
namespace {

double sin2_basis(double p) {
  const double s = std::sin(std::numbers::pi * p / acoustic::kIntensityPeriod);
  return s * s;
}

void check_points(std::span<const CalibrationPoint> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].setting) || !(points[i].force >= 0.0) ||
        !std::isfinite(points[i].force)) {
      throw DomainError(fmt::format("calibration point {} is invalid (force must be >= 0)", i));
    }
  }
}

std::pair<double, double> setting_range(std::span<const CalibrationPoint> points) {
  const auto [lo, hi] = std::minmax_element(
      points.begin(), points.end(),
      [](const CalibrationPoint& a, const CalibrationPoint& b) { return a.setting < b.setting; });
  return {lo->setting, hi->setting};
}

double rms_residual(const CalibrationCurve& c, std::span<const CalibrationPoint> points) {
  double ss = 0.0;
  for (const auto& pt : points) {
    const double model = c.kind == CurveKind::kCannonLinear
                             ? c.slope * pt.setting + c.intercept
                             : c.f_max * sin2_basis(pt.setting);
    ss += (pt.force - model) * (pt.force - model);
  }
  return std::sqrt(ss / static_cast<double>(points.size()));
}

}  // namespace

std::string_view to_string(CurveKind kind) {
  return kind == CurveKind::kCannonLinear ? "cannon" : "ultrasound";
}

CurveKind curve_kind_from_string(std::string_view name) {
  if (name == "cannon") return CurveKind::kCannonLinear;
  if (name == "ultrasound") return CurveKind::kUltrasoundSin2;
  throw DomainError(fmt::format("unknown calibration kind '{}'", name));
}

CalibrationCurve CalibrationCurve::cannon_linear(double slope, double intercept,
                                                 double setting_min, double setting_max) {
  CalibrationCurve c;
  c.kind = CurveKind::kCannonLinear;
  c.slope = slope;
  c.intercept = intercept;
  c.setting_min = setting_min;
  c.setting_max = setting_max;
  c.validate();
  return c;
}

CalibrationCurve CalibrationCurve::ultrasound_sin2(double f_max, double setting_min,
                                                   double setting_max) {
  CalibrationCurve c;
  c.kind = CurveKind::kUltrasoundSin2;
  c.f_max = f_max;
  c.setting_min = setting_min;
  c.setting_max = setting_max;
  c.validate();
  return c;
}

void CalibrationCurve::validate() const {
  if (!(setting_min <= setting_max)) throw DomainError("calibrated range is empty");
  if (kind == CurveKind::kCannonLinear) {
    if (!std::isfinite(slope) || !std::isfinite(intercept)) {
      throw DomainError("cannon curve coefficients must be finite");
    }
  } else {
    if (!(std::isfinite(f_max) && f_max > 0.0)) throw DomainError("f_max must be > 0");
    if (setting_min < 0.0 || setting_max > acoustic::kIntensityPeriod) {
      throw DomainError("ultrasound range must lie within [0, 1248]");
    }
  }
}

CalibrationCurve fit_cannon_curve(std::span<const CalibrationPoint> points) {
  check_points(points);
  if (points.empty()) throw InsufficientDataError("cannon fit needs at least two settings");
  const auto n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& pt : points) {
    mx += pt.setting;
    my += pt.force;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& pt : points) {
    sxx += (pt.setting - mx) * (pt.setting - mx);
    sxy += (pt.setting - mx) * (pt.force - my);
  }
  if (sxx == 0.0) {
    throw InsufficientDataError("cannon fit needs at least two distinct settings");
  }
  CalibrationCurve c;
  c.kind = CurveKind::kCannonLinear;
  c.slope = sxy / sxx;
  c.intercept = my - c.slope * mx;
  std::tie(c.setting_min, c.setting_max) = setting_range(points);
  c.residual = rms_residual(c, points);
  return c;
}

CalibrationCurve fit_ultrasound_fmax(std::span<const CalibrationPoint> points) {
  check_points(points);
  if (points.empty()) throw InsufficientDataError("ultrasound fit needs at least one point");
  double sbb = 0.0;
  double sbf = 0.0;
  for (const auto& pt : points) {
    if (pt.setting < 0.0 || pt.setting > acoustic::kIntensityPeriod) {
      throw DomainError(fmt::format("intensity {} outside [0, 1248]", pt.setting));
    }
    const double b = sin2_basis(pt.setting);
    sbb += b * b;
    sbf += b * pt.force;
  }
  // sin^2 at p = 1248 is ~1e-32 rather than 0; treat that as no information.
  if (sbb < 1e-20) {
    throw UnidentifiableError("every point lies on a zero of sin^2; f_max is unidentifiable");
  }
  CalibrationCurve c;
  c.kind = CurveKind::kUltrasoundSin2;
  c.f_max = sbf / sbb;
  if (!(c.f_max > 0.0)) throw UnidentifiableError("fitted f_max is not positive");
  std::tie(c.setting_min, c.setting_max) = setting_range(points);
  c.residual = rms_residual(c, points);
  return c;
}

double predict(const CalibrationCurve& curve, double setting) {
  if (curve.kind == CurveKind::kCannonLinear) {
    return std::max(0.0, curve.slope * setting + curve.intercept);
  }
  return acoustic::intensity_to_force(setting, curve.f_max);
}

double setting_for_force(const CalibrationCurve& curve, double force) {
  if (!(std::isfinite(force) && force >= 0.0)) {
    throw OutOfRangeError("force must be finite and >= 0");
  }
  if (curve.kind == CurveKind::kCannonLinear) {
    if (!(curve.slope > 0.0)) throw OutOfRangeError("cannon curve is not increasing");
    const double top = predict(curve, curve.setting_max);
    if (force > top) {
      throw OutOfRangeError(fmt::format("force {:.6g} N above curve maximum {:.6g} N", force, top));
    }
    return (force - curve.intercept) / curve.slope;
  }
  const double top_setting = std::min(curve.setting_max, acoustic::kIntensityAtPeak);
  const double top = curve.f_max * sin2_basis(top_setting);
  if (force > top) {
    throw OutOfRangeError(fmt::format("force {:.6g} N above curve maximum {:.6g} N", force, top));
  }
  return acoustic::kIntensityPeriod / std::numbers::pi * std::asin(std::sqrt(force / curve.f_max));
}

TConeEstimate implied_t_cone(double slug_length, double observed_vortex_speed) {
  if (!(std::isfinite(observed_vortex_speed) && observed_vortex_speed > 0.0)) {
    throw DomainError("observed vortex speed must be > 0");
  }
  if (!(std::isfinite(slug_length) && slug_length >= 0.0)) {
    throw DomainError("slug length must be >= 0");
  }
  return {slug_length / (2.0 * observed_vortex_speed), slug_length == 0.0};
}

TConeEstimate implied_t_cone(const vortex::CannonSpec& spec, double observed_vortex_speed) {
  return implied_t_cone(vortex::slug_length(spec.slug_volume, spec.aperture),
                        observed_vortex_speed);
}

std::vector<CalibrationPoint> read_points_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string& s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  };
  if (!std::getline(in, line)) throw ConfigError("calibration CSV is empty");
  ++line_no;
  trim(line);
  if (line != "setting,force_mN") {
    throw ConfigError("calibration CSV line 1: header must be 'setting,force_mN'");
  }
  auto parse = [&](std::string_view text, double& out) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
  };
  std::vector<CalibrationPoint> points;
  while (std::getline(in, line)) {
    ++line_no;
    trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    double setting = 0.0;
    double force_mn = 0.0;
    if (comma == std::string::npos ||
        !parse(std::string_view(line).substr(0, comma), setting) ||
        !parse(std::string_view(line).substr(comma + 1), force_mn)) {
      throw ConfigError(fmt::format("calibration CSV line {}: expected two numbers", line_no));
    }
    if (force_mn < 0.0) {
      throw ConfigError(fmt::format("calibration CSV line {}: force must be >= 0", line_no));
    }
    points.push_back({setting, force_mn * 1e-3});
  }
  return points;
}

}  // namespace sonovortex::calibration
