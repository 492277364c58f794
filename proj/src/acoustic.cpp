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

#include "sonovortex/acoustic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sonovortex/error.hpp"

namespace sonovortex::acoustic {

TransducerArray::TransducerArray(const Params& params) : p_(params) {
  if (p_.rows < 1 || p_.cols < 1) throw DomainError("array needs rows, cols >= 1");
  if (!(std::isfinite(p_.pitch) && p_.pitch > 0.0)) throw DomainError("array pitch must be > 0");
  if (!(std::isfinite(p_.carrier_hz) && p_.carrier_hz > 0.0)) {
    throw DomainError("carrier frequency must be > 0");
  }
  if (!(std::isfinite(p_.speed_of_sound) && p_.speed_of_sound > 0.0)) {
    throw DomainError("speed of sound must be > 0");
  }
  if (p_.reference_row >= p_.rows || p_.reference_col >= p_.cols) {
    throw DomainError("reference element index outside the array");
  }
  if (!geometry::is_finite(p_.origin)) throw DomainError("array origin must be finite");
  p_.col_axis = geometry::normalized(p_.col_axis);
  p_.row_axis = geometry::normalized(p_.row_axis);
  if (std::abs(geometry::dot(p_.col_axis, p_.row_axis)) > 1e-9) {
    throw DomainError("array axes must be orthogonal");
  }

  elements_.reserve(size());
  for (std::size_t r = 0; r < p_.rows; ++r) {
    for (std::size_t c = 0; c < p_.cols; ++c) elements_.push_back(element(r, c));
  }
}

TransducerArray TransducerArray::centered(std::size_t rows, std::size_t cols, double pitch,
                                          Point3 center, double carrier_hz,
                                          double speed_of_sound) {
  Params p;
  p.rows = rows;
  p.cols = cols;
  p.pitch = pitch;
  const double half_w = 0.5 * static_cast<double>(cols > 0 ? cols - 1 : 0) * pitch;
  const double half_h = 0.5 * static_cast<double>(rows > 0 ? rows - 1 : 0) * pitch;
  p.origin = {center.x - half_w, center.y - half_h, center.z};
  p.carrier_hz = carrier_hz;
  p.speed_of_sound = speed_of_sound;
  return TransducerArray(p);
}

Point3 TransducerArray::element(std::size_t row, std::size_t col) const {
  return p_.origin + (static_cast<double>(col) * p_.pitch) * p_.col_axis +
         (static_cast<double>(row) * p_.pitch) * p_.row_axis;
}

Point3 TransducerArray::normal() const {
  return geometry::normalized(geometry::cross(p_.col_axis, p_.row_axis));
}

Point3 TransducerArray::center() const {
  return p_.origin + (0.5 * static_cast<double>(p_.cols - 1) * p_.pitch) * p_.col_axis +
         (0.5 * static_cast<double>(p_.rows - 1) * p_.pitch) * p_.row_axis;
}

DelayTable::DelayTable(std::size_t rows, std::size_t cols, std::vector<double> seconds)
    : rows_(rows), cols_(cols), seconds_(std::move(seconds)) {
  if (seconds_.size() != rows_ * cols_) {
    throw DomainError("delay table size does not match its shape");
  }
}

double DelayTable::min() const { return *std::min_element(seconds_.begin(), seconds_.end()); }
double DelayTable::max() const { return *std::max_element(seconds_.begin(), seconds_.end()); }

DelayTable DelayTable::normalized() const {
  const double lo = min();
  std::vector<double> shifted(seconds_.size());
  std::transform(seconds_.begin(), seconds_.end(), shifted.begin(),
                 [lo](double d) { return d - lo; });
  return DelayTable(rows_, cols_, std::move(shifted));
}

namespace {

void check_focus(const TransducerArray& array, Point3 focus) {
  if (!geometry::is_finite(focus)) throw GeometryError("focus must be finite");
  const auto elems = array.elements();
  for (std::size_t e = 0; e < elems.size(); ++e) {
    if (geometry::distance(focus, elems[e]) < kSingularRadius) {
      throw GeometryError(fmt::format("focus coincides with transducer ({}, {})",
                                      e / array.cols(), e % array.cols()));
    }
  }
}

}  // namespace

DelayTable compute_delays(const TransducerArray& array, Point3 focus) {
  check_focus(array, focus);
  const double c = array.speed_of_sound();
  const double l_ref = geometry::distance(focus, array.reference_element());
  std::vector<double> delays;
  delays.reserve(array.size());
  for (const Point3& e : array.elements()) {
    delays.push_back((l_ref - geometry::distance(focus, e)) / c);
  }
  return DelayTable(array.rows(), array.cols(), std::move(delays));
}

double focus_latency(const TransducerArray& array, Point3 focus) {
  check_focus(array, focus);
  double farthest = 0.0;
  for (const Point3& e : array.elements()) {
    farthest = std::max(farthest, geometry::distance(focus, e));
  }
  return farthest / array.speed_of_sound();
}

void FocalPoint::validate() const {
  if (!geometry::is_finite(position)) throw DomainError("focal point position must be finite");
  if (!(intensity >= 0.0 && intensity <= kIntensityPeriod)) {
    throw DomainError(fmt::format("focal intensity {} outside [0, 1248]", intensity));
  }
  if (!(std::isfinite(duration) && duration > 0.0)) {
    throw DomainError("focal point duration must be > 0");
  }
}

void ModulationConfig::validate() const {
  if (!(std::isfinite(frequency_hz) && frequency_hz > 0.0)) {
    throw DomainError("modulation frequency must be > 0");
  }
  if (!(duty > 0.0 && duty < 1.0)) throw DomainError("modulation duty must be in (0, 1)");
}

std::vector<OnInterval> apply_modulation(const ModulationConfig& config, double duration) {
  config.validate();
  if (!(std::isfinite(duration) && duration > 0.0)) {
    throw DomainError("modulation duration must be > 0");
  }
  const double period = 1.0 / config.frequency_hz;
  // 0.2 s * 50 Hz must count as exactly 10 periods, not 10 + 1 ulp.
  const double cycles = duration * config.frequency_hz;
  const auto count = static_cast<std::size_t>(std::ceil(cycles * (1.0 - 1e-12)));
  std::vector<OnInterval> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double start = static_cast<double>(k) * period;
    const double end = std::min(start + config.duty * period, duration);
    out.push_back({start, end});
  }
  return out;
}

double intensity_to_force(double intensity, double f_max) {
  if (!(intensity >= 0.0 && intensity <= kIntensityPeriod)) {
    throw DomainError(fmt::format("intensity {} outside [0, 1248]", intensity));
  }
  if (!(std::isfinite(f_max) && f_max > 0.0)) throw DomainError("f_max must be > 0");
  const double s = std::sin(std::numbers::pi * intensity / kIntensityPeriod);
  return f_max * s * s;
}

PressureField::PressureField(SampleGrid grid, std::vector<std::complex<double>> values,
                             std::vector<std::uint8_t> singular)
    : grid_(std::move(grid)), values_(std::move(values)), singular_(std::move(singular)) {
  if (values_.size() != grid_.size() || singular_.size() != grid_.size()) {
    throw DomainError("field data does not match grid dimensions");
  }
}

std::size_t PressureField::singular_count() const {
  return static_cast<std::size_t>(std::count(singular_.begin(), singular_.end(), 1));
}

std::size_t PressureField::argmax() const {
  std::size_t best = values_.size();
  double best_mag = -1.0;
  for (std::size_t s = 0; s < values_.size(); ++s) {
    if (singular_[s]) continue;
    const double m = std::abs(values_[s]);
    if (m > best_mag) {
      best_mag = m;
      best = s;
    }
  }
  if (best == values_.size()) throw DomainError("field has no non-singular samples");
  return best;
}

double focal_spot_width(const PressureField& field, Point3 focus, geometry::Axis axis) {
  const SampleGrid& grid = field.grid();
  if (!grid.contains(focus)) throw DomainError("focus lies outside the field grid");
  const auto a = static_cast<std::size_t>(axis);
  const std::size_t n = grid.counts()[a];
  if (n < 3) throw DomainError("lateral axis needs at least three samples");

  const std::size_t peak_idx = field.argmax();
  const auto peak_pos = grid.unravel(peak_idx);
  const double half = 0.5 * field.magnitude(peak_idx);
  const double h = grid.step(axis);

  auto mag_at = [&](std::size_t m) {
    auto ijk = peak_pos;
    ijk[a] = m;
    const std::size_t lin = grid.index(ijk[0], ijk[1], ijk[2]);
    return field.singular(lin) ? 0.0 : field.magnitude(lin);
  };

  // Offset (in samples, relative to the peak) where |p| crosses half.
  std::optional<double> left;
  for (std::size_t m = peak_pos[a]; m-- > 0;) {
    const double lo = mag_at(m);
    if (lo < half) {
      const double hi = mag_at(m + 1);
      left = static_cast<double>(m) + (half - lo) / (hi - lo);
      break;
    }
  }
  std::optional<double> right;
  for (std::size_t m = peak_pos[a] + 1; m < n; ++m) {
    const double lo = mag_at(m);
    if (lo < half) {
      const double hi = mag_at(m - 1);
      right = static_cast<double>(m) - (half - lo) / (hi - lo);
      break;
    }
  }
  if (!left || !right) {
    throw DomainError("profile does not fall to half maximum inside the grid");
  }
  return (*right - *left) * h;
}

void write_field_csv(std::ostream& out, const PressureField& field) {
  out << "x,y,z,re,im,abs\n";
  const SampleGrid& grid = field.grid();
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const Point3 p = grid.point(s);
    if (field.singular(s)) {
      fmt::print(out, "{:.9g},{:.9g},{:.9g},nan,nan,nan\n", p.x, p.y, p.z);
      continue;
    }
    const auto v = field.value(s);
    fmt::print(out, "{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", p.x, p.y, p.z, v.real(),
               v.imag(), std::abs(v));
  }
}

void write_field_pgm(std::ostream& out, const PressureField& field, std::size_t k) {
  const SampleGrid& grid = field.grid();
  const auto& n = grid.counts();
  if (k >= n[2]) throw DomainError("slice index outside the grid");
  double peak = 0.0;
  for (std::size_t j = 0; j < n[1]; ++j) {
    for (std::size_t i = 0; i < n[0]; ++i) {
      const std::size_t s = grid.index(i, j, k);
      if (!field.singular(s)) peak = std::max(peak, field.magnitude(s));
    }
  }
  out << "P5\n" << n[0] << ' ' << n[1] << "\n255\n";
  for (std::size_t j = 0; j < n[1]; ++j) {
    for (std::size_t i = 0; i < n[0]; ++i) {
      const std::size_t s = grid.index(i, j, k);
      double level = 0.0;
      if (!field.singular(s) && peak > 0.0) level = 255.0 * field.magnitude(s) / peak;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(level))));
    }
  }
}

}  // namespace sonovortex::acoustic
