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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sonovortex/geometry.hpp"

namespace sonovortex::acoustic {

using geometry::Point3;
using geometry::SampleGrid;

inline constexpr double kDefaultCarrierHz = 40'000.0;
inline constexpr double kDefaultSpeedOfSound = 340.0;
inline constexpr double kDefaultPitch = 0.010;
inline constexpr std::size_t kDefaultRows = 16;
inline constexpr std::size_t kDefaultCols = 16;

/// Full-scale device intensity; sin^2(pi p / kIntensityPeriod) is the
/// intensity-to-force law.
inline constexpr double kIntensityPeriod = 1248.0;
inline constexpr double kIntensityAtPeak = kIntensityPeriod / 2.0;

/// Planar rectangular emitter grid. Element (row, col) sits at
/// origin + col * pitch * col_axis + row * pitch * row_axis.
class TransducerArray {
 public:
  struct Params {
    std::size_t rows = kDefaultRows;
    std::size_t cols = kDefaultCols;
    double pitch = kDefaultPitch;
    Point3 origin{};
    Point3 col_axis{1.0, 0.0, 0.0};
    Point3 row_axis{0.0, 1.0, 0.0};
    std::size_t reference_row = 0;
    std::size_t reference_col = 0;
    double carrier_hz = kDefaultCarrierHz;
    double speed_of_sound = kDefaultSpeedOfSound;
  };

  /// Validates every invariant; throws DomainError naming the offender.
  explicit TransducerArray(const Params& params);

  /// Array whose geometric center is `center`, lying in the plane spanned by
  /// the default axes (normal +z).
  static TransducerArray centered(std::size_t rows, std::size_t cols, double pitch,
                                  Point3 center = {},
                                  double carrier_hz = kDefaultCarrierHz,
                                  double speed_of_sound = kDefaultSpeedOfSound);

  const Params& params() const { return p_; }
  std::size_t rows() const { return p_.rows; }
  std::size_t cols() const { return p_.cols; }
  std::size_t size() const { return p_.rows * p_.cols; }
  double carrier_hz() const { return p_.carrier_hz; }
  double speed_of_sound() const { return p_.speed_of_sound; }
  double wavelength() const { return p_.speed_of_sound / p_.carrier_hz; }
  Point3 normal() const;
  Point3 center() const;

  Point3 element(std::size_t row, std::size_t col) const;
  Point3 reference_element() const { return element(p_.reference_row, p_.reference_col); }

  /// Element positions in row-major order; cached at construction.
  std::span<const Point3> elements() const { return elements_; }

 private:
  Params p_;
  std::vector<Point3> elements_;
};

/// Per-transducer emission delays in seconds, row-major.
class DelayTable {
 public:
  DelayTable(std::size_t rows, std::size_t cols, std::vector<double> seconds);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t row, std::size_t col) const { return seconds_[row * cols_ + col]; }
  std::span<const double> values() const { return seconds_; }
  double min() const;
  double max() const;

  /// Copy shifted so the smallest entry is exactly zero.
  DelayTable normalized() const;

  friend bool operator==(const DelayTable&, const DelayTable&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> seconds_;
};

/// Raw delays (l_ref - l_ij) / c. Entries for elements farther from the
/// focus than the reference are negative. Throws GeometryError when the
/// focus coincides with an element.
DelayTable compute_delays(const TransducerArray& array, Point3 focus);

/// Time from the frame's emit instant to in-phase arrival at the focus when
/// the normalized delay table is applied: max_ij(l_ij) / c.
double focus_latency(const TransducerArray& array, Point3 focus);

struct FocalPoint {
  Point3 position;
  double intensity = 0.0;  ///< device units in [0, 1248]
  double duration = 0.0;   ///< seconds, > 0

  void validate() const;
};

enum class Waveform { kRectangular };

struct ModulationConfig {
  Waveform waveform = Waveform::kRectangular;
  double frequency_hz = 50.0;
  double duty = 0.5;

  void validate() const;
};

struct OnInterval {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

/// Rectangular envelope on [0, duration): ceil(duration * f) on-intervals,
/// the last one clipped to the duration.
std::vector<OnInterval> apply_modulation(const ModulationConfig& config, double duration);

/// F = f_max * sin^2(pi p / 1248). Past p = 624 the law folds back and
/// reaches zero again at 1248.
double intensity_to_force(double intensity, double f_max);

class PressureField {
 public:
  PressureField(SampleGrid grid, std::vector<std::complex<double>> values,
                std::vector<std::uint8_t> singular);

  const SampleGrid& grid() const { return grid_; }
  std::span<const std::complex<double>> values() const { return values_; }
  std::complex<double> value(std::size_t linear) const { return values_[linear]; }
  double magnitude(std::size_t linear) const { return std::abs(values_[linear]); }
  bool singular(std::size_t linear) const { return singular_[linear] != 0; }
  std::size_t singular_count() const;

  /// Linear index of the largest |p| among non-singular samples.
  /// Throws DomainError if every sample is singular.
  std::size_t argmax() const;

  friend bool operator==(const PressureField&, const PressureField&) = default;

 private:
  SampleGrid grid_;
  std::vector<std::complex<double>> values_;
  std::vector<std::uint8_t> singular_;
};

/// Samples closer than this to an element are flagged singular.
inline constexpr double kSingularRadius = 1e-9;

/// Sum over elements of (a_ij / r) exp(i 2 pi f_c (r / c + dt_ij)).
/// Samples are evaluated in parallel (OpenMP); each sample sums elements in
/// row-major order, so the result is bitwise identical to
/// simulate_field_reference for any thread count. `amplitudes` is empty
/// (all ones) or one weight per element.
PressureField simulate_field(const TransducerArray& array, const DelayTable& delays,
                             const SampleGrid& grid,
                             std::span<const double> amplitudes = {});

/// Single-threaded reference kernel.
PressureField simulate_field_reference(const TransducerArray& array,
                                       const DelayTable& delays, const SampleGrid& grid,
                                       std::span<const double> amplitudes = {});

/// FWHM of |p| along `axis` through the arg-max, with linear interpolation of
/// the half-maximum crossings. Throws DomainError when the focus is outside
/// the grid, the axis has fewer than three samples, or the profile never
/// drops to half maximum inside the grid (flat profile).
double focal_spot_width(const PressureField& field, Point3 focus,
                        geometry::Axis axis = geometry::Axis::kX);

/// x,y,z,re,im,abs with a header row; singular samples are written as nan.
void write_field_csv(std::ostream& out, const PressureField& field);

/// Binary PGM (P5) of |p| for z-slice `k`, scaled so the maximum non-singular
/// sample maps to 255.
void write_field_pgm(std::ostream& out, const PressureField& field, std::size_t k);

}  // namespace sonovortex::acoustic
