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

// Point-source superposition kernels. The OpenMP and serial variants share
// one per-sample routine so their summation order is identical.

#include <cmath>
#include <numbers>
#include <string>

#include "sonovortex/acoustic.hpp"
#include "sonovortex/error.hpp"

namespace sonovortex::acoustic {
namespace {

struct KernelInputs {
  std::span<const Point3> elements;
  std::span<const double> delays;
  std::span<const double> amplitudes;  // empty -> unit weights
  double omega = 0.0;
  double inv_c = 0.0;
};

KernelInputs prepare(const TransducerArray& array, const DelayTable& delays,
                     std::span<const double> amplitudes) {
  if (delays.rows() != array.rows() || delays.cols() != array.cols()) {
    throw DomainError("delay table shape does not match the array");
  }
  if (!amplitudes.empty() && amplitudes.size() != array.size()) {
    throw DomainError("amplitude count " + std::to_string(amplitudes.size()) +
                      " does not match element count " + std::to_string(array.size()));
  }
  return {array.elements(), delays.values(), amplitudes,
          2.0 * std::numbers::pi * array.carrier_hz(), 1.0 / array.speed_of_sound()};
}

// Not inlined: both loops must run exactly this instruction sequence.
[[gnu::noinline]] void evaluate_sample(const KernelInputs& in, Point3 p,
                                       std::complex<double>& out, std::uint8_t& singular) {
  double re = 0.0;
  double im = 0.0;
  std::uint8_t flag = 0;
  const std::size_t n = in.elements.size();
  for (std::size_t e = 0; e < n; ++e) {
    const double r = geometry::distance(p, in.elements[e]);
    if (r < kSingularRadius) {
      flag = 1;
      continue;
    }
    const double a = in.amplitudes.empty() ? 1.0 : in.amplitudes[e];
    const double phase = in.omega * (r * in.inv_c + in.delays[e]);
    const double w = a / r;
    re += w * std::cos(phase);
    im += w * std::sin(phase);
  }
  if (flag) {
    re = 0.0;
    im = 0.0;
  }
  out = {re, im};
  singular = flag;
}

}  // namespace

PressureField simulate_field(const TransducerArray& array, const DelayTable& delays,
                             const SampleGrid& grid, std::span<const double> amplitudes) {
  const KernelInputs in = prepare(array, delays, amplitudes);
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  std::vector<std::complex<double>> values(grid.size());
  std::vector<std::uint8_t> singular(grid.size(), 0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto idx = static_cast<std::size_t>(s);
    evaluate_sample(in, grid.point(idx), values[idx], singular[idx]);
  }
  return PressureField(grid, std::move(values), std::move(singular));
}

PressureField simulate_field_reference(const TransducerArray& array,
                                       const DelayTable& delays, const SampleGrid& grid,
                                       std::span<const double> amplitudes) {
  const KernelInputs in = prepare(array, delays, amplitudes);
  std::vector<std::complex<double>> values(grid.size());
  std::vector<std::uint8_t> singular(grid.size(), 0);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    evaluate_sample(in, grid.point(idx), values[idx], singular[idx]);
  }
  return PressureField(grid, std::move(values), std::move(singular));
}

}  // namespace sonovortex::acoustic
