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

#include "sonovortex/psychophysics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace sonovortex::psychophysics {

Modality ExperimentCondition::test_modality() const {
  return (kind == StimulusKind::kCannonOnly || kind == StimulusKind::kCannonWithConstantUltrasound)
             ? Modality::kVortex
             : Modality::kUltrasound;
}

bool ExperimentCondition::has_background() const {
  return kind == StimulusKind::kCannonWithConstantUltrasound ||
         kind == StimulusKind::kUltrasoundWithConstantVortex;
}

std::string ExperimentCondition::description() const {
  switch (kind) {
    case StimulusKind::kUltrasoundOnly:
      return fmt::format("ultrasound {} Hz", modulation_hz);
    case StimulusKind::kCannonOnly:
      return "air cannon";
    case StimulusKind::kCannonWithConstantUltrasound:
      return fmt::format("air cannon with constant ultrasound {} Hz", modulation_hz);
    case StimulusKind::kUltrasoundWithConstantVortex:
      return fmt::format("ultrasound {} Hz with constant vortex", modulation_hz);
  }
  return "unknown";
}

void ExperimentCondition::validate() const {
  if (!(std::isfinite(test_force) && test_force >= 0.0)) {
    throw DomainError(fmt::format("condition {}: test force must be >= 0", label));
  }
  if (!(std::isfinite(background_force) && background_force >= 0.0)) {
    throw DomainError(fmt::format("condition {}: background force must be >= 0", label));
  }
  if (!has_background() && background_force != 0.0) {
    throw DomainError(fmt::format("condition {}: background force without a background", label));
  }
  const bool ultrasound_involved = kind != StimulusKind::kCannonOnly;
  if (ultrasound_involved && modulation_hz <= 0) {
    throw DomainError(fmt::format("condition {}: ultrasound needs a modulation frequency", label));
  }
}

std::vector<ExperimentCondition> double_point_conditions() {
  using K = StimulusKind;
  return {
      {"a", K::kUltrasoundOnly, 50, kUltrasoundTestForce, 0.0},
      {"b", K::kUltrasoundOnly, 200, kUltrasoundTestForce, 0.0},
      {"c", K::kCannonOnly, 0, kCannonTestForce, 0.0},
      {"d", K::kCannonWithConstantUltrasound, 50, kCannonTestForce, kUltrasoundTestForce},
      {"e", K::kCannonWithConstantUltrasound, 200, kCannonTestForce, kUltrasoundTestForce},
      {"f", K::kUltrasoundWithConstantVortex, 50, kUltrasoundTestForce, kCannonTestForce},
      {"g", K::kUltrasoundWithConstantVortex, 200, kUltrasoundTestForce, kCannonTestForce},
  };
}

std::vector<ExperimentCondition> perceptual_conditions() {
  using K = StimulusKind;
  return {
      {"a", K::kUltrasoundOnly, 50, 0.0, 0.0},
      {"b", K::kUltrasoundOnly, 200, 0.0, 0.0},
      {"c", K::kCannonOnly, 0, 0.0, 0.0},
      {"d", K::kCannonWithConstantUltrasound, 50, 0.0, kConstantUltrasoundForce},
      {"e", K::kCannonWithConstantUltrasound, 200, 0.0, kConstantUltrasoundForce},
      {"f", K::kUltrasoundWithConstantVortex, 50, 0.0, kCannonTestForce},
      {"g", K::kUltrasoundWithConstantVortex, 200, 0.0, kCannonTestForce},
  };
}

std::vector<double> force_levels(Modality modality) {
  const double lo = modality == Modality::kUltrasound ? kUltrasoundLevelMin : kVortexLevelMin;
  const double hi = modality == Modality::kUltrasound ? kUltrasoundLevelMax : kVortexLevelMax;
  std::vector<double> levels(kForceLevelCount);
  for (std::size_t i = 0; i < kForceLevelCount; ++i) {
    levels[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kForceLevelCount - 1);
  }
  levels.back() = hi;
  return levels;
}

std::string_view to_string(TwoPointResponse r) {
  switch (r) {
    case TwoPointResponse::kDivided: return "divided";
    case TwoPointResponse::kNotDivided: return "not-divided";
    case TwoPointResponse::kUnknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(SeriesDirection d) {
  return d == SeriesDirection::kDescending ? "descending" : "ascending";
}

void PerceiverModel::validate() const {
  if (!(std::isfinite(detection_threshold) && detection_threshold > 0.0)) {
    throw DomainError("perceiver detection threshold must be > 0");
  }
  if (!(valley_fraction > 0.0 && valley_fraction < 1.0)) {
    throw DomainError("perceiver valley fraction must be in (0, 1)");
  }
  if (!(peak_floor >= 0.0 && peak_floor < 1.0)) {
    throw DomainError("perceiver peak floor must be in [0, 1)");
  }
  if (!(std::isfinite(response_noise) && response_noise >= 0.0)) {
    throw DomainError("perceiver response noise must be >= 0");
  }
  if (!(std::isfinite(force_noise) && force_noise >= 0.0)) {
    throw DomainError("perceiver force noise must be >= 0");
  }
  if (!(masking >= 0.0 && masking <= 1.0)) throw DomainError("perceiver masking must be in [0, 1]");
}

std::vector<std::size_t> local_maxima(std::span<const double> profile) {
  std::vector<std::size_t> peaks;
  const std::size_t n = profile.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (profile[i] > profile[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && profile[j + 1] == profile[i]) ++j;
      if (j + 1 < n && profile[j + 1] < profile[i]) peaks.push_back(i);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return peaks;
}

TwinPeakPerceiver::TwinPeakPerceiver(const PerceiverModel& model)
    : model_(model), rng_(model.seed) {
  model_.validate();
}

TwoPointResponse TwinPeakPerceiver::judge(const TwoPointTrial& trial) {
  const auto profile = trial.profile;
  if (profile.empty()) return TwoPointResponse::kUnknown;
  const double global = *std::max_element(profile.begin(), profile.end());
  if (global < model_.detection_threshold) return TwoPointResponse::kUnknown;

  const double floor = std::max(model_.detection_threshold, model_.peak_floor * global);
  std::vector<std::size_t> peaks;
  for (std::size_t p : local_maxima(profile)) {
    if (profile[p] >= floor) peaks.push_back(p);
  }
  if (peaks.size() < 2) return TwoPointResponse::kNotDivided;

  std::partial_sort(peaks.begin(), peaks.begin() + 2, peaks.end(),
                    [&](std::size_t a, std::size_t b) { return profile[a] > profile[b]; });
  const std::size_t lo = std::min(peaks[0], peaks[1]);
  const std::size_t hi = std::max(peaks[0], peaks[1]);
  const double valley = *std::min_element(profile.begin() + static_cast<std::ptrdiff_t>(lo),
                                          profile.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  const double smaller = std::min(profile[lo], profile[hi]);
  double ratio = valley / smaller;
  if (model_.response_noise > 0.0) ratio += model_.response_noise * noise_(rng_);
  return ratio < model_.valley_fraction ? TwoPointResponse::kDivided : TwoPointResponse::kNotDivided;
}

bool TwinPeakPerceiver::detect(double test_force, double background_force) {
  double effective = test_force - model_.masking * background_force;
  if (model_.force_noise > 0.0) effective += model_.force_noise * noise_(rng_);
  return effective >= model_.detection_threshold;
}

TwoPointResponse SeparationCutoffPerceiver::judge(const TwoPointTrial& trial) {
  return trial.separation >= cutoff_ ? TwoPointResponse::kDivided : TwoPointResponse::kNotDivided;
}

void StimulusModelParams::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(std::isfinite(v) && v > 0.0)) throw DomainError(fmt::format("{} must be > 0", what));
  };
  positive(focal_depth, "focal depth");
  positive(vortex_sigma, "vortex footprint sigma");
  positive(line_margin, "profile margin");
  positive(line_step, "profile step");
  positive(max_separation, "maximum separation");
}

StimulusModel::StimulusModel(const StimulusModelParams& params)
    : params_(params),
      array_(acoustic::TransducerArray::centered(params.array_rows, params.array_cols,
                                                 params.pitch, {}, params.carrier_hz,
                                                 params.speed_of_sound)) {
  params_.validate();
  const double span = params_.max_separation + 2.0 * params_.line_margin;
  const auto n = static_cast<std::size_t>(std::llround(span / params_.line_step)) + 1;
  positions_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    positions_[i] = -params_.line_margin + static_cast<double>(i) * params_.line_step;
  }
}

const std::vector<double>& StimulusModel::ultrasound_footprint(double offset) const {
  const long long key = std::llround(offset * 1e9);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = ultrasound_cache_.find(key); it != ultrasound_cache_.end()) return it->second;
  }
  const geometry::Point3 focus{offset, 0.0, params_.focal_depth};
  const auto delays = acoustic::compute_delays(array_, focus).normalized();
  const geometry::SampleGrid line({positions_.front(), 0.0, params_.focal_depth},
                                  {positions_.back() - positions_.front(), 0.0, 0.0},
                                  {positions_.size(), 1, 1});
  const auto field = acoustic::simulate_field(array_, delays, line);
  std::vector<double> shape(positions_.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    shape[i] = field.singular(i) ? 0.0 : std::norm(field.value(i));
    peak = std::max(peak, shape[i]);
  }
  for (double& v : shape) v /= peak;

  std::lock_guard lock(cache_mutex_);
  return ultrasound_cache_.emplace(key, std::move(shape)).first->second;
}

std::vector<double> StimulusModel::footprint(Modality modality, double offset) const {
  if (modality == Modality::kUltrasound) return ultrasound_footprint(offset);
  std::vector<double> shape(positions_.size());
  const double two_var = 2.0 * params_.vortex_sigma * params_.vortex_sigma;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    const double dx = positions_[i] - offset;
    shape[i] = std::exp(-dx * dx / two_var);
  }
  return shape;
}

std::vector<double> StimulusModel::profile(const ExperimentCondition& condition,
                                           double separation) const {
  if (!(separation >= 0.0 && separation <= params_.max_separation + 1e-12)) {
    throw DomainError(fmt::format("separation {} m outside the modeled platform range", separation));
  }
  const Modality test = condition.test_modality();
  const auto standard = footprint(test, 0.0);
  const auto comparative = footprint(test, separation);
  std::vector<double> out(positions_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = condition.test_force * (standard[i] + comparative[i]);
  }
  if (condition.has_background() && condition.background_force > 0.0) {
    const Modality other = test == Modality::kUltrasound ? Modality::kVortex : Modality::kUltrasound;
    const auto bg = footprint(other, 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += condition.background_force * bg[i];
  }
  return out;
}

ThresholdResult run_method_of_limits(const ExperimentCondition& condition, Perceiver& perceiver,
                                     const StimulusModel& stimuli,
                                     const MethodOfLimitsOptions& options) {
  condition.validate();
  if (!(std::isfinite(options.step) && options.step > 0.0)) {
    throw DomainError("platform step must be > 0");
  }
  if (!(options.max_separation > options.step)) {
    throw DomainError("maximum separation must exceed one step");
  }
  if (options.max_separation > stimuli.params().max_separation + 1e-12) {
    throw DomainError("maximum separation exceeds the stimulus model's platform range");
  }
  if (options.repeats < 1) throw DomainError("method of limits needs at least one repeat");

  const auto k_max = static_cast<std::size_t>(std::floor(options.max_separation / options.step + 1e-9));
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> jitter(0, std::min(options.start_jitter_steps, k_max));

  auto respond = [&](std::size_t k) {
    const double s = static_cast<double>(k) * options.step;
    const auto profile = stimuli.profile(condition, s);
    const TwoPointResponse r = perceiver.judge({s, stimuli.positions(), profile});
    return TrialRecord{s, r};
  };

  ThresholdResult result;
  auto fail = [&](ThresholdRun run, const std::string& why) {
    result.runs.push_back(std::move(run));
    throw NonConvergenceError(fmt::format("condition {}: {}", condition.label, why),
                              std::move(result.runs));
  };

  for (std::size_t rep = 0; rep < options.repeats; ++rep) {
    ThresholdRun down{SeriesDirection::kDescending, options.step, {}, 0.0};
    for (std::size_t k = k_max - jitter(rng);; --k) {
      down.trials.push_back(respond(k));
      if (down.trials.back().response != TwoPointResponse::kDivided) {
        if (down.trials.size() == 1) {
          fail(std::move(down), "descending series started below threshold");
        }
        down.crossing = (static_cast<double>(k) + 0.5) * options.step;
        break;
      }
      if (k == 0) fail(std::move(down), "descending series still divided at zero separation");
    }
    result.runs.push_back(std::move(down));

    ThresholdRun up{SeriesDirection::kAscending, options.step, {}, 0.0};
    for (std::size_t k = jitter(rng);; ++k) {
      up.trials.push_back(respond(k));
      if (up.trials.back().response == TwoPointResponse::kDivided) {
        if (up.trials.size() == 1) fail(std::move(up), "ascending series started above threshold");
        up.crossing = (static_cast<double>(k) - 0.5) * options.step;
        break;
      }
      if (k == k_max) fail(std::move(up), "ascending series never divided within platform range");
    }
    result.runs.push_back(std::move(up));
  }

  double sum = 0.0;
  for (const auto& run : result.runs) sum += run.crossing;
  result.threshold = sum / static_cast<double>(result.runs.size());
  return result;
}

PerceptualResult run_perceptual_threshold(const ExperimentCondition& condition,
                                          Perceiver& perceiver, std::span<const double> levels,
                                          std::size_t trials_per_level, std::uint64_t seed) {
  condition.validate();
  if (levels.empty()) throw DomainError("perceptual threshold needs at least one force level");
  if (trials_per_level < 1) throw DomainError("need at least one trial per level");
  for (double f : levels) {
    if (!(std::isfinite(f) && f >= 0.0)) throw DomainError("force levels must be >= 0");
  }

  std::vector<std::size_t> order;
  order.reserve(levels.size() * trials_per_level);
  for (std::size_t i = 0; i < levels.size(); ++i) order.insert(order.end(), trials_per_level, i);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  PerceptualResult result;
  result.levels.assign(levels.begin(), levels.end());
  std::vector<std::size_t> hits(levels.size(), 0);
  for (std::size_t idx : order) {
    const bool felt = perceiver.detect(levels[idx], condition.background_force);
    result.trials.push_back({idx, levels[idx], felt});
    if (felt) ++hits[idx];
  }
  result.rates.resize(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    result.rates[i] = static_cast<double>(hits[i]) / static_cast<double>(trials_per_level);
  }
  return result;
}

SimultaneousResult run_simultaneous(int modulation_hz, Perceiver& perceiver,
                                    const StimulusModel& stimuli,
                                    const SimultaneousOptions& options) {
  if (modulation_hz <= 0) throw DomainError("simultaneous presentation needs a modulation frequency");
  if (options.trials < 1) throw DomainError("need at least one trial");
  if (!(options.timeline_step > 0.0) || !(options.vortex_pulse > 0.0)) {
    throw DomainError("timeline step and vortex pulse must be > 0");
  }

  const auto& array = stimuli.array();
  const geometry::Point3 origin = array.center();
  const geometry::Point3 target = origin + options.distance * array.normal();
  const auto shot = vortex::VortexShot::from_slug_speed(0.0, origin, array.normal(),
                                                        2.0 * options.vortex_speed);

  scheduler::HapticImage image;
  image.points.push_back(
      {target, calibration::setting_for_force(options.ultrasound_curve, options.ultrasound_force),
       options.ultrasound_duration});
  const acoustic::ModulationConfig modulation{acoustic::Waveform::kRectangular,
                                              static_cast<double>(modulation_hz), 0.5};

  SimultaneousResult result;
  result.modulation_hz = modulation_hz;
  result.schedule = scheduler::schedule_cross_field(image, shot, target, array, modulation,
                                                    options.policy);

  // Superpose both force timelines at the palm.
  double vortex_arrival = 0.0;
  double end = 0.0;
  for (const auto& e : result.schedule.events()) {
    if (e.kind() == scheduler::EventKind::kCannonTrigger) {
      vortex_arrival = e.predicted_arrival;
      end = std::max(end, e.predicted_arrival + options.vortex_pulse);
    } else {
      end = std::max(end, e.predicted_arrival + std::get<scheduler::PhaseFrame>(e.payload).on_duration);
    }
  }
  const auto samples = static_cast<std::size_t>(std::ceil(end / options.timeline_step)) + 1;
  double peak = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) * options.timeline_step;
    double force = 0.0;
    if (std::abs(t - vortex_arrival) <= 0.5 * options.vortex_pulse) force += options.cannon_force;
    for (const auto& e : result.schedule.events()) {
      const auto* frame = std::get_if<scheduler::PhaseFrame>(&e.payload);
      if (frame && t >= e.predicted_arrival && t < e.predicted_arrival + frame->on_duration) {
        force += options.ultrasound_force;
      }
    }
    peak = std::max(peak, force);
  }
  result.peak_force = peak;

  std::size_t felt = 0;
  for (std::size_t i = 0; i < options.trials; ++i) {
    if (perceiver.detect(peak, 0.0)) ++felt;
  }
  result.rate = static_cast<double>(felt) / static_cast<double>(options.trials);
  return result;
}

namespace {

double reference_threshold(const ExperimentCondition& c) {
  switch (c.kind) {
    case StimulusKind::kUltrasoundOnly: return human_baseline::kUltrasoundTwoPoint;
    case StimulusKind::kCannonOnly:
    case StimulusKind::kCannonWithConstantUltrasound: return human_baseline::kCannonTwoPoint;
    case StimulusKind::kUltrasoundWithConstantVortex:
      return human_baseline::kUltrasoundTwoPoint + human_baseline::kConstantVortexInflation;
  }
  return 0.0;
}

}  // namespace

void write_double_point_csv(std::ostream& out, std::span<const DoublePointOutcome> outcomes,
                            UnitSystem units) {
  const UnitScale u = unit_scale(units);
  out << "condition,level_or_separation,rate_or_response\n";
  for (const auto& o : outcomes) {
    for (const auto& run : o.result.runs) {
      for (const auto& t : run.trials) {
        fmt::print(out, "{},{:.6f},{}\n", o.condition.label, t.stimulus * u.length,
                   to_string(t.response));
      }
    }
  }
}

void write_double_point_thresholds_csv(std::ostream& out,
                                       std::span<const DoublePointOutcome> outcomes,
                                       UnitSystem units) {
  const UnitScale u = unit_scale(units);
  fmt::print(out, "condition,description,threshold_{0},reference_{0}\n", u.length_suffix);
  for (const auto& o : outcomes) {
    fmt::print(out, "{},{},{:.6f},{:.6f}\n", o.condition.label, o.condition.description(),
               o.result.threshold * u.length, reference_threshold(o.condition) * u.length);
  }
}

void write_perceptual_csv(std::ostream& out, std::span<const PerceptualOutcome> outcomes,
                          UnitSystem units) {
  const UnitScale u = unit_scale(units);
  out << "condition,level_or_separation,rate_or_response\n";
  for (const auto& o : outcomes) {
    for (std::size_t i = 0; i < o.result.levels.size(); ++i) {
      fmt::print(out, "{},{:.6f},{:.1f}\n", o.condition.label, o.result.levels[i] * u.force,
                 100.0 * o.result.rates[i]);
    }
  }
}

void write_simultaneous_csv(std::ostream& out, std::span<const SimultaneousResult> results) {
  out << "modulation_hz,rate_percent,reference_percent\n";
  for (const auto& r : results) {
    const double reference = r.modulation_hz == 50 ? human_baseline::kSimultaneousRate50Hz
                                                   : human_baseline::kSimultaneousRate200Hz;
    fmt::print(out, "{},{:.1f},{:.1f}\n", r.modulation_hz, 100.0 * r.rate, 100.0 * reference);
  }
}

}  // namespace sonovortex::psychophysics
