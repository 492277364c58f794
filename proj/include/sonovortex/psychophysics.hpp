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

// Experiment protocols replayed against simulated perceivers: two-point
// thresholds by the method of limits, detection-rate sweeps over force
// levels, and simultaneous cannon + ultrasound presentation.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sonovortex/acoustic.hpp"
#include "sonovortex/calibration.hpp"
#include "sonovortex/error.hpp"
#include "sonovortex/scheduler.hpp"
#include "sonovortex/units.hpp"

namespace sonovortex::psychophysics {

/// Human results published for the original device. Overlays for reports;
/// nothing in the harness is tuned or tested against them.
namespace human_baseline {
inline constexpr double kUltrasoundTwoPoint = 0.006;    // m, conditions (a), (b)
inline constexpr double kCannonTwoPoint = 0.011;        // m, condition (c)
inline constexpr double kConstantVortexInflation = 0.003;  // m, (f), (g) over (a), (b)
inline constexpr double kUltrasoundUnderCannon50HzMaxRate = 0.20;
inline constexpr double kSimultaneousRate50Hz = 0.952;
inline constexpr double kSimultaneousRate200Hz = 1.00;
}  // namespace human_baseline

/// Operating points of the original study, newtons.
inline constexpr double kUltrasoundTestForce = 5.73e-3;
inline constexpr double kCannonTestForce = 7.67e-3;
inline constexpr double kConstantUltrasoundForce = 9.7e-3;
inline constexpr double kUltrasoundLevelMin = 0.70e-3;
inline constexpr double kUltrasoundLevelMax = 10.9e-3;
inline constexpr double kVortexLevelMin = 0.66e-3;
inline constexpr double kVortexLevelMax = 13.7e-3;
inline constexpr std::size_t kForceLevelCount = 6;
inline constexpr std::size_t kTrialsPerLevel = 10;
inline constexpr double kPlatformStep = 1e-4;  // m

enum class Modality { kUltrasound, kVortex };

enum class StimulusKind {
  kUltrasoundOnly,
  kCannonOnly,
  kCannonWithConstantUltrasound,
  kUltrasoundWithConstantVortex,
};

struct ExperimentCondition {
  std::string label;  ///< "a".."g"
  StimulusKind kind = StimulusKind::kUltrasoundOnly;
  int modulation_hz = 0;         ///< 50 or 200 when ultrasound is involved
  double test_force = 0.0;       ///< N, the stimulus being judged
  double background_force = 0.0; ///< N, the constant other-modality stimulus

  Modality test_modality() const;
  bool has_background() const;
  std::string description() const;
  void validate() const;
};

/// The seven two-point conditions (a)-(g).
std::vector<ExperimentCondition> double_point_conditions();

/// The seven detection-rate panels, same kinds and labels as above; the
/// test force is set per level at run time.
std::vector<ExperimentCondition> perceptual_conditions();

/// Six evenly spaced levels between the modality's published min and max.
std::vector<double> force_levels(Modality modality);

enum class TwoPointResponse { kDivided, kNotDivided, kUnknown };
std::string_view to_string(TwoPointResponse r);

struct PerceiverModel {
  double detection_threshold = 1.0e-3;  ///< N
  /// Divided when valley < valley_fraction * smaller peak.
  double valley_fraction = 0.75;
  /// Local maxima below this fraction of the global maximum are ignored.
  double peak_floor = 0.25;
  /// SD of Gaussian noise on the valley ratio.
  double response_noise = 0.0;
  /// SD of Gaussian noise on the felt force, N.
  double force_noise = 0.0;
  /// Fraction of a constant background force that masks the test stimulus.
  double masking = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// What the perceiver is shown for one two-point trial: the separation and
/// the combined lateral force profile (N) sampled at `positions` (m).
struct TwoPointTrial {
  double separation = 0.0;
  std::span<const double> positions;
  std::span<const double> profile;
};

class Perceiver {
 public:
  virtual ~Perceiver() = default;
  virtual TwoPointResponse judge(const TwoPointTrial& trial) = 0;
  /// Whether a stimulus of `test_force` is felt while `background_force`
  /// of the other modality is constantly present.
  virtual bool detect(double test_force, double background_force) = 0;
};

/// Twin-peak rule on the combined profile plus a hard force threshold for
/// detection, each optionally perturbed by seeded Gaussian noise.
class TwinPeakPerceiver final : public Perceiver {
 public:
  explicit TwinPeakPerceiver(const PerceiverModel& model);

  TwoPointResponse judge(const TwoPointTrial& trial) override;
  bool detect(double test_force, double background_force) override;
  const PerceiverModel& model() const { return model_; }

 private:
  PerceiverModel model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

/// Deterministic stand-in: divided iff separation >= cutoff.
class SeparationCutoffPerceiver final : public Perceiver {
 public:
  SeparationCutoffPerceiver(double cutoff, double detection_threshold)
      : cutoff_(cutoff), detection_threshold_(detection_threshold) {}

  TwoPointResponse judge(const TwoPointTrial& trial) override;
  bool detect(double test_force, double /*background_force*/) override {
    return test_force >= detection_threshold_;
  }

 private:
  double cutoff_;
  double detection_threshold_;
};

/// Indices of interior local maxima; a plateau counts once, at its first
/// sample.
std::vector<std::size_t> local_maxima(std::span<const double> profile);

struct StimulusModelParams {
  std::size_t array_rows = acoustic::kDefaultRows;
  std::size_t array_cols = acoustic::kDefaultCols;
  double pitch = acoustic::kDefaultPitch;
  double carrier_hz = acoustic::kDefaultCarrierHz;
  double speed_of_sound = acoustic::kDefaultSpeedOfSound;
  double focal_depth = 0.15;                     ///< m, array to palm
  double vortex_sigma = vortex::kReferenceAperture / 2.0;  ///< m, Gaussian footprint
  double line_margin = 0.015;                    ///< m beyond each stimulus
  double line_step = kPlatformStep;              ///< m
  double max_separation = 0.03;                  ///< m, platform travel

  void validate() const;
};

/// Lateral force profiles on the palm line y = 0, z = focal_depth.
/// Ultrasound footprints are |p|^2 from the field simulator, normalized to
/// unit peak; vortex footprints are Gaussian. Ultrasound footprints are
/// cached per focus offset; the cache is thread-safe.
class StimulusModel {
 public:
  explicit StimulusModel(const StimulusModelParams& params);

  const StimulusModelParams& params() const { return params_; }
  const acoustic::TransducerArray& array() const { return array_; }
  std::span<const double> positions() const { return positions_; }

  /// Unit-peak footprint of one stimulus centered at x = offset.
  std::vector<double> footprint(Modality modality, double offset) const;

  /// Standard stimulus at x = 0, comparative at x = separation, background
  /// (if any) at x = 0.
  std::vector<double> profile(const ExperimentCondition& condition, double separation) const;

 private:
  const std::vector<double>& ultrasound_footprint(double offset) const;

  StimulusModelParams params_;
  acoustic::TransducerArray array_;
  std::vector<double> positions_;
  mutable std::mutex cache_mutex_;
  mutable std::map<long long, std::vector<double>> ultrasound_cache_;
};

enum class SeriesDirection { kDescending, kAscending };
std::string_view to_string(SeriesDirection d);

struct TrialRecord {
  double stimulus = 0.0;  ///< separation (m) or force (N)
  TwoPointResponse response = TwoPointResponse::kNotDivided;
};

struct ThresholdRun {
  SeriesDirection direction = SeriesDirection::kDescending;
  double step = 0.0;
  std::vector<TrialRecord> trials;
  double crossing = 0.0;  ///< midpoint of the last two trials
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<ThresholdRun> log)
      : Error(what), log_(std::move(log)) {}
  const std::vector<ThresholdRun>& log() const { return log_; }

 private:
  std::vector<ThresholdRun> log_;
};

struct MethodOfLimitsOptions {
  double step = kPlatformStep;
  double max_separation = 0.03;
  /// Series start points are jittered by up to this many steps.
  std::size_t start_jitter_steps = 5;
  std::size_t repeats = 2;  ///< descending + ascending pairs
  std::uint64_t seed = 0;
};

struct ThresholdResult {
  double threshold = 0.0;  ///< mean of all crossings
  std::vector<ThresholdRun> runs;
};

/// Descending then ascending series, `repeats` times. "Unknown" answers
/// count as not divided. Separations are integer multiples of the step.
ThresholdResult run_method_of_limits(const ExperimentCondition& condition, Perceiver& perceiver,
                                     const StimulusModel& stimuli,
                                     const MethodOfLimitsOptions& options = {});

struct PerceptualTrial {
  std::size_t level_index = 0;
  double force = 0.0;
  bool perceived = false;
};

struct PerceptualResult {
  std::vector<double> levels;
  std::vector<double> rates;  ///< fraction perceived per level
  std::vector<PerceptualTrial> trials;  ///< in presentation order
};

/// Each level is presented `trials_per_level` times in seeded random order
/// against the condition's constant background.
PerceptualResult run_perceptual_threshold(const ExperimentCondition& condition,
                                          Perceiver& perceiver, std::span<const double> levels,
                                          std::size_t trials_per_level = kTrialsPerLevel,
                                          std::uint64_t seed = 0);

struct SimultaneousOptions {
  double cannon_force = kCannonTestForce;
  double ultrasound_force = kUltrasoundTestForce;
  double distance = 0.15;      ///< m, device to palm
  double vortex_speed = vortex::kReferenceVortexSpeed;
  double ultrasound_duration = 0.2;  ///< s
  double vortex_pulse = 0.005;       ///< s, contact time of the ring
  double timeline_step = 1e-4;       ///< s
  scheduler::CompensationPolicy policy{scheduler::CompensationPolicy::Mode::kComputed};
  calibration::CalibrationCurve ultrasound_curve =
      calibration::CalibrationCurve::ultrasound_sin2(kUltrasoundLevelMax);
  std::size_t trials = kTrialsPerLevel;
};

struct SimultaneousResult {
  int modulation_hz = 0;
  double rate = 0.0;
  double peak_force = 0.0;  ///< max of the superposed timeline, N
  scheduler::StimulusSchedule schedule;
};

/// Builds the cross-field schedule for a cannon + ultrasound presentation,
/// superposes both force timelines at the palm, and asks the perceiver to
/// detect the peak once per trial.
SimultaneousResult run_simultaneous(int modulation_hz, Perceiver& perceiver,
                                    const StimulusModel& stimuli,
                                    const SimultaneousOptions& options = {});

// Result exporters, columns condition,level_or_separation,rate_or_response
// (plus dedicated threshold and simultaneous tables).

struct DoublePointOutcome {
  ExperimentCondition condition;
  ThresholdResult result;
};

struct PerceptualOutcome {
  ExperimentCondition condition;
  PerceptualResult result;
};

void write_double_point_csv(std::ostream& out, std::span<const DoublePointOutcome> outcomes,
                            UnitSystem units = UnitSystem::kSi);
void write_double_point_thresholds_csv(std::ostream& out,
                                       std::span<const DoublePointOutcome> outcomes,
                                       UnitSystem units = UnitSystem::kSi);
void write_perceptual_csv(std::ostream& out, std::span<const PerceptualOutcome> outcomes,
                          UnitSystem units = UnitSystem::kSi);
void write_simultaneous_csv(std::ostream& out, std::span<const SimultaneousResult> results);

}  // namespace sonovortex::psychophysics
