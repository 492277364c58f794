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

// sonovortex: batch front end for delay tables, field maps, cannon stability,
// cross-field schedules, simulated experiments and force calibration.
//
// Exit status: 0 success, 1 internal error, 2 bad input or domain error.

#include <cstdlib>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "sonovortex/acoustic.hpp"
#include "sonovortex/calibration.hpp"
#include "sonovortex/config.hpp"
#include "sonovortex/error.hpp"
#include "sonovortex/protocol.hpp"
#include "sonovortex/psychophysics.hpp"
#include "sonovortex/scheduler.hpp"
#include "sonovortex/vortex.hpp"

namespace fs = std::filesystem;
namespace sv = sonovortex;
using sv::geometry::Point3;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

struct Globals {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  sv::UnitSystem units = sv::UnitSystem::kSi;
};

sv::config::EngineConfig load(const Globals& g) {
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("SONOVORTEX_CONFIG"); env && *env) path = env;
  }
  return path.empty() ? sv::config::default_config() : sv::config::load_config(path);
}

std::ofstream open_out(const Globals& g, const std::string& name, bool binary = false) {
  fs::create_directories(g.out_dir);
  const fs::path path = fs::path(g.out_dir) / name;
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw sv::ConfigError(fmt::format("cannot write {}", path.string()));
  return out;
}

Point3 to_point(const std::vector<double>& v, double scale) {
  return {v.at(0) / scale, v.at(1) / scale, v.at(2) / scale};
}

// --- delays -----------------------------------------------------------------

void cmd_delays(const Globals& g, const std::vector<double>& focus_in) {
  const auto cfg = load(g);
  const auto u = sv::unit_scale(g.units);
  const auto array = cfg.array();
  const Point3 focus = to_point(focus_in, u.length);
  const auto raw = sv::acoustic::compute_delays(array, focus);
  const auto norm = raw.normalized();

  auto out = open_out(g, "delays.csv");
  fmt::print(out, "row,col,delay_{0},delay_normalized_{0}\n", u.time_suffix);
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < raw.cols(); ++c) {
      fmt::print(out, "{},{},{:.12e},{:.12e}\n", r, c, raw.at(r, c) * u.time, norm.at(r, c) * u.time);
    }
  }
  fmt::print("focus latency: {:.9f} {}\n", sv::acoustic::focus_latency(array, focus) * u.time,
             u.time_suffix);
  fmt::print("delay span: {:.9f} {}\n", (raw.max() - raw.min()) * u.time, u.time_suffix);
}

// --- field ------------------------------------------------------------------

struct FieldArgs {
  std::vector<double> focus;
  std::vector<double> center;
  std::vector<double> extent;  // empty: 40 mm x 40 mm slice
  std::vector<std::size_t> counts{41, 41, 1};
};

void cmd_field(const Globals& g, const FieldArgs& a) {
  const auto cfg = load(g);
  const auto u = sv::unit_scale(g.units);
  const auto array = cfg.array();
  const Point3 focus = to_point(a.focus, u.length);
  const Point3 center = a.center.empty() ? focus : to_point(a.center, u.length);
  const Point3 extent = a.extent.empty() ? Point3{0.04, 0.04, 0.0} : to_point(a.extent, u.length);
  const auto grid = sv::geometry::SampleGrid::centered(
      center, extent, {a.counts.at(0), a.counts.at(1), a.counts.at(2)});

  const auto delays = sv::acoustic::compute_delays(array, focus).normalized();
  const auto field = sv::acoustic::simulate_field(array, delays, grid);

  auto csv = open_out(g, "field.csv");
  sv::acoustic::write_field_csv(csv, field);
  auto pgm = open_out(g, "field.pgm", true);
  sv::acoustic::write_field_pgm(pgm, field, grid.counts()[2] / 2);

  const Point3 peak = grid.point(field.argmax());
  fmt::print("samples: {} (singular: {})\n", grid.size(), field.singular_count());
  fmt::print("argmax: {:.6f} {:.6f} {:.6f} {}\n", peak.x * u.length, peak.y * u.length,
             peak.z * u.length, u.length_suffix);
  fmt::print("offset from focus: {:.6f} {}\n", sv::geometry::distance(peak, focus) * u.length,
             u.length_suffix);
}

// --- stability --------------------------------------------------------------

void cmd_stability(const Globals& g, double volume_in, double aperture_in) {
  const auto cfg = load(g);
  const auto u = sv::unit_scale(g.units);
  const double volume = volume_in > 0.0 ? volume_in / u.volume : cfg.cannon.slug_volume;
  const double aperture = aperture_in > 0.0 ? aperture_in / u.length : cfg.cannon.aperture;

  const auto report = sv::vortex::is_stable(volume, aperture);
  const double d_min = sv::vortex::min_stable_aperture(volume);
  const double l_s = sv::vortex::slug_length(volume, aperture);

  auto out = open_out(g, "stability.csv");
  fmt::print(out, "quantity,value\n");
  fmt::print(out, "slug_volume_{},{:.9g}\n", u.volume_suffix, volume * u.volume);
  fmt::print(out, "aperture_{},{:.9g}\n", u.length_suffix, aperture * u.length);
  fmt::print(out, "slug_length_{},{:.9g}\n", u.length_suffix, l_s * u.length);
  fmt::print(out, "stroke_ratio,{:.9g}\n", sv::vortex::stroke_ratio(l_s, aperture));
  fmt::print(out, "stability_ratio,{:.9g}\n", report.ratio);
  fmt::print(out, "margin,{:.9g}\n", report.margin);
  fmt::print(out, "stable,{}\n", report.stable ? "yes" : "no");
  fmt::print(out, "formation,{}\n", sv::vortex::to_string(report.formation));
  fmt::print(out, "min_aperture_{},{:.9g}\n", u.length_suffix, d_min * u.length);

  fmt::print("stable: {} (ratio {:.4f}, margin {:.4f}, {})\n", report.stable ? "yes" : "no",
             report.ratio, report.margin, sv::vortex::to_string(report.formation));
  fmt::print("min stable aperture: {:.4f} {}\n", d_min * u.length, u.length_suffix);
}

// --- schedule ---------------------------------------------------------------

void cmd_schedule(const Globals& g, const std::string& scene_path) {
  const auto cfg = load(g);
  const auto u = sv::unit_scale(g.units);
  const auto scene = sv::config::load_scene(scene_path);
  const auto array = cfg.array();
  const auto modulation = scene.modulation ? *scene.modulation : cfg.modulation;

  sv::scheduler::StimulusSchedule schedule;
  if (scene.vortex_target) {
    auto policy = cfg.compensation;
    policy.mechanical_latency = cfg.cannon.mechanical_latency;
    schedule = sv::scheduler::schedule_cross_field(scene.image, cfg.shot(scene.start_time),
                                                   *scene.vortex_target, array, modulation, policy);
  } else {
    schedule = sv::scheduler::render_image(scene.image, array, modulation, scene.start_time);
  }

  const auto bytes = sv::scheduler::emit_schedule(schedule);
  auto bin = open_out(g, "schedule.bin", true);
  bin.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  auto csv = open_out(g, "events.csv");
  sv::scheduler::write_events_csv(csv, schedule, g.units);

  fmt::print("events: {}\n", schedule.size());
  fmt::print("bytes: {}\n", bytes.size());
  if (const auto* cannon = schedule.first(sv::scheduler::EventKind::kCannonTrigger)) {
    const auto* us = schedule.first(sv::scheduler::EventKind::kPhaseFrame);
    fmt::print("vortex arrival: {:.6f} {}\n", cannon->predicted_arrival * u.time, u.time_suffix);
    if (us) {
      fmt::print("first ultrasound arrival: {:.6f} {}\n", us->predicted_arrival * u.time,
                 u.time_suffix);
      fmt::print("emission offset: {:.6f} {}\n", (us->emit_time - cannon->emit_time) * u.time,
                 u.time_suffix);
    }
  }
}

// --- experiment -------------------------------------------------------------

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{base, seed, index};
  std::uint64_t out = 0;
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  out = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out;
}

void run_double_point(const Globals& g, const sv::config::EngineConfig& cfg,
                      const sv::psychophysics::StimulusModel& stimuli) {
  namespace ps = sv::psychophysics;
  std::vector<ps::DoublePointOutcome> outcomes;
  std::uint64_t i = 0;
  for (const auto& cond : ps::double_point_conditions()) {
    auto model = cfg.perceiver;
    model.seed = mix_seed(cfg.perceiver.seed, g.seed, i);
    ps::TwinPeakPerceiver perceiver(model);
    ps::MethodOfLimitsOptions opts;
    opts.max_separation = stimuli.params().max_separation;
    opts.seed = mix_seed(g.seed, i, 0x6d6f6c);
    outcomes.push_back({cond, ps::run_method_of_limits(cond, perceiver, stimuli, opts)});
    ++i;
  }
  auto trials = open_out(g, "double_point.csv");
  ps::write_double_point_csv(trials, outcomes, g.units);
  auto thresholds = open_out(g, "double_point_thresholds.csv");
  ps::write_double_point_thresholds_csv(thresholds, outcomes, g.units);
  const auto u = sv::unit_scale(g.units);
  for (const auto& o : outcomes) {
    fmt::print("({}) {:<40} threshold {:.5g} {}\n", o.condition.label, o.condition.description(),
               o.result.threshold * u.length, u.length_suffix);
  }
}

void run_perceptual(const Globals& g, const sv::config::EngineConfig& cfg) {
  namespace ps = sv::psychophysics;
  std::vector<ps::PerceptualOutcome> outcomes;
  std::uint64_t i = 0;
  for (const auto& cond : ps::perceptual_conditions()) {
    auto model = cfg.perceiver;
    model.seed = mix_seed(cfg.perceiver.seed, g.seed, 100 + i);
    ps::TwinPeakPerceiver perceiver(model);
    const auto levels = ps::force_levels(cond.test_modality());
    outcomes.push_back({cond, ps::run_perceptual_threshold(cond, perceiver, levels,
                                                           ps::kTrialsPerLevel,
                                                           mix_seed(g.seed, i, 0x706572))});
    ++i;
  }
  auto out = open_out(g, "perceptual.csv");
  ps::write_perceptual_csv(out, outcomes, g.units);
  fmt::print("perceptual: {} conditions x {} levels\n", outcomes.size(), ps::kForceLevelCount);
}

void run_simultaneous(const Globals& g, const sv::config::EngineConfig& cfg,
                      const sv::psychophysics::StimulusModel& stimuli) {
  namespace ps = sv::psychophysics;
  ps::SimultaneousOptions opts;
  opts.vortex_speed = cfg.observed_vortex_speed;
  opts.policy.mechanical_latency = cfg.cannon.mechanical_latency;
  if (cfg.ultrasound_curve) opts.ultrasound_curve = *cfg.ultrasound_curve;
  std::vector<ps::SimultaneousResult> results;
  std::uint64_t i = 0;
  for (int hz : {50, 200}) {
    auto model = cfg.perceiver;
    model.seed = mix_seed(cfg.perceiver.seed, g.seed, 200 + i);
    ps::TwinPeakPerceiver perceiver(model);
    results.push_back(ps::run_simultaneous(hz, perceiver, stimuli, opts));
    ++i;
  }
  auto out = open_out(g, "simultaneous.csv");
  ps::write_simultaneous_csv(out, results);
  for (const auto& r : results) {
    fmt::print("simultaneous {} Hz: {:.1f} %\n", r.modulation_hz, r.rate * 100.0);
  }
}

void cmd_experiment(const Globals& g, const std::string& protocol,
                    const std::string& perceiver_path) {
  auto cfg = load(g);
  if (!perceiver_path.empty()) sv::config::apply_perceiver_file(perceiver_path, cfg);
  const bool all = protocol == "all";
  if (!all && protocol != "double-point" && protocol != "perceptual" &&
      protocol != "simultaneous") {
    throw sv::ConfigError(fmt::format("unknown protocol '{}'", protocol));
  }
  const sv::psychophysics::StimulusModel stimuli(cfg.stimulus_model());
  if (all || protocol == "double-point") run_double_point(g, cfg, stimuli);
  if (all || protocol == "perceptual") run_perceptual(g, cfg);
  if (all || protocol == "simultaneous") run_simultaneous(g, cfg, stimuli);
}

// --- calibrate --------------------------------------------------------------

void cmd_calibrate(const Globals& g, const std::string& points_path, const std::string& kind_name,
                   const std::string& output) {
  auto cfg = load(g);
  std::ifstream in(points_path);
  if (!in) throw sv::ConfigError(fmt::format("cannot open {}", points_path));
  const auto points = sv::calibration::read_points_csv(in);
  const auto kind = sv::calibration::curve_kind_from_string(kind_name);
  const auto u = sv::unit_scale(g.units);

  if (kind == sv::calibration::CurveKind::kCannonLinear) {
    const auto curve = sv::calibration::fit_cannon_curve(points);
    cfg.cannon_curve = curve;
    fmt::print("cannon: slope {:.9g} {}/V, intercept {:.9g} {}, rms {:.3g} {}\n",
               curve.slope * u.force, u.force_suffix, curve.intercept * u.force, u.force_suffix,
               curve.residual * u.force, u.force_suffix);
  } else {
    const auto curve = sv::calibration::fit_ultrasound_fmax(points);
    cfg.ultrasound_curve = curve;
    fmt::print("ultrasound: f_max {:.9g} {}, rms {:.3g} {}\n", curve.f_max * u.force,
               u.force_suffix, curve.residual * u.force, u.force_suffix);
  }
  cfg.validate();
  const fs::path target = output.empty() ? fs::path(g.out_dir) / "config.yaml" : fs::path(output);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  sv::config::save_config(target, cfg);
  fmt::print("wrote {}\n", target.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultrasound + vortex-ring tactile stimulus engine"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::string units = "si";
  app.add_option("--config", g.config_path, "Engine config (YAML); falls back to $SONOVORTEX_CONFIG");
  app.add_option("--seed", g.seed, "Seed for simulated perceivers and trial order");
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--units", units, "Units for inputs and outputs")
      ->check(CLI::IsMember({"si", "paper"}));

  std::vector<double> focus;
  auto* delays = app.add_subcommand("delays", "Per-transducer delays for a focal point");
  delays->add_option("focus", focus, "x y z")->expected(3)->required();

  FieldArgs field_args;
  auto* field = app.add_subcommand("field", "Simulated pressure field (CSV + PGM)");
  field->add_option("--focus", field_args.focus, "x y z")->expected(3)->required();
  field->add_option("--center", field_args.center, "grid center x y z (default: focus)")
      ->expected(3);
  field->add_option("--extent", field_args.extent, "grid extent x y z")->expected(3);
  field->add_option("--counts", field_args.counts, "samples per axis")->expected(3);

  double volume = 0.0;
  double aperture = 0.0;
  auto* stability = app.add_subcommand("stability", "Vortex formation check for the cannon");
  stability->add_option("--volume", volume, "slug volume (default: config)");
  stability->add_option("--aperture", aperture, "aperture diameter (default: config)");

  std::string scene;
  auto* schedule = app.add_subcommand("schedule", "Schedule a scene and emit the wire stream");
  schedule->add_option("scene", scene, "scene file (YAML)")->required()->check(CLI::ExistingFile);

  std::string protocol;
  std::string perceiver;
  auto* experiment = app.add_subcommand("experiment", "Replay an experiment protocol");
  experiment->add_option("protocol", protocol, "double-point | perceptual | simultaneous | all")
      ->required();
  experiment->add_option("--perceiver", perceiver, "perceiver file (YAML)")
      ->check(CLI::ExistingFile);

  std::string points;
  std::string kind;
  std::string output;
  auto* calibrate = app.add_subcommand("calibrate", "Fit a force curve and write it to a config");
  calibrate->add_option("points", points, "CSV with header setting,force_mN")
      ->required()
      ->check(CLI::ExistingFile);
  calibrate->add_option("--kind", kind, "cannon | ultrasound")
      ->required()
      ->check(CLI::IsMember({"cannon", "ultrasound"}));
  calibrate->add_option("--output", output, "config file to write (default: OUT_DIR/config.yaml)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }
  g.units = units == "paper" ? sv::UnitSystem::kPaper : sv::UnitSystem::kSi;

  try {
    if (*delays) cmd_delays(g, focus);
    if (*field) cmd_field(g, field_args);
    if (*stability) cmd_stability(g, volume, aperture);
    if (*schedule) cmd_schedule(g, scene);
    if (*experiment) cmd_experiment(g, protocol, perceiver);
    if (*calibrate) cmd_calibrate(g, points, kind, output);
  } catch (const sv::DomainError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitInput;
  } catch (const sv::psychophysics::NonConvergenceError& e) {
    // A perceiver that never crosses is a property of the supplied model.
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kExitInternal;
  }
  return 0;
}
