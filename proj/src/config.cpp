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

#include "sonovortex/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "sonovortex/error.hpp"

namespace sonovortex::config {
namespace {

using geometry::Point3;

/// Typed access to one YAML mapping that remembers which keys were read so
/// leftovers can be reported.
class Section {
 public:
  Section(YAML::Node node, std::string path)
      : node_(std::move(node)), path_(std::move(path)), present_(node_.IsDefined() && !node_.IsNull()) {
    if (present_ && !node_.IsMap()) throw ConfigError(fmt::format("{}: expected a mapping", where()));
  }

  bool has(const char* key) {
    seen_.insert(key);
    return present_ && lookup(key);
  }

  template <typename T>
  void read(const char* key, T& out) {
    if (!has(key)) return;
    try {
      out = lookup(key).as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(fmt::format("{}: wrong type", name(key)));
    }
  }

  void read_point(const char* key, Point3& out) {
    if (!has(key)) return;
    const YAML::Node n = lookup(key);
    if (!n.IsSequence() || n.size() != 3) {
      throw ConfigError(fmt::format("{}: expected [x, y, z]", name(key)));
    }
    try {
      out = {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
    } catch (const YAML::Exception&) {
      throw ConfigError(fmt::format("{}: expected numbers", name(key)));
    }
  }

  Section child(const char* key) { return Section(raw(key), name(key)); }

  YAML::Node raw(const char* key) {
    seen_.insert(key);
    return present_ ? lookup(key) : YAML::Node(YAML::NodeType::Undefined);
  }

  explicit operator bool() const { return present_; }

  void finish() const {
    if (!present_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(fmt::format("{}: unknown key", name(key)));
    }
  }

  std::string name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  // Const lookup so a missing key never inserts into the document.
  YAML::Node lookup(const char* key) const {
    const YAML::Node& n = node_;
    YAML::Node v = n[key];
    return v.IsDefined() && !v.IsNull() ? v : YAML::Node(YAML::NodeType::Undefined);
  }

  std::string where() const { return path_.empty() ? "document" : path_; }

  YAML::Node node_;
  std::string path_;
  bool present_;
  std::set<std::string, std::less<>> seen_;
};

YAML::Node parse_yaml(const std::string& text, const char* what) {
  try {
    YAML::Node root = YAML::Load(text);
    if (root.IsNull()) return YAML::Node(YAML::NodeType::Map);
    if (!root.IsMap()) throw ConfigError(fmt::format("{}: top level must be a mapping", what));
    return root;
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("{}: {}", what, e.what()));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<acoustic::ModulationConfig> read_modulation(Section& parent) {
  const YAML::Node raw = parent.raw("modulation");
  if (raw.IsScalar() && raw.as<std::string>() == "none") return std::nullopt;
  Section s(raw, parent.name("modulation"));
  acoustic::ModulationConfig m;
  std::string waveform = "rectangular";
  s.read("waveform", waveform);
  if (waveform != "rectangular") {
    throw ConfigError(fmt::format("{}: only rectangular is supported", s.name("waveform")));
  }
  s.read("frequency_hz", m.frequency_hz);
  s.read("duty", m.duty);
  s.finish();
  return m;
}

void read_perceiver(Section s, psychophysics::PerceiverModel& p) {
  s.read("detection_threshold_n", p.detection_threshold);
  s.read("valley_fraction", p.valley_fraction);
  s.read("peak_floor", p.peak_floor);
  s.read("response_noise", p.response_noise);
  s.read("force_noise_n", p.force_noise);
  s.read("masking", p.masking);
  s.read("seed", p.seed);
  s.finish();
}

void read_stimulus(Section s, psychophysics::StimulusModelParams& p) {
  s.read("focal_depth_m", p.focal_depth);
  s.read("vortex_sigma_m", p.vortex_sigma);
  s.read("line_margin_m", p.line_margin);
  s.read("line_step_m", p.line_step);
  s.read("max_separation_m", p.max_separation);
  s.finish();
}

/// Runs `check`, prefixing any domain error with the section it concerns.
template <typename F>
void check_section(const char* section, F&& check) {
  try {
    check();
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("{}: {}", section, e.what()));
  }
}

std::string num(double v) { return fmt::format("{}", v); }

void emit_point(YAML::Emitter& out, Point3 p) {
  out << YAML::Flow << YAML::BeginSeq << num(p.x) << num(p.y) << num(p.z) << YAML::EndSeq;
}

}  // namespace

acoustic::TransducerArray EngineConfig::array() const {
  acoustic::TransducerArray::Params p;
  p.rows = rows;
  p.cols = cols;
  p.pitch = pitch;
  p.origin = {array_center.x - 0.5 * static_cast<double>(cols - 1) * pitch,
              array_center.y - 0.5 * static_cast<double>(rows - 1) * pitch, array_center.z};
  p.reference_row = reference_row;
  p.reference_col = reference_col;
  p.carrier_hz = carrier_hz;
  p.speed_of_sound = speed_of_sound;
  return acoustic::TransducerArray(p);
}

vortex::VortexShot EngineConfig::shot(double launch_time) const {
  const double l_s = vortex::slug_length(cannon.slug_volume, cannon.aperture);
  const auto speed = vortex::vortex_speed(l_s, cannon.t_cone);
  return vortex::VortexShot::from_slug_speed(launch_time, cannon_origin, cannon_direction,
                                             speed.slug);
}

psychophysics::StimulusModelParams EngineConfig::stimulus_model() const {
  auto s = stimulus;
  s.array_rows = rows;
  s.array_cols = cols;
  s.pitch = pitch;
  s.carrier_hz = carrier_hz;
  s.speed_of_sound = speed_of_sound;
  return s;
}

void EngineConfig::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("array: rows and cols must be >= 1");
  check_section("array", [&] { (void)array(); });
  check_section("cannon", [&] {
    cannon.validate();
    if (!(observed_vortex_speed > 0.0)) throw DomainError("observed vortex speed must be > 0");
    (void)shot();
  });
  check_section("modulation", [&] {
    if (modulation) modulation->validate();
  });
  check_section("compensation", [&] { compensation.validate(); });
  check_section("calibration", [&] {
    if (cannon_curve) cannon_curve->validate();
    if (ultrasound_curve) ultrasound_curve->validate();
  });
  check_section("perceiver", [&] { perceiver.validate(); });
  check_section("stimulus", [&] { stimulus_model().validate(); });
}

EngineConfig default_config() {
  EngineConfig c;
  c.cannon.t_cone = calibration::implied_t_cone(c.cannon, c.observed_vortex_speed).t_cone;
  return c;
}

EngineConfig parse_config(const std::string& yaml_text) {
  Section root(parse_yaml(yaml_text, "config"), "");
  EngineConfig c = default_config();

  {
    Section s = root.child("array");
    s.read("rows", c.rows);
    s.read("cols", c.cols);
    s.read("pitch_m", c.pitch);
    s.read_point("center_m", c.array_center);
    if (s.has("reference")) {
      std::vector<std::size_t> ref;
      s.read("reference", ref);
      if (ref.size() != 2) throw ConfigError("array.reference: expected [row, col]");
      c.reference_row = ref[0];
      c.reference_col = ref[1];
    }
    s.read("carrier_hz", c.carrier_hz);
    s.read("speed_of_sound_mps", c.speed_of_sound);
    s.finish();
  }
  {
    Section s = root.child("cannon");
    s.read("slug_volume_m3", c.cannon.slug_volume);
    s.read("aperture_m", c.cannon.aperture);
    s.read("observed_vortex_speed_mps", c.observed_vortex_speed);
    if (s.has("t_cone_s")) {
      s.read("t_cone_s", c.cannon.t_cone);
    } else if (c.cannon.slug_volume > 0.0 && c.cannon.aperture > 0.0 &&
               c.observed_vortex_speed > 0.0) {
      c.cannon.t_cone = calibration::implied_t_cone(c.cannon, c.observed_vortex_speed).t_cone;
    }
    s.read("actuation_hz", c.cannon.actuation_hz);
    s.read("mechanical_latency_s", c.cannon.mechanical_latency);
    s.read_point("origin_m", c.cannon_origin);
    s.read_point("direction", c.cannon_direction);
    s.finish();
  }
  if (root.has("modulation")) c.modulation = read_modulation(root);
  {
    Section s = root.child("compensation");
    std::string mode = c.compensation.mode == scheduler::CompensationPolicy::Mode::kFixed
                           ? "fixed"
                           : "computed";
    s.read("mode", mode);
    if (mode == "fixed") {
      c.compensation.mode = scheduler::CompensationPolicy::Mode::kFixed;
    } else if (mode == "computed") {
      c.compensation.mode = scheduler::CompensationPolicy::Mode::kComputed;
    } else {
      throw ConfigError("compensation.mode: expected 'fixed' or 'computed'");
    }
    s.read("fixed_offset_s", c.compensation.fixed_offset);
    s.finish();
    // The cannon owns its trigger-to-launch latency.
    c.compensation.mechanical_latency = c.cannon.mechanical_latency;
  }
  {
    Section s = root.child("calibration");
    if (Section cs = s.child("cannon")) {
      calibration::CalibrationCurve curve;
      curve.kind = calibration::CurveKind::kCannonLinear;
      cs.read("slope_n_per_v", curve.slope);
      cs.read("intercept_n", curve.intercept);
      cs.read("setting_min", curve.setting_min);
      cs.read("setting_max", curve.setting_max);
      cs.read("residual_n", curve.residual);
      cs.finish();
      c.cannon_curve = curve;
    }
    if (Section us = s.child("ultrasound")) {
      calibration::CalibrationCurve curve;
      curve.kind = calibration::CurveKind::kUltrasoundSin2;
      us.read("f_max_n", curve.f_max);
      us.read("setting_min", curve.setting_min);
      us.read("setting_max", curve.setting_max);
      us.read("residual_n", curve.residual);
      us.finish();
      c.ultrasound_curve = curve;
    }
    s.finish();
  }
  read_perceiver(root.child("perceiver"), c.perceiver);
  read_stimulus(root.child("stimulus"), c.stimulus);
  root.finish();

  c.validate();
  return c;
}

EngineConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string dump_config(const EngineConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  out << YAML::Key << "array" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "rows" << YAML::Value << c.rows;
  out << YAML::Key << "cols" << YAML::Value << c.cols;
  out << YAML::Key << "pitch_m" << YAML::Value << num(c.pitch);
  out << YAML::Key << "center_m" << YAML::Value;
  emit_point(out, c.array_center);
  out << YAML::Key << "reference" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << c.reference_row << c.reference_col << YAML::EndSeq;
  out << YAML::Key << "carrier_hz" << YAML::Value << num(c.carrier_hz);
  out << YAML::Key << "speed_of_sound_mps" << YAML::Value << num(c.speed_of_sound);
  out << YAML::EndMap;

  out << YAML::Key << "cannon" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "slug_volume_m3" << YAML::Value << num(c.cannon.slug_volume);
  out << YAML::Key << "aperture_m" << YAML::Value << num(c.cannon.aperture);
  out << YAML::Key << "t_cone_s" << YAML::Value << num(c.cannon.t_cone);
  out << YAML::Key << "observed_vortex_speed_mps" << YAML::Value << num(c.observed_vortex_speed);
  out << YAML::Key << "actuation_hz" << YAML::Value << num(c.cannon.actuation_hz);
  out << YAML::Key << "mechanical_latency_s" << YAML::Value << num(c.cannon.mechanical_latency);
  out << YAML::Key << "origin_m" << YAML::Value;
  emit_point(out, c.cannon_origin);
  out << YAML::Key << "direction" << YAML::Value;
  emit_point(out, c.cannon_direction);
  out << YAML::EndMap;

  out << YAML::Key << "modulation" << YAML::Value;
  if (c.modulation) {
    out << YAML::BeginMap;
    out << YAML::Key << "waveform" << YAML::Value << "rectangular";
    out << YAML::Key << "frequency_hz" << YAML::Value << num(c.modulation->frequency_hz);
    out << YAML::Key << "duty" << YAML::Value << num(c.modulation->duty);
    out << YAML::EndMap;
  } else {
    out << "none";
  }

  out << YAML::Key << "compensation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value
      << (c.compensation.mode == scheduler::CompensationPolicy::Mode::kFixed ? "fixed"
                                                                             : "computed");
  out << YAML::Key << "fixed_offset_s" << YAML::Value << num(c.compensation.fixed_offset);
  out << YAML::EndMap;

  if (c.cannon_curve || c.ultrasound_curve) {
    out << YAML::Key << "calibration" << YAML::Value << YAML::BeginMap;
    if (c.cannon_curve) {
      const auto& k = *c.cannon_curve;
      out << YAML::Key << "cannon" << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "slope_n_per_v" << YAML::Value << num(k.slope);
      out << YAML::Key << "intercept_n" << YAML::Value << num(k.intercept);
      out << YAML::Key << "setting_min" << YAML::Value << num(k.setting_min);
      out << YAML::Key << "setting_max" << YAML::Value << num(k.setting_max);
      out << YAML::Key << "residual_n" << YAML::Value << num(k.residual);
      out << YAML::EndMap;
    }
    if (c.ultrasound_curve) {
      const auto& u = *c.ultrasound_curve;
      out << YAML::Key << "ultrasound" << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "f_max_n" << YAML::Value << num(u.f_max);
      out << YAML::Key << "setting_min" << YAML::Value << num(u.setting_min);
      out << YAML::Key << "setting_max" << YAML::Value << num(u.setting_max);
      out << YAML::Key << "residual_n" << YAML::Value << num(u.residual);
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }

  const auto& p = c.perceiver;
  out << YAML::Key << "perceiver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "detection_threshold_n" << YAML::Value << num(p.detection_threshold);
  out << YAML::Key << "valley_fraction" << YAML::Value << num(p.valley_fraction);
  out << YAML::Key << "peak_floor" << YAML::Value << num(p.peak_floor);
  out << YAML::Key << "response_noise" << YAML::Value << num(p.response_noise);
  out << YAML::Key << "force_noise_n" << YAML::Value << num(p.force_noise);
  out << YAML::Key << "masking" << YAML::Value << num(p.masking);
  out << YAML::Key << "seed" << YAML::Value << p.seed;
  out << YAML::EndMap;

  const auto& s = c.stimulus;
  out << YAML::Key << "stimulus" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "focal_depth_m" << YAML::Value << num(s.focal_depth);
  out << YAML::Key << "vortex_sigma_m" << YAML::Value << num(s.vortex_sigma);
  out << YAML::Key << "line_margin_m" << YAML::Value << num(s.line_margin);
  out << YAML::Key << "line_step_m" << YAML::Value << num(s.line_step);
  out << YAML::Key << "max_separation_m" << YAML::Value << num(s.max_separation);
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void save_config(const std::filesystem::path& path, const EngineConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  out << dump_config(config);
}

Scene parse_scene(const std::string& yaml_text) {
  Section root(parse_yaml(yaml_text, "scene"), "");
  Scene scene;
  const YAML::Node points = root.raw("focal_points");
  if (!points || !points.IsSequence() || points.size() == 0) {
    throw ConfigError("focal_points: expected a non-empty list");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    Section fp(points[i], fmt::format("focal_points[{}]", i));
    acoustic::FocalPoint f;
    for (const char* k : {"x", "y", "z", "p", "t"}) {
      if (!fp.has(k)) throw ConfigError(fmt::format("{}: missing", fp.name(k)));
    }
    fp.read("x", f.position.x);
    fp.read("y", f.position.y);
    fp.read("z", f.position.z);
    fp.read("p", f.intensity);
    fp.read("t", f.duration);
    fp.finish();
    try {
      f.validate();
    } catch (const DomainError& e) {
      throw ConfigError(fmt::format("focal_points[{}]: {}", i, e.what()));
    }
    scene.image.points.push_back(f);
  }
  if (root.has("modulation")) {
    scene.modulation = read_modulation(root);
    if (*scene.modulation) {
      try {
        (*scene.modulation)->validate();
      } catch (const DomainError& e) {
        throw ConfigError(fmt::format("modulation: {}", e.what()));
      }
    }
  }
  if (root.has("vortex_target")) {
    Point3 t;
    root.read_point("vortex_target", t);
    scene.vortex_target = t;
  }
  root.read("start_time_s", scene.start_time);
  if (!(scene.start_time >= 0.0)) throw ConfigError("start_time_s: must be >= 0");
  root.finish();
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  try {
    return parse_scene(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void apply_perceiver_text(const std::string& yaml_text, EngineConfig& base) {
  Section root(parse_yaml(yaml_text, "perceiver file"), "");
  read_perceiver(root.child("perceiver"), base.perceiver);
  read_stimulus(root.child("stimulus"), base.stimulus);
  root.finish();
  check_section("perceiver", [&] { base.perceiver.validate(); });
  check_section("stimulus", [&] { base.stimulus_model().validate(); });
}

void apply_perceiver_file(const std::filesystem::path& path, EngineConfig& base) {
  try {
    apply_perceiver_text(read_file(path), base);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace sonovortex::config
