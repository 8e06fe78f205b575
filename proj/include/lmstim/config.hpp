#pragma once

#include "lmstim/contact_pipeline.hpp"
#include "lmstim/field_sim.hpp"
#include "lmstim/lm_trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lmstim {

struct StimulusConfig {
  LmMode mode = LmMode::single;
  Vec3 center = Vec3(0.0, 0.0, 220.0);
  double radius = 3.0;           // mm
  double lm_frequency = 5.0;     // Hz
  std::optional<int> samples;    // N; wins over step_target when both are given
  double step_target = 0.23;     // mm
  int foci_count = 4;
  double foci_spacing = 3.0;     // mm
  Combiner combiner = Combiner::complex;
  bool reflection = false;
  ReflectionPlane plane;
  double tilt_deg = -50.0;

  int resolved_samples() const;
  LmConfig to_lm_config() const;
};

struct GridConfig {
  double extent = 40.0;           // mm
  double spacing = 0.2;           // mm
  std::optional<Vec3> center;     // defaults to the stimulus centre
  Vec3 axis_u = Vec3::UnitX();
  Vec3 axis_v = Vec3::UnitY();

  GridSpec to_spec(const Vec3& default_center) const;
};

struct ProbeConfig {
  double radius = 7.5;            // mm
  double tilt_deg = 40.0;         // disk normal tilted from +z about tilt_axis
  Vec3 tilt_axis = Vec3::UnitX();
  std::size_t samples = 1000;

  DiskProbe at(const Vec3& center) const;
};

struct ContactConfig {
  DetectionBox box;
  double fps = 90.0;
  double duration = 2.0;          // s
  std::size_t smoothing_window = 10;
  double smoothing_sigma = 2.0;
  double dropout_periods = 3.0;
  std::string stream_path;        // depth stream for the contact command
};

/// One run: array layout, stimulus, sampling grid, force probe and contact loop.
struct RunConfig {
  ArrayLayoutConfig array = ArrayLayoutConfig::paper_default();
  std::string array_path;  // empty when the layout is inline or the default
  StimulusConfig stimulus;
  GridConfig grid;
  ProbeConfig probe;
  ContactConfig contact;
  std::string output_dir = "out";
  unsigned workers = 0;
  std::uint64_t seed = 1;
};

/// Parses a JSON run configuration. `overrides` are "dotted.key=value" strings
/// applied on top of the file; values parse as JSON and fall back to strings.
/// Relative paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir,
                           std::span<const std::string> overrides = {});

RunConfig load_run_config(const std::filesystem::path& path,
                          std::span<const std::string> overrides = {});

/// Default configuration with overrides only (no file).
RunConfig default_run_config(std::span<const std::string> overrides = {});

ArrayLayoutConfig parse_array_layout(std::string_view json_text);
ArrayLayoutConfig load_array_layout(const std::filesystem::path& path);

/// JSON text of an array layout; parse_array_layout reads it back.
std::string array_layout_to_json(const ArrayLayoutConfig& layout);

const char* to_string(LmMode mode);

}  // namespace lmstim
