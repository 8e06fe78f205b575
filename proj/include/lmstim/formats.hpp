#pragma once

#include "lmstim/contact_pipeline.hpp"
#include "lmstim/field_sim.hpp"
#include "lmstim/lm_trajectory.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lmstim {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_exact(double v);

/// `v` with 9 significant digits.
std::string format_sig9(double v);

// Trajectory table: "# j x_mm y_mm z_mm theta_rad dwell_s" then one row per
// sample, j 1-based, 9 significant digits.
void write_trajectory_table(std::ostream& out, const Trajectory& trajectory);

// Foci schedule: per time step, the 1-based trajectory index of every focus.
void write_schedule(std::ostream& out, const FociSchedule& schedule);

// Drive stream: one line per frame, "frame duration amplitude phase...".
void write_drive_stream(std::ostream& out, std::span<const DriveFrame> frames);

/// FieldGrid text format: '#'-prefixed header (quantity, origin, axes,
/// spacing, nu, nv, normalization, DFT convention) followed by nu lines of nv
/// comma-separated values. Values round-trip bit-exactly.
void write_field_csv(std::ostream& out, const FieldGrid& grid);
FieldGrid read_field_csv(std::istream& in);

/// Binary 8-bit portable graymap, u along columns and v rows (v up).
void write_pgm(std::ostream& out, const FieldGrid& grid);

void write_peaks(std::ostream& out, const std::vector<LocalMaximum>& peaks);

/// Binary depth stream: magic "LMDS", u32 version, u32 width, u32 height,
/// f64 fps, f64 scale_x, f64 scale_y, f64 x0, f64 y0, f64 camera_z,
/// u32 frame count, then per frame f64 timestamp and width*height f32 depths.
/// All little-endian.
void write_depth_stream(const std::filesystem::path& path, const std::vector<DepthFrame>& frames,
                        double fps);

struct DepthStream {
  double fps = 0.0;
  std::vector<DepthFrame> frames;
};

/// Reads the binary container or a text manifest (first line "lmds-manifest 1").
DepthStream read_depth_stream(const std::filesystem::path& path);

void write_center_timeline(std::ostream& out, const std::vector<CenterSample>& centers);
void write_drive_log(std::ostream& out, const std::vector<DriveLogEntry>& drives);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace lmstim
