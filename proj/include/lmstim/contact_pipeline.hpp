#pragma once

#include "lmstim/lm_trajectory.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

namespace lmstim {

/// Orthographic depth camera looking along +z from the plane z = camera_z.
/// Pixel (u, v) images the column x = x0 + (u + 0.5) * scale_x,
/// y = y0 + (v + 0.5) * scale_y; a depth d > 0 places the surface at
/// z = camera_z + d. A depth of 0 means no return.
struct CameraModel {
  double x0 = -15.0;
  double y0 = 15.0;
  double scale_x = 0.25;  // mm per pixel
  double scale_y = 0.25;
  double camera_z = -100.0;

  Vec3 back_project(std::size_t u, std::size_t v, double depth) const {
    return {x0 + (static_cast<double>(u) + 0.5) * scale_x,
            y0 + (static_cast<double>(v) + 0.5) * scale_y, camera_z + depth};
  }
};

struct DepthFrame {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<float> depth;  // row-major, depth[v * width + u], mm
  CameraModel camera;
  double timestamp = 0.0;    // s
};

/// Axis-aligned contact region: the marker surface is the top face and the
/// box extends `extents.z()` behind it.
struct DetectionBox {
  Vec3 center = Vec3(0.0, 30.0, 20.0);
  Vec3 extents = Vec3(10.0, 10.0, 20.0);

  bool contains(const Vec3& p) const {
    const Vec3 d = (p - center).cwiseAbs();
    return d.x() <= 0.5 * extents.x() && d.y() <= 0.5 * extents.y() &&
           d.z() <= 0.5 * extents.z();
  }
};

struct ContactState {
  std::size_t area_pixels = 0;
  Vec3 centroid = Vec3::Zero();
  std::vector<Vec3> z_map;  // back-projected contact pixels
  double timestamp = 0.0;

  /// Surface height of the contact sample nearest to `p` in the xy-plane.
  double surface_z_near(const Vec3& p) const;
};

std::optional<ContactState> detect_contact(const DepthFrame& frame, const DetectionBox& box);

/// Causal Gaussian smoothing over the most recent `window` centroids. Weight of
/// the sample `age` frames old is exp(-age^2 / (2 sigma^2)), renormalized over
/// the history actually available.
class GaussianSmoother {
public:
  explicit GaussianSmoother(std::size_t window = 10, double sigma = 2.0);

  Vec3 push(const Vec3& centroid);
  void reset() { history_.clear(); }
  std::size_t size() const { return history_.size(); }
  const std::vector<double>& weights() const { return weights_; }

private:
  std::size_t window_;
  std::vector<double> weights_;  // by age, normalized over the full window
  std::deque<Vec3> history_;     // newest first
};

struct FingerModel {
  Vec3 tip_start = Vec3(0.0, 30.0, 36.0);  // sphere centre at t = 0
  Vec3 velocity = Vec3::Zero();            // mm/s
  double tip_radius = 7.0;                 // mm
  double noise_sigma = 0.0;                // mm
  std::uint64_t seed = 1;
};

struct DepthStreamSpec {
  double fps = 90.0;
  double duration = 1.0;  // s
  std::size_t width = 120;
  std::size_t height = 120;
  CameraModel camera;
};

/// Frames of a spherical fingertip whose lower cap faces the camera, with
/// seeded Gaussian depth noise on the finger pixels.
std::vector<DepthFrame> synth_depth_stream(const FingerModel& finger, const DepthStreamSpec& spec);

struct CenterSample {
  double timestamp = 0.0;
  bool contact = false;
  Vec3 raw = Vec3::Zero();
  Vec3 smoothed = Vec3::Zero();
  bool dropout = false;
};

struct DriveLogEntry {
  double start_time = 0.0;
  std::size_t step = 0;          // 0-based trajectory step
  bool output_on = false;        // false after contact loss until it resumes
  bool dropout = false;          // centre held through a camera gap
  Vec3 center = Vec3::Zero();
  double center_time = 0.0;      // timestamp of the camera frame that produced `center`
  std::vector<Vec3> foci;
  std::optional<DriveFrame> drive;
};

struct RenderLoopOptions {
  double fps = 90.0;
  std::size_t smoothing_window = 10;
  double smoothing_sigma = 2.0;
  double dropout_periods = 3.0;
  /// When set, every active log entry carries the DriveFrame for its foci.
  const TransducerArray* array = nullptr;
  Combiner combiner = Combiner::complex;
};

struct RenderLog {
  std::vector<CenterSample> centers;
  std::vector<DriveLogEntry> drives;
};

/// Dual-clock simulation: camera frames update the shared LM centre; the drive
/// clock ticks every dwell interval and reads the latest published centre.
RenderLog run_render_loop(const std::vector<DepthFrame>& stream, const DetectionBox& box,
                          const LmConfig& lm_template, double duration,
                          const RenderLoopOptions& options = {});

}  // namespace lmstim
