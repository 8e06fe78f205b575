#pragma once

#include "lmstim/focus_phase.hpp"

#include <cstddef>
#include <vector>

namespace lmstim {

/// Drive update ceiling of the array hardware.
inline constexpr double kUpdateRateLimit = 1000.0;  // Hz

enum class LmMode { single, multi };

/// Circular lateral-modulation stimulus. Indices in `z_profile` follow the
/// trajectory samples; an empty profile means a flat (z = 0) orbit.
struct LmConfig {
  Vec3 center = Vec3::Zero();
  double radius = 3.0;  // mm
  Vec3 basis_a = Vec3::UnitX();
  Vec3 basis_b = Vec3::UnitY();
  Vec3 basis_c = Vec3::UnitZ();
  double lm_frequency = 5.0;  // Hz
  int samples_per_cycle = 82;
  std::vector<double> z_profile;
  LmMode mode = LmMode::single;
  int foci_count = 1;
  double foci_spacing = 0.0;  // mm, multi-foci only

  void validate() const;
};

struct Trajectory {
  std::vector<Vec3> positions;  // sample j is positions[j - 1]
  std::vector<double> theta;    // rad
  double dwell = 0.0;           // s
};

struct ReflectionPlane {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
};

/// Per time step, the (0-based) trajectory sample driven by each focus.
struct FociSchedule {
  std::size_t samples = 0;
  std::size_t stride = 0;
  std::vector<std::vector<std::size_t>> steps;
};

struct DwellTiming {
  double dwell = 0.0;        // s
  double update_rate = 0.0;  // Hz
  bool rate_violation = false;
};

/// Arc length between neighbouring samples, 2 pi A / N.
double step_width(double radius, int samples);

/// Smallest N >= 3 with 2 pi A / N <= target.
int samples_for_target_step(double radius, double target_step);

DwellTiming dwell_time(int samples, double lm_frequency);

/// floor(spacing / step) with the quotient guarded against representation error.
std::size_t foci_stride(double spacing, double step);

/// Trajectory samples, 0-based, for `foci` foci spaced `stride` samples apart.
FociSchedule make_schedule(std::size_t samples, std::size_t stride, std::size_t foci);

Trajectory lm_s_trajectory(const LmConfig& config);

FociSchedule lm_m_schedule(const LmConfig& config);

Vec3 mirror_point(const Vec3& p, const ReflectionPlane& plane);

/// The orbit seen after reflection: centred on the mirror image of
/// `config.center`, with basis_b and basis_c rotated by `tilt_deg` about basis_a.
Trajectory reflected_trajectory(const LmConfig& config, const ReflectionPlane& plane,
                                double tilt_deg);

/// One frame per time step. `schedule == nullptr` drives the single focus r_j.
std::vector<DriveFrame> trajectory_to_drive_stream(const Trajectory& trajectory,
                                                   const FociSchedule* schedule,
                                                   const TransducerArray& array,
                                                   Combiner combiner);

/// Focus positions driven during time step `step` (0-based).
std::vector<Vec3> foci_at_step(const Trajectory& trajectory, const FociSchedule* schedule,
                               std::size_t step);

}  // namespace lmstim
