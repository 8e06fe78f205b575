#pragma once

#include "lmstim/config.hpp"
#include "lmstim/field_sim.hpp"

#include <optional>
#include <vector>

namespace lmstim {

/// A validated stimulus ready to drive: the orbit actually focused (mirrored
/// when reflection is on) and its multi-foci schedule.
struct PreparedStimulus {
  LmConfig lm;
  Trajectory trajectory;
  std::optional<FociSchedule> schedule;
  Vec3 driven_center;  // orbit centre in array coordinates
  DwellTiming timing;

  const FociSchedule* schedule_ptr() const { return schedule ? &*schedule : nullptr; }
};

/// Validates the stimulus section and builds its trajectory.
PreparedStimulus prepare_stimulus(const StimulusConfig& stimulus);

Vec3 centroid(const std::vector<Vec3>& points);

/// Bilinear sample of `grid` at the in-plane projection of `p`; throws
/// ConfigError when the projection falls outside the lattice.
double sample_bilinear(const FieldGrid& grid, const Vec3& p);

/// Mean of the map over a circle of `radius` about `center` in the grid plane.
double circle_mean(const FieldGrid& grid, const Vec3& center, double radius,
                   std::size_t samples = 360);
double circle_max(const FieldGrid& grid, const Vec3& center, double radius,
                  std::size_t samples = 360);

/// Value-weighted mean squared in-plane distance from `center`.
double second_moment(const FieldGrid& grid, const Vec3& center);

/// Root-mean-square difference of the two maps after each is divided by its maximum.
double normalized_l2_distance(const FieldGrid& a, const FieldGrid& b);

struct PeakMatch {
  std::size_t peak_count = 0;
  std::vector<double> distances;  // per target, to the nearest unclaimed peak
  bool all_within = false;
};

/// Greedy one-to-one pairing of targets with peaks (closest pair first).
PeakMatch match_peaks(const std::vector<LocalMaximum>& peaks, const std::vector<Vec3>& targets,
                      double tolerance);

}  // namespace lmstim
