#pragma once

#include "lmstim/geometry.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace lmstim {

struct Transducer {
  Vec3 position;
  Vec3 normal;  // emission axis, unit length
};

/// Placement of one array unit: world = origin + rotation * local.
struct UnitPose {
  Vec3 origin = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();

  static UnitPose from_axis_angle(const Vec3& origin, const Vec3& axis, double angle_deg);

  /// Throws ConfigError unless the rotation is proper orthonormal to 1e-9.
  void validate() const;
};

/// Rectangular emitter grid of one unit, centred on the unit origin in its local
/// xy-plane with emitters facing local +z. `holes` are (row, col) pairs, 0-based.
struct GridLayout {
  int rows = 14;
  int cols = 18;
  double pitch = 10.16;
  std::vector<std::pair<int, int>> holes{{1, 1}, {1, 2}, {1, 16}};

  std::size_t emitter_count() const;
  std::vector<Vec3> local_positions() const;
  void validate() const;
};

/// Piecewise-linear directivity, (angle from normal in degrees, gain) samples
/// sorted by angle. Overrides the piston model when present.
using DirectivityTable = std::vector<std::pair<double, double>>;

struct ArrayLayoutConfig {
  std::vector<UnitPose> units;
  GridLayout grid;
  double frequency = 40'000.0;       // Hz
  double sound_speed = 340'000.0;    // mm/s
  double aperture_radius = 4.5;      // mm, piston radius for directivity
  std::optional<DirectivityTable> directivity_table;

  /// Four units in a 2x2 block around the z-axis, each tilted 20 deg toward
  /// the axis, emitting toward +z.
  static ArrayLayoutConfig paper_default();
};

/// Wavenumber derived from the array's frequency and sound speed.
struct MediumModel {
  double wavenumber = 0.0;  // rad/mm

  static MediumModel from(double frequency, double sound_speed);
};

/// Immutable array geometry plus medium constants.
class TransducerArray {
public:
  TransducerArray(std::vector<Transducer> transducers, std::size_t unit_count,
                  std::size_t per_unit_count, double frequency, double sound_speed,
                  double aperture_radius, std::optional<DirectivityTable> table = std::nullopt);

  const std::vector<Transducer>& transducers() const { return transducers_; }
  std::size_t size() const { return transducers_.size(); }
  std::size_t unit_count() const { return unit_count_; }
  std::size_t per_unit_count() const { return per_unit_count_; }
  double frequency() const { return frequency_; }
  double sound_speed() const { return sound_speed_; }
  double aperture_radius() const { return aperture_radius_; }
  double wavenumber() const { return medium_.wavenumber; }
  const MediumModel& medium() const { return medium_; }
  const std::optional<DirectivityTable>& directivity_table() const { return table_; }

  /// Gain for a direction whose sine to the emitter axis is `sin_angle`, read
  /// from a precomputed table over [0, 1]. Directions behind the emitter are
  /// handled by the caller.
  double gain_from_sine(double sin_angle) const;

private:
  std::vector<Transducer> transducers_;
  std::size_t unit_count_;
  std::size_t per_unit_count_;
  double frequency_;
  double sound_speed_;
  double aperture_radius_;
  MediumModel medium_;
  std::optional<DirectivityTable> table_;
  std::vector<double> sine_table_;
};

TransducerArray build_array(const ArrayLayoutConfig& config);

double wavelength(const TransducerArray& array);

/// Far-field gain in [0, 1] for `angle_from_normal` in [0, pi/2]:
/// |2 J1(ka sin t) / (ka sin t)| or the tabulated override.
double directivity(double angle_from_normal, const TransducerArray& array);

}  // namespace lmstim
