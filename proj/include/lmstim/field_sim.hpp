#pragma once

#include "lmstim/focus_phase.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lmstim {

/// Carrier-field phasor in arbitrary (array-consistent) units.
using ComplexPressure = std::complex<double>;

/// Planar sampling lattice; sample (i, j) sits at origin + i*spacing*u + j*spacing*v.
struct GridSpec {
  Vec3 origin = Vec3::Zero();
  Vec3 axis_u = Vec3::UnitX();
  Vec3 axis_v = Vec3::UnitY();
  double spacing = 0.2;
  std::size_t nu = 0;
  std::size_t nv = 0;

  /// Square lattice of side `extent` centred on `center`.
  static GridSpec centered(const Vec3& center, double extent, double spacing,
                           const Vec3& axis_u = Vec3::UnitX(),
                           const Vec3& axis_v = Vec3::UnitY());

  Vec3 point(std::size_t i, std::size_t j) const {
    return origin + (static_cast<double>(i) * spacing) * axis_u +
           (static_cast<double>(j) * spacing) * axis_v;
  }
  std::size_t size() const { return nu * nv; }
  void validate() const;
};

/// Scalar field on a GridSpec, values[i * nv + j].
struct FieldGrid {
  GridSpec grid;
  std::vector<double> values;
  std::string quantity = "radiation_pressure";
  std::string normalization = "none";  // "none" or "max"

  double at(std::size_t i, std::size_t j) const { return values[i * grid.nv + j]; }
  double max_value() const;
};

struct DiskProbe {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double radius = 7.5;  // mm
  std::size_t sample_count = 1000;
};

struct DiskSample {
  Vec3 position;
  double weight;  // mm^2; weights sum to the disk area
};

struct FieldOptions {
  unsigned workers = 0;     // 0 = hardware concurrency
  bool normalize = true;    // divide by the map maximum when it is positive
  double r_min = 1.0;       // mm, closest admissible emitter distance
};

struct LocalMaximum {
  std::size_t i = 0;
  std::size_t j = 0;
  Vec3 position;
  double value = 0.0;
};

/// Sum over emitters of amplitude * D(theta) / r * exp(j(k r + phi)).
/// Throws NumericalError when `point` is closer than `r_min` to an emitter.
ComplexPressure complex_pressure(const TransducerArray& array, const DriveFrame& frame,
                                 const Vec3& point, double r_min = 1.0);

/// Same field for an arbitrary per-emitter complex drive (used for linearity checks).
ComplexPressure complex_pressure(const TransducerArray& array,
                                 std::span<const std::complex<double>> drive, const Vec3& point,
                                 double r_min = 1.0);

/// |p|^2 on the grid.
FieldGrid radiation_pressure_map(const TransducerArray& array, const DriveFrame& frame,
                                 const GridSpec& grid, const FieldOptions& options = {});

/// Dwell-weighted mean of |p|^2 over the frames.
FieldGrid time_averaged_map(const TransducerArray& array, std::span<const DriveFrame> frames,
                            const GridSpec& grid, const FieldOptions& options = {});

/// Power |X_k|^2 of the unnormalized forward DFT of each point's |p|^2 series
/// (one sample per frame) at the bin of `target_frequency`.
FieldGrid temporal_spectrum_map(const TransducerArray& array, std::span<const DriveFrame> frames,
                                const GridSpec& grid, double target_frequency,
                                const FieldOptions& options = {});

/// Bin index of `target_frequency` for a one-cycle frame series; throws
/// ConfigError when the frequency is not a resolvable harmonic.
std::size_t spectrum_bin(std::span<const DriveFrame> frames, double target_frequency);

/// |p|^2 at `point` for each frame.
std::vector<double> pressure_time_series(const TransducerArray& array,
                                         std::span<const DriveFrame> frames, const Vec3& point);

/// All bins of |X_k|^2, X_k = sum_t s_t exp(-2 pi i k t / N).
std::vector<double> dft_power(std::span<const double> series);

/// Concentric-ring quadrature of the probe disk.
std::vector<DiskSample> disk_samples(const DiskProbe& probe);

/// Area integral of |p|^2 over the disk; only ratios are meaningful.
double integrated_force(const TransducerArray& array, const DriveFrame& frame,
                        const DiskProbe& probe);

/// Strict interior 8-neighbour maxima whose value is at least
/// `min_prominence` times the grid maximum, sorted by value descending.
std::vector<LocalMaximum> find_local_maxima(const FieldGrid& grid, double min_prominence);

}  // namespace lmstim
