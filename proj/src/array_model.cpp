#include "lmstim/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace lmstim {

namespace {

constexpr std::size_t kSineTableSize = 4097;
constexpr double kDuplicateTolerance = 1e-6;  // mm

double piston_gain(double ka, double sin_angle) {
  const double x = ka * sin_angle;
  if (x < 1e-8) {
    return 1.0;
  }
  return std::abs(2.0 * std::cyl_bessel_j(1.0, x) / x);
}

double table_gain(const DirectivityTable& table, double angle_deg) {
  if (angle_deg <= table.front().first) {
    return table.front().second;
  }
  if (angle_deg >= table.back().first) {
    return table.back().second;
  }
  const auto hi = std::upper_bound(table.begin(), table.end(), angle_deg,
                                   [](double a, const auto& s) { return a < s.first; });
  const auto lo = hi - 1;
  const double t = (angle_deg - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

void validate_table(const DirectivityTable& table) {
  if (table.size() < 2) {
    throw ConfigError("directivity table needs at least two samples");
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto [angle, gain] = table[i];
    if (!std::isfinite(angle) || !std::isfinite(gain) || gain < 0.0 || gain > 1.0) {
      throw ConfigError("directivity table entries must be finite with gain in [0, 1]");
    }
    if (i > 0 && !(angle > table[i - 1].first)) {
      throw ConfigError("directivity table angles must be strictly increasing");
    }
  }
}

double exact_gain(double angle, double ka, const std::optional<DirectivityTable>& table) {
  if (table) {
    return table_gain(*table, rad_to_deg(angle));
  }
  return piston_gain(ka, std::sin(angle));
}

}  // namespace

UnitPose UnitPose::from_axis_angle(const Vec3& origin, const Vec3& axis, double angle_deg) {
  return UnitPose{origin, axis_angle_rotation(axis, angle_deg)};
}

void UnitPose::validate() const {
  if (!origin.allFinite() || !rotation.allFinite()) {
    throw ConfigError("unit pose must be finite");
  }
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-9 || std::abs(rotation.determinant() - 1.0) > 1e-9) {
    throw ConfigError("unit pose rotation is not a proper orthonormal matrix");
  }
}

std::size_t GridLayout::emitter_count() const {
  const std::set<std::pair<int, int>> unique(holes.begin(), holes.end());
  return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) - unique.size();
}

void GridLayout::validate() const {
  if (rows <= 0 || cols <= 0) {
    throw ConfigError("grid rows and cols must be positive");
  }
  if (!(pitch > 0.0) || !std::isfinite(pitch)) {
    throw ConfigError("grid pitch must be positive");
  }
  for (const auto& [r, c] : holes) {
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw ConfigError("grid hole outside the grid");
    }
  }
  if (emitter_count() == 0) {
    throw ConfigError("grid has no emitters");
  }
}

std::vector<Vec3> GridLayout::local_positions() const {
  const std::set<std::pair<int, int>> skip(holes.begin(), holes.end());
  std::vector<Vec3> out;
  out.reserve(emitter_count());
  const double cx = 0.5 * (cols - 1);
  const double cy = 0.5 * (rows - 1);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (skip.count({r, c}) != 0) {
        continue;
      }
      out.emplace_back((c - cx) * pitch, (r - cy) * pitch, 0.0);
    }
  }
  return out;
}

ArrayLayoutConfig ArrayLayoutConfig::paper_default() {
  ArrayLayoutConfig cfg;
  const double half_w = 0.5 * cfg.grid.cols * cfg.grid.pitch + 2.5;
  const double half_h = 0.5 * cfg.grid.rows * cfg.grid.pitch + 2.5;
  for (const double sy : {-1.0, 1.0}) {
    for (const double sx : {-1.0, 1.0}) {
      // Tilting about (radial x z) swings each unit's normal toward the z-axis.
      const Vec3 origin(sx * half_w, sy * half_h, 0.0);
      const Vec3 axis(sy * half_h, -sx * half_w, 0.0);
      cfg.units.push_back(UnitPose::from_axis_angle(origin, axis, 20.0));
    }
  }
  return cfg;
}

MediumModel MediumModel::from(double frequency, double sound_speed) {
  return MediumModel{kTwoPi * frequency / sound_speed};
}

TransducerArray::TransducerArray(std::vector<Transducer> transducers, std::size_t unit_count,
                                 std::size_t per_unit_count, double frequency,
                                 double sound_speed, double aperture_radius,
                                 std::optional<DirectivityTable> table)
    : transducers_(std::move(transducers)),
      unit_count_(unit_count),
      per_unit_count_(per_unit_count),
      frequency_(frequency),
      sound_speed_(sound_speed),
      aperture_radius_(aperture_radius),
      medium_(MediumModel::from(frequency, sound_speed)),
      table_(std::move(table)) {
  if (!(frequency_ > 0.0) || !(sound_speed_ > 0.0) || !std::isfinite(frequency_) ||
      !std::isfinite(sound_speed_)) {
    throw ConfigError("frequency and sound speed must be positive");
  }
  if (!(aperture_radius_ > 0.0)) {
    throw ConfigError("aperture radius must be positive");
  }
  if (table_) {
    validate_table(*table_);
  }
  for (const auto& t : transducers_) {
    if (!t.position.allFinite() || !is_unit(t.normal)) {
      throw ConfigError("transducer position must be finite and normal unit-length");
    }
  }
  const double ka = medium_.wavenumber * aperture_radius_;
  sine_table_.resize(kSineTableSize);
  for (std::size_t i = 0; i < kSineTableSize; ++i) {
    const double s = static_cast<double>(i) / (kSineTableSize - 1);
    sine_table_[i] = exact_gain(std::asin(s), ka, table_);
  }
}

double TransducerArray::gain_from_sine(double sin_angle) const {
  const double pos = std::clamp(sin_angle, 0.0, 1.0) * (kSineTableSize - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), kSineTableSize - 2);
  const double t = pos - static_cast<double>(i);
  return sine_table_[i] + t * (sine_table_[i + 1] - sine_table_[i]);
}

TransducerArray build_array(const ArrayLayoutConfig& config) {
  if (config.units.empty()) {
    throw ConfigError("array layout needs at least one unit");
  }
  config.grid.validate();
  const std::vector<Vec3> local = config.grid.local_positions();

  std::vector<Transducer> out;
  out.reserve(local.size() * config.units.size());
  for (const UnitPose& pose : config.units) {
    pose.validate();
    const Vec3 normal = (pose.rotation * Vec3::UnitZ()).normalized();
    for (const Vec3& p : local) {
      out.push_back(Transducer{pose.origin + pose.rotation * p, normal});
    }
  }

  // Sort-and-scan on x keeps the duplicate check near-linear for large arrays.
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out[a].position.x() < out[b].position.x();
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Vec3& a = out[order[i]].position;
      const Vec3& b = out[order[j]].position;
      if (b.x() - a.x() > kDuplicateTolerance) {
        break;
      }
      if ((a - b).norm() <= kDuplicateTolerance) {
        std::ostringstream msg;
        msg << "duplicate transducer position at (" << a.x() << ", " << a.y() << ", " << a.z()
            << ")";
        throw ConfigError(msg.str());
      }
    }
  }

  return TransducerArray(std::move(out), config.units.size(), local.size(), config.frequency,
                         config.sound_speed, config.aperture_radius, config.directivity_table);
}

double wavelength(const TransducerArray& array) {
  return array.sound_speed() / array.frequency();
}

double directivity(double angle_from_normal, const TransducerArray& array) {
  if (!(angle_from_normal >= 0.0) || angle_from_normal > kPi / 2.0) {
    throw ConfigError("directivity angle must lie in [0, pi/2]");
  }
  return exact_gain(angle_from_normal, array.wavenumber() * array.aperture_radius(),
                    array.directivity_table());
}

}  // namespace lmstim
