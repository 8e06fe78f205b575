#include "lmstim/lm_trajectory.hpp"

#include <cmath>
#include <string>

namespace lmstim {

namespace {

void check_basis(const Vec3& a, const Vec3& b, const Vec3& c) {
  if (!is_unit(a) || !is_unit(b) || !is_unit(c)) {
    throw ConfigError("trajectory basis vectors must be unit length");
  }
  if (std::abs(a.dot(b)) > 1e-9 || std::abs(a.dot(c)) > 1e-9 || std::abs(b.dot(c)) > 1e-9) {
    throw ConfigError("trajectory basis vectors must be mutually orthogonal");
  }
}

Trajectory build_orbit(const Vec3& center, const Vec3& a, const Vec3& b, const Vec3& c,
                       const LmConfig& config) {
  const auto n = static_cast<std::size_t>(config.samples_per_cycle);
  Trajectory out;
  out.positions.reserve(n);
  out.theta.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    const double z = config.z_profile.empty() ? 0.0 : config.z_profile[j];
    out.positions.push_back(center + config.radius * (std::cos(theta) * a + std::sin(theta) * b) +
                            z * c);
    out.theta.push_back(theta);
  }
  out.dwell = dwell_time(config.samples_per_cycle, config.lm_frequency).dwell;
  return out;
}

}  // namespace

void LmConfig::validate() const {
  if (!center.allFinite()) {
    throw ConfigError("trajectory centre must be finite");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("trajectory radius must be positive");
  }
  if (samples_per_cycle < 3) {
    throw ConfigError("samples per cycle must be at least 3");
  }
  if (!(lm_frequency > 0.0) || !std::isfinite(lm_frequency)) {
    throw ConfigError("LM frequency must be positive");
  }
  check_basis(basis_a, basis_b, basis_c);
  if (!z_profile.empty() && z_profile.size() != static_cast<std::size_t>(samples_per_cycle)) {
    throw ConfigError("z profile length must equal samples per cycle");
  }
  for (double z : z_profile) {
    if (!std::isfinite(z)) throw ConfigError("z profile entries must be finite");
  }
  if (mode == LmMode::multi) {
    if (foci_count < 1) {
      throw ConfigError("foci count must be positive");
    }
    if (!(foci_spacing > 0.0)) {
      throw ConfigError("foci spacing must be positive");
    }
    const std::size_t l = foci_stride(foci_spacing, step_width(radius, samples_per_cycle));
    if (l == 0) {
      throw ConfigError("foci spacing below step width");
    }
    if (static_cast<std::size_t>(foci_count) * l >= static_cast<std::size_t>(samples_per_cycle)) {
      throw ConfigError("foci do not fit on one cycle (foci_count * stride >= samples)");
    }
  }
}

double step_width(double radius, int samples) {
  if (!(radius > 0.0)) {
    throw ConfigError("radius must be positive");
  }
  if (samples < 3) {
    throw ConfigError("samples per cycle must be at least 3");
  }
  return kTwoPi * radius / samples;
}

int samples_for_target_step(double radius, double target_step) {
  if (!(radius > 0.0) || !(target_step > 0.0)) {
    throw ConfigError("radius and target step must be positive");
  }
  const double exact = kTwoPi * radius / target_step;
  if (!(exact < 1e9)) {
    throw ConfigError("target step too small");
  }
  int n = std::max(3, static_cast<int>(std::ceil(exact)));
  // Settle rounding at the boundary against the forward formula.
  while (n > 3 && step_width(radius, n - 1) <= target_step) --n;
  while (step_width(radius, n) > target_step) ++n;
  return n;
}

DwellTiming dwell_time(int samples, double lm_frequency) {
  if (samples <= 0 || !(lm_frequency > 0.0)) {
    throw ConfigError("samples and LM frequency must be positive");
  }
  const double rate = samples * lm_frequency;
  return DwellTiming{1.0 / rate, rate, rate > kUpdateRateLimit};
}

std::size_t foci_stride(double spacing, double step) {
  if (!(spacing > 0.0) || !(step > 0.0)) {
    throw ConfigError("spacing and step must be positive");
  }
  return static_cast<std::size_t>(std::floor(spacing / step * (1.0 + 1e-12)));
}

FociSchedule make_schedule(std::size_t samples, std::size_t stride, std::size_t foci) {
  if (samples == 0 || foci == 0) {
    throw ConfigError("schedule needs samples and foci");
  }
  if (foci > 1 && stride == 0) {
    throw ConfigError("foci spacing below step width");
  }
  FociSchedule s{samples, stride, {}};
  s.steps.reserve(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    std::vector<std::size_t> idx;
    idx.reserve(foci);
    for (std::size_t i = 0; i < foci; ++i) {
      idx.push_back((j + i * stride) % samples);
    }
    s.steps.push_back(std::move(idx));
  }
  return s;
}

Trajectory lm_s_trajectory(const LmConfig& config) {
  config.validate();
  return build_orbit(config.center, config.basis_a, config.basis_b, config.basis_c, config);
}

FociSchedule lm_m_schedule(const LmConfig& config) {
  if (config.mode != LmMode::multi) {
    throw ConfigError("foci schedule requires multi-foci mode");
  }
  config.validate();
  const std::size_t l =
      foci_stride(config.foci_spacing, step_width(config.radius, config.samples_per_cycle));
  return make_schedule(static_cast<std::size_t>(config.samples_per_cycle), l,
                       static_cast<std::size_t>(config.foci_count));
}

Vec3 mirror_point(const Vec3& p, const ReflectionPlane& plane) {
  if (!is_unit(plane.normal)) {
    throw ConfigError("reflection plane normal must be unit length");
  }
  return p + 2.0 * ((plane.point - p).dot(plane.normal)) * plane.normal;
}

Trajectory reflected_trajectory(const LmConfig& config, const ReflectionPlane& plane,
                                double tilt_deg) {
  config.validate();
  if (!(std::abs(tilt_deg) <= 90.0)) {
    throw ConfigError("reflection tilt must lie within [-90, 90] degrees");
  }
  const Vec3 center = mirror_point(config.center, plane);
  const Mat3 rot = axis_angle_rotation(config.basis_a, tilt_deg);
  const Vec3 b = rot * config.basis_b;
  const Vec3 c = rot * config.basis_c;
  check_basis(config.basis_a, b, c);
  return build_orbit(center, config.basis_a, b, c, config);
}

std::vector<Vec3> foci_at_step(const Trajectory& trajectory, const FociSchedule* schedule,
                               std::size_t step) {
  const std::size_t n = trajectory.positions.size();
  if (schedule == nullptr) {
    return {trajectory.positions[step % n]};
  }
  if (schedule->samples != n) {
    throw ConfigError("schedule and trajectory disagree on sample count");
  }
  std::vector<Vec3> out;
  for (std::size_t idx : schedule->steps[step % n]) {
    out.push_back(trajectory.positions[idx]);
  }
  return out;
}

std::vector<DriveFrame> trajectory_to_drive_stream(const Trajectory& trajectory,
                                                   const FociSchedule* schedule,
                                                   const TransducerArray& array,
                                                   Combiner combiner) {
  if (trajectory.positions.empty()) {
    throw ConfigError("trajectory is empty");
  }
  std::vector<DriveFrame> frames;
  frames.reserve(trajectory.positions.size());
  for (std::size_t j = 0; j < trajectory.positions.size(); ++j) {
    std::vector<FocusSpec> foci;
    for (const Vec3& p : foci_at_step(trajectory, schedule, j)) {
      foci.push_back(FocusSpec{p});
    }
    frames.push_back(drive_for_foci(array, foci, combiner, trajectory.dwell));
  }
  return frames;
}

}  // namespace lmstim
