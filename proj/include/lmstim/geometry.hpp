#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>

namespace lmstim {

// All lengths are millimetres; the frame is right-handed with its origin at the
// centre of the display surface.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Raised for malformed inputs and violated preconditions (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation hits a numerical singularity (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline bool is_finite(const Vec3& v) { return v.allFinite(); }

inline bool is_unit(const Vec3& v, double tol = 1e-9) {
  return std::abs(v.norm() - 1.0) <= tol;
}

/// Rotation by `angle_deg` about `axis` (right-hand rule). The axis is normalized.
inline Mat3 axis_angle_rotation(const Vec3& axis, double angle_deg) {
  const double n = axis.norm();
  if (!(n > 0.0) || !axis.allFinite()) {
    throw ConfigError("rotation axis must be a finite non-zero vector");
  }
  return Eigen::AngleAxisd(deg_to_rad(angle_deg), axis / n).toRotationMatrix();
}

/// Any unit vector orthogonal to `n`; deterministic for a given input.
inline Vec3 any_orthogonal(const Vec3& n) {
  const Vec3 ref = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return n.cross(ref).normalized();
}

}  // namespace lmstim
