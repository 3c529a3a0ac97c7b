#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <span>
#include <vector>

#include "creve/errors.hpp"

// Frame conventions used throughout:
//   navigation {n}: local tangent frame, north-east-down (NED); the gravity
//                   vector is (0, 0, +g)
//   body       {b}: IMU frame, forward-right-down (FRD)
//   radar      {r}: forward-left-up (FLU), origin at the radar antenna
namespace creve {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// A timestamped 3-vector (velocity truth, error series, ...).
struct TimedVec3 {
  double timestamp = 0.0;
  Vec3 value = Vec3::Zero();
};

// Skew-symmetric cross-product matrix: skew(v) * w == v x w.
Mat3 skew(const Vec3& v);

// Orientation element of SO(3). Unit quaternion storage, renormalized on
// construction; the direction cosine matrix is derived on demand.
class Rotation {
 public:
  Rotation() : q_(Eigen::Quaterniond::Identity()) {}

  // From quaternion components; throws InvalidInputError on non-finite or
  // near-zero input.
  Rotation(double w, double x, double y, double z);

  static Rotation from_quaternion(const Eigen::Quaterniond& q);
  static Rotation from_matrix(const Mat3& dcm);
  // ZYX Euler construction: yaw about z, then pitch about y, then roll
  // about x (body-to-parent).
  static Rotation from_rpy(double roll, double pitch, double yaw);
  static Rotation from_yaw(double yaw) { return from_rpy(0.0, 0.0, yaw); }

  Mat3 matrix() const { return q_.toRotationMatrix(); }
  Rotation inverse() const { return Rotation(q_.conjugate(), NoNormalize{}); }

  Rotation operator*(const Rotation& rhs) const {
    return Rotation((q_ * rhs.q_).normalized(), NoNormalize{});
  }
  Vec3 operator*(const Vec3& v) const { return q_ * v; }

  // Spherical linear interpolation from *this (t=0) to other (t=1).
  Rotation slerp(const Rotation& other, double t) const {
    return Rotation(q_.slerp(t, other.q_), NoNormalize{});
  }

  double w() const { return q_.w(); }
  double x() const { return q_.x(); }
  double y() const { return q_.y(); }
  double z() const { return q_.z(); }
  const Eigen::Quaterniond& quaternion() const { return q_; }

  // Rotation angle (rad) between two orientations; used in tests.
  double angle_to(const Rotation& other) const {
    return Eigen::AngleAxisd(q_.conjugate() * other.q_).angle();
  }

 private:
  struct NoNormalize {};
  Rotation(const Eigen::Quaterniond& q, NoNormalize) : q_(q) {}
  Eigen::Quaterniond q_;
};

inline Vec3 rotate(const Rotation& r, const Vec3& v) { return r * v; }

// One radar return: position in the radar frame plus signed radial Doppler
// velocity (negative when closing on a static target).
struct RadarTarget {
  Vec3 position = Vec3::Zero();  // m, radar frame
  double doppler = 0.0;          // m/s
};

struct RadarScan {
  double timestamp = 0.0;  // s
  std::vector<RadarTarget> targets;
};

struct ImuSample {
  double timestamp = 0.0;
  Vec3 specific_force = Vec3::Zero();  // m/s^2, body frame
  Vec3 angular_rate = Vec3::Zero();    // rad/s, body frame
};

struct PoseSample {
  double timestamp = 0.0;
  Vec3 position = Vec3::Zero();  // m, nav frame
  Rotation attitude;             // body-to-nav
};

struct ExtrinsicCalib {
  Rotation rot_radar_to_body;     // C_r^b
  Vec3 lever_arm = Vec3::Zero();  // m, radar origin in the body frame
  double gravity = 9.81;          // m/s^2, must be > 0
};

// Attitude at time t by slerp between the bracketing pose samples; an exact
// timestamp hit returns the stored attitude. Throws OutOfRangeError when t
// lies outside [first, last] and InsufficientDataError on an empty sequence.
Rotation interpolate_attitude(std::span<const PoseSample> poses, double t);

}  // namespace creve
