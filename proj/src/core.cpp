#include "creve/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace creve {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  // clang-format off
  m <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

Rotation::Rotation(double w, double x, double y, double z)
    : q_(w, x, y, z) {
  if (!std::isfinite(w) || !std::isfinite(x) || !std::isfinite(y) ||
      !std::isfinite(z)) {
    throw InvalidInputError("rotation: non-finite quaternion component");
  }
  const double n = q_.norm();
  if (n < 1e-12) {
    throw InvalidInputError("rotation: quaternion norm too small");
  }
  q_.coeffs() /= n;
}

Rotation Rotation::from_quaternion(const Eigen::Quaterniond& q) {
  return Rotation(q.w(), q.x(), q.y(), q.z());
}

Rotation Rotation::from_matrix(const Mat3& dcm) {
  if (!dcm.allFinite()) {
    throw InvalidInputError("rotation: non-finite matrix entry");
  }
  return from_quaternion(Eigen::Quaterniond(dcm));
}

Rotation Rotation::from_rpy(double roll, double pitch, double yaw) {
  const Eigen::Quaterniond q =
      Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
      Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
      Eigen::AngleAxisd(roll, Vec3::UnitX());
  return from_quaternion(q);
}

Rotation interpolate_attitude(std::span<const PoseSample> poses, double t) {
  if (poses.empty()) {
    throw InsufficientDataError("interpolate_attitude: empty pose sequence");
  }
  const double t0 = poses.front().timestamp;
  const double t1 = poses.back().timestamp;
  if (t < t0 || t > t1) {
    std::ostringstream msg;
    msg << "interpolate_attitude: t=" << t << " outside covered interval ["
        << t0 << ", " << t1 << "]";
    throw OutOfRangeError(msg.str());
  }
  const auto it = std::lower_bound(
      poses.begin(), poses.end(), t,
      [](const PoseSample& p, double time) { return p.timestamp < time; });
  if (it->timestamp == t) return it->attitude;
  const PoseSample& hi = *it;
  const PoseSample& lo = *(it - 1);
  const double u = (t - lo.timestamp) / (hi.timestamp - lo.timestamp);
  return lo.attitude.slerp(hi.attitude, u);
}

}  // namespace creve
