#include "creve/pipeline.hpp"

#include <cmath>

namespace creve {
namespace {

constexpr double kTwoPi = 2.0 * 3.141592653589793;

Vec3 gravity_nav(double gravity) { return Vec3(0.0, 0.0, gravity); }

}  // namespace

GammaBounds::GammaBounds(const Vec3& lo, const Vec3& hi)
    : gamma_min(lo), gamma_max(hi) {
  if (!(lo.array() > 0.0).all()) {
    throw InvalidInputError("gamma bounds: gamma_min must be > 0");
  }
  if ((lo.array() > hi.array()).any()) {
    throw InvalidInputError("gamma bounds: gamma_min must be <= gamma_max");
  }
}

BiasFilter::BiasFilter(double cutoff_hz) : cutoff_hz_(cutoff_hz) {
  if (!(cutoff_hz > 0.0)) {
    throw InvalidInputError("bias filter: cutoff must be > 0");
  }
}

Vec3 BiasFilter::update(const Vec3& raw, double dt) {
  if (!(dt > 0.0)) throw InvalidInputError("bias filter: dt must be > 0");
  if (!initialized_) {
    state_ = raw;
    initialized_ = true;
    return state_;
  }
  const double alpha = dt / (dt + 1.0 / (kTwoPi * cutoff_hz_));
  state_ += alpha * (raw - state_);
  return state_;
}

void BiasFilter::reset(const Vec3& state) {
  state_ = state;
  initialized_ = true;
}

CoarseAlignment coarse_align(std::span<const ImuSample> samples,
                             double gravity) {
  if (samples.empty()) {
    throw InsufficientDataError("coarse_align: empty IMU sequence");
  }
  Vec3 mean_f = Vec3::Zero();
  Vec3 mean_w = Vec3::Zero();
  for (const ImuSample& s : samples) {
    mean_f += s.specific_force;
    mean_w += s.angular_rate;
  }
  mean_f /= static_cast<double>(samples.size());
  mean_w /= static_cast<double>(samples.size());

  // Leveling: a stationary accelerometer reads
  // f = (g sin(pitch), -g cos(pitch) sin(roll), -g cos(pitch) cos(roll)).
  const double pitch =
      std::atan2(mean_f.x(), std::hypot(mean_f.y(), mean_f.z()));
  const double roll = std::atan2(-mean_f.y(), -mean_f.z());

  CoarseAlignment out;
  out.bias_gyro = mean_w;
  out.attitude = Rotation::from_rpy(roll, pitch, 0.0);
  out.bias_accel =
      mean_f + out.attitude.inverse() * gravity_nav(gravity);
  return out;
}

Vec3 compute_acceleration(const Vec3& specific_force, const Rotation& attitude,
                          const Vec3& bias_accel, const ExtrinsicCalib& calib) {
  const Rotation body_to_radar = calib.rot_radar_to_body.inverse();
  return body_to_radar * (specific_force - bias_accel +
                          attitude.inverse() * gravity_nav(calib.gravity));
}

Vec3 compute_gamma(double inlier_ratio, const GammaBounds& bounds) {
  if (!(inlier_ratio >= 0.0 && inlier_ratio <= 1.0)) {
    throw InvalidInputError("compute_gamma: ratio must be in [0, 1]");
  }
  return bounds.gamma_min +
         (bounds.gamma_max - bounds.gamma_min) * (inlier_ratio * inlier_ratio);
}

BoxConstraint build_constraint(const Vec3& prev_v, const Vec3& accel_radar,
                               double dt, const Vec3& gamma) {
  if (!(dt > 0.0)) {
    throw InvalidInputError("build_constraint: dt must be > 0");
  }
  const Vec3 predicted = prev_v + accel_radar * dt;
  return BoxConstraint(predicted - gamma, predicted + gamma);
}

Vec3 body_velocity_nav(const Vec3& v_radar, const Rotation& attitude,
                       const Vec3& angular_rate, const Vec3& bias_gyro,
                       const ExtrinsicCalib& calib) {
  const Vec3 v_body = calib.rot_radar_to_body * v_radar;
  const Vec3 lever_rate = (angular_rate - bias_gyro).cross(calib.lever_arm);
  return attitude * (v_body - lever_rate);
}

Vec3 estimate_bias_raw(const Vec3& v_nav_k, const Vec3& v_nav_km1,
                       const Vec3& specific_force, const Rotation& attitude,
                       double dt, double gravity) {
  if (!(dt > 0.0)) {
    throw InvalidInputError("estimate_bias_raw: dt must be > 0");
  }
  const Vec3 accel_nav = (v_nav_k - v_nav_km1) / dt;
  return specific_force +
         attitude.inverse() * (gravity_nav(gravity) - accel_nav);
}

double zero_consensus_ratio(const RadarScan& scan, double inlier_threshold) {
  if (scan.targets.empty()) {
    throw InsufficientDataError("zero_consensus_ratio: empty scan");
  }
  int consensus = 0;
  for (const RadarTarget& t : scan.targets) {
    if (std::abs(t.doppler) < inlier_threshold) ++consensus;
  }
  return static_cast<double>(consensus) /
         static_cast<double>(scan.targets.size());
}

StepResult step(PipelineState state, const RadarScan& scan,
                const Vec3& specific_force, const Vec3& angular_rate,
                const Rotation& attitude) {
  const double dt = scan.timestamp - state.prev_timestamp;
  if (!(dt > 0.0)) {
    throw InvalidInputError("step: scan must advance time");
  }

  VelocityEstimate est;
  est.timestamp = scan.timestamp;

  Vec3 prior = Vec3::Zero();
  std::vector<int> inlier_rows;
  bool ransac_failed = false;

  if (detect_zero_velocity(scan, state.z_threshold)) {
    // Prior is the zero vector; its consensus set is every target whose
    // Doppler already sits below the inlier threshold. The constraint is
    // kept at its tightest so a false detection during motion is caught.
    est.zero_velocity = true;
    est.inlier_ratio =
        zero_consensus_ratio(scan, state.ransac.inlier_threshold);
    est.gamma_used = state.gamma.gamma_min;
  } else {
    try {
      RansacResult res = ransac_estimate(scan, state.ransac);
      prior = res.velocity;
      est.inlier_ratio = res.inlier_ratio;
      inlier_rows = std::move(res.inlier_indices);
    } catch (const DegenerateGeometryError&) {
      ransac_failed = true;
      est.inlier_ratio = 0.0;
    }
    est.gamma_used = compute_gamma(est.inlier_ratio, state.gamma);
  }

  est.accel_radar = compute_acceleration(specific_force, attitude,
                                         state.bias_accel.state(), state.calib);
  const BoxConstraint box = build_constraint(
      state.prev_velocity_radar, est.accel_radar, dt, est.gamma_used);

  const bool violates =
      (prior.array() < box.lower.array()).any() ||
      (prior.array() > box.upper.array()).any();

  bool bias_update = false;
  if (ransac_failed) {
    // No radar estimate at all: fall back to the inertial prediction.
    est.velocity_radar = box.center();
    est.constrained = true;
    est.degenerate = true;
  } else if (violates) {
    est.constrained = true;
    if (inlier_rows.empty()) {
      // Zero-velocity detection conflicting with the IMU: override with the
      // inertial prediction.
      est.velocity_radar = box.center();
    } else {
      Eigen::MatrixXd H;
      Eigen::VectorXd y;
      build_doppler_system(scan.targets, H, y);
      const auto m = static_cast<Eigen::Index>(inlier_rows.size());
      Eigen::MatrixXd Hs(m, 3);
      Eigen::VectorXd ys(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        Hs.row(i) = H.row(inlier_rows[i]);
        ys(i) = y(inlier_rows[i]);
      }
      est.velocity_radar = solve_box_lsq(Hs, ys, box).velocity;
      bias_update = true;
    }
  } else {
    est.velocity_radar = prior;
  }

  est.velocity_nav = body_velocity_nav(est.velocity_radar, attitude,
                                       angular_rate, state.bias_gyro,
                                       state.calib);
  if (bias_update) {
    const Vec3 raw =
        estimate_bias_raw(est.velocity_nav, state.prev_velocity_nav,
                          specific_force, attitude, dt, state.calib.gravity);
    state.bias_accel.update(raw, dt);
  }

  state.prev_velocity_radar = est.velocity_radar;
  state.prev_velocity_nav = est.velocity_nav;
  state.prev_timestamp = scan.timestamp;
  return {est, std::move(state)};
}

}  // namespace creve
