#pragma once

#include <span>
#include <utility>

#include "creve/box_lsq.hpp"
#include "creve/core.hpp"
#include "creve/ransac.hpp"

namespace creve {

// Bounds of the adaptive constraint half-width; 0 < gamma_min <= gamma_max
// elementwise.
struct GammaBounds {
  GammaBounds() : gamma_min(0.04, 0.04, 0.04), gamma_max(2.0, 2.0, 2.0) {}
  GammaBounds(const Vec3& lo, const Vec3& hi);

  Vec3 gamma_min;  // m/s
  Vec3 gamma_max;  // m/s
};

// First-order low-pass smoother for the accelerometer bias estimate.
class BiasFilter {
 public:
  explicit BiasFilter(double cutoff_hz);

  // state += alpha * (raw - state) with alpha = dt / (dt + 1/(2*pi*cutoff));
  // the first call initializes state = raw. Returns the new state.
  Vec3 update(const Vec3& raw, double dt);

  // Seed the state (e.g. from coarse alignment).
  void reset(const Vec3& state);

  const Vec3& state() const { return state_; }
  bool initialized() const { return initialized_; }
  double cutoff_hz() const { return cutoff_hz_; }

 private:
  double cutoff_hz_;
  Vec3 state_ = Vec3::Zero();
  bool initialized_ = false;
};

// Everything carried between radar epochs.
struct PipelineState {
  Vec3 prev_velocity_radar = Vec3::Zero();  // m/s, radar frame
  Vec3 prev_velocity_nav = Vec3::Zero();    // m/s, nav frame (body velocity)
  double prev_timestamp = 0.0;
  BiasFilter bias_accel{0.01};
  Vec3 bias_gyro = Vec3::Zero();  // rad/s, fixed after coarse alignment
  ExtrinsicCalib calib;
  GammaBounds gamma;
  RansacParams ransac;
  double z_threshold = 0.05;  // m/s, zero-velocity median gate
};

// Per-scan output of one pipeline step.
struct VelocityEstimate {
  double timestamp = 0.0;
  Vec3 velocity_radar = Vec3::Zero();
  Vec3 velocity_nav = Vec3::Zero();
  double inlier_ratio = 0.0;
  Vec3 gamma_used = Vec3::Zero();
  bool constrained = false;
  bool zero_velocity = false;
  Vec3 accel_radar = Vec3::Zero();
  // Set when no radar estimate was possible and the box center (inertial
  // prediction) was emitted.
  bool degenerate = false;
};

struct CoarseAlignment {
  Vec3 bias_gyro = Vec3::Zero();
  Vec3 bias_accel = Vec3::Zero();
  Rotation attitude;  // roll/pitch leveling, yaw = 0
};

// Stationary initialization: gyro bias = mean angular rate, attitude from
// roll/pitch leveling of the mean specific force, accelerometer bias as the
// residual after gravity compensation with that attitude.
CoarseAlignment coarse_align(std::span<const ImuSample> samples,
                             double gravity);

// Platform acceleration in the radar frame from one specific-force sample:
// C_b^r (f - bias + C_n^b g^n).
Vec3 compute_acceleration(const Vec3& specific_force, const Rotation& attitude,
                          const Vec3& bias_accel, const ExtrinsicCalib& calib);

// Adaptive half-width: gamma_min + (gamma_max - gamma_min) * ratio^2.
// Throws InvalidInputError for a ratio outside [0, 1].
Vec3 compute_gamma(double inlier_ratio, const GammaBounds& bounds);

// Box centered on the inertial velocity prediction prev_v + accel * dt with
// half-width gamma. Throws InvalidInputError for dt <= 0.
BoxConstraint build_constraint(const Vec3& prev_v, const Vec3& accel_radar,
                               double dt, const Vec3& gamma);

// Body velocity in the nav frame from the radar-frame velocity, with the
// lever-arm rate term removed:
// C_b^n C_r^b v - C_b^n skew(omega - bias_gyro) * lever_arm.
Vec3 body_velocity_nav(const Vec3& v_radar, const Rotation& attitude,
                       const Vec3& angular_rate, const Vec3& bias_gyro,
                       const ExtrinsicCalib& calib);

// Raw accelerometer bias from two consecutive nav-frame velocities:
// f + C_n^b (g^n - (v_k - v_km1) / dt). Throws InvalidInputError for dt <= 0.
Vec3 estimate_bias_raw(const Vec3& v_nav_k, const Vec3& v_nav_km1,
                       const Vec3& specific_force, const Rotation& attitude,
                       double dt, double gravity);

// Fraction of targets whose absolute Doppler is already below the inlier
// threshold: the consensus of the zero-velocity hypothesis.
double zero_consensus_ratio(const RadarScan& scan, double inlier_threshold);

struct StepResult {
  VelocityEstimate estimate;
  PipelineState state;
};

// One pipeline epoch:
//   1. zero-velocity test on the median absolute Doppler, else RANSAC/LSQ;
//   2. acceleration from the IMU sample with the current smoothed bias;
//   3. adaptive gamma and the acceleration box;
//   4. if the prior estimate violates the box on any axis, constrained
//      least squares on the inlier rows, then a bias update from the two
//      latest nav-frame velocities; otherwise the prior estimate passes
//      through unchanged;
//   5. nav-frame body velocity for dead reckoning.
// A scan whose geometry defeats RANSAC entirely yields the box center
// (inertial prediction) flagged constrained + degenerate.
// Throws InvalidInputError if the scan does not advance time and propagates
// InsufficientDataError from empty / tiny scans.
StepResult step(PipelineState state, const RadarScan& scan,
                const Vec3& specific_force, const Vec3& angular_rate,
                const Rotation& attitude);

}  // namespace creve
