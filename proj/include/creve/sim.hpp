#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "creve/core.hpp"

namespace creve {

// Analytic motion profiles (closed-form position, velocity, acceleration).
struct StationaryProfile {};

// Rest, then a raised-cosine ramp to the target velocity, then cruise.
struct ConstantVelocityProfile {
  Vec3 velocity = Vec3::Zero();
  double ramp_duration = 2.0;  // s, > 0
};

// Per-axis position A_i * sin(2 pi f_i t); starts at peak velocity.
struct SinusoidProfile {
  Vec3 amplitudes = Vec3::Zero();    // m
  Vec3 frequencies = Vec3::Zero();   // Hz
};

// Piecewise cubic Hermite through waypoints, finite-difference interior
// tangents, zero velocity clamped at both ends.
struct WaypointSplineProfile {
  std::vector<double> times;  // s, strictly increasing, profile-local
  std::vector<Vec3> points;   // m, nav frame
};

using TrajectoryProfile =
    std::variant<StationaryProfile, ConstantVelocityProfile, SinusoidProfile,
                 WaypointSplineProfile>;

struct DynamicObjectConfig {
  Vec3 velocity = Vec3::Zero();  // m/s, nav frame, shared by its targets
  int target_count = 0;
};

struct ScenarioConfig {
  double duration = 60.0;      // s
  double radar_rate = 10.0;    // Hz
  double imu_rate = 400.0;     // Hz
  double truth_rate = 100.0;   // Hz, ground-truth pose output
  // Exact standstill before the profile starts; gives the pipeline its
  // stationary coarse-alignment window.
  double lead_in_duration = 0.0;
  TrajectoryProfile trajectory = StationaryProfile{};
  double yaw_rate = 0.0;       // rad/s about nav z, active after the lead-in

  int n_static_targets = 64;   // per-scan target slots (clean/outlier/ghost)
  double fov_deg = 120.0;      // full width, azimuth and elevation
  double min_range = 1.0;      // m
  double max_range = 30.0;     // m
  double outlier_fraction = 0.0;  // slot probability of a Doppler offset
  double ghost_fraction = 0.0;    // slot probability of a random Doppler
  std::vector<DynamicObjectConfig> dynamic_objects;

  double doppler_noise_std = 0.0;   // m/s
  double position_noise_std = 0.0;  // m, per component
  Vec3 accel_bias = Vec3::Zero();   // m/s^2
  Vec3 gyro_bias = Vec3::Zero();    // rad/s
  double accel_noise_std = 0.0;     // m/s^2
  double gyro_noise_std = 0.0;      // rad/s

  std::uint64_t rng_seed = 0;
  // Default extrinsics: FLU radar on the FRD body (x-flip) with a 5 degree
  // yaw offset and lever arm (0.1, 0, -0.05) m; identity keeps the radar
  // axes on the body axes.
  bool identity_extrinsics = false;
  double gravity = 9.81;

  // Throws InvalidInputError naming every offending field.
  void validate() const;

  ExtrinsicCalib extrinsics() const;
};

// Aggregate per-category target counts over all scans.
struct TargetMix {
  long clean = 0;
  long outliers = 0;
  long ghosts = 0;
  long dynamic = 0;
  long total() const { return clean + outliers + ghosts + dynamic; }
};

struct Scenario {
  std::vector<RadarScan> radar;
  std::vector<ImuSample> imu;
  std::vector<PoseSample> truth;
  std::vector<TimedVec3> truth_velocity_radar;  // radar frame, at scan times
  std::vector<TimedVec3> truth_velocity_nav;    // body velocity, nav frame
  ExtrinsicCalib calib;
  TargetMix mix;
  ScenarioConfig config;
};

// Deterministic forward model: static targets satisfy the Doppler relation
// exactly before noise, IMU samples follow the strapdown sensor model with
// the planted biases.
Scenario generate(const ScenarioConfig& config);

struct TruthState {
  Vec3 velocity_radar = Vec3::Zero();  // radar's own velocity, radar frame
  Vec3 velocity_nav = Vec3::Zero();    // body velocity, nav frame
  Vec3 accel_nav = Vec3::Zero();       // body acceleration, nav frame
};

// Closed-form ground truth at any time inside [0, duration]; throws
// OutOfRangeError outside.
TruthState truth_at(const Scenario& scenario, double t);

}  // namespace creve
