#include "creve/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "creve/rng.hpp"

namespace creve {
namespace {

constexpr double kPi = 3.141592653589793;

struct MotionState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
};

// Closed-form evaluation of a profile on its local time axis (t = 0 at the
// end of the lead-in).
class ProfileModel {
 public:
  explicit ProfileModel(const TrajectoryProfile& profile) : profile_(profile) {
    if (const auto* s = std::get_if<WaypointSplineProfile>(&profile_)) {
      const std::size_t n = s->points.size();
      tangents_.assign(n, Vec3::Zero());
      for (std::size_t j = 1; j + 1 < n; ++j) {
        tangents_[j] = (s->points[j + 1] - s->points[j - 1]) /
                       (s->times[j + 1] - s->times[j - 1]);
      }
    }
  }

  MotionState at(double t) const {
    MotionState m;
    if (std::holds_alternative<StationaryProfile>(profile_)) return m;

    if (const auto* cv = std::get_if<ConstantVelocityProfile>(&profile_)) {
      const double tr = cv->ramp_duration;
      if (t <= 0.0) return m;
      if (t < tr) {
        const double phase = kPi * t / tr;
        m.velocity = cv->velocity * 0.5 * (1.0 - std::cos(phase));
        m.acceleration = cv->velocity * (0.5 * kPi / tr) * std::sin(phase);
        m.position =
            cv->velocity * 0.5 * (t - (tr / kPi) * std::sin(phase));
      } else {
        m.velocity = cv->velocity;
        m.position = cv->velocity * (0.5 * tr + (t - tr));
      }
      return m;
    }

    if (const auto* sin_p = std::get_if<SinusoidProfile>(&profile_)) {
      for (int i = 0; i < 3; ++i) {
        const double w = 2.0 * kPi * sin_p->frequencies[i];
        const double a = sin_p->amplitudes[i];
        m.position[i] = a * std::sin(w * t);
        m.velocity[i] = a * w * std::cos(w * t);
        m.acceleration[i] = -a * w * w * std::sin(w * t);
      }
      return m;
    }

    const auto& sp = std::get<WaypointSplineProfile>(profile_);
    if (t <= sp.times.front()) {
      m.position = sp.points.front();
      return m;
    }
    if (t >= sp.times.back()) {
      m.position = sp.points.back();
      return m;
    }
    const auto it =
        std::upper_bound(sp.times.begin(), sp.times.end(), t) - 1;
    const std::size_t j = static_cast<std::size_t>(it - sp.times.begin());
    const double h = sp.times[j + 1] - sp.times[j];
    const double u = (t - sp.times[j]) / h;
    const Vec3& p0 = sp.points[j];
    const Vec3& p1 = sp.points[j + 1];
    const Vec3 hm0 = h * tangents_[j];
    const Vec3 hm1 = h * tangents_[j + 1];
    const double u2 = u * u, u3 = u2 * u;
    m.position = (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * hm0 +
                 (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * hm1;
    m.velocity = ((6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * hm0 +
                  (-6 * u2 + 6 * u) * p1 + (3 * u2 - 2 * u) * hm1) /
                 h;
    m.acceleration = ((12 * u - 6) * p0 + (6 * u - 4) * hm0 +
                      (-12 * u + 6) * p1 + (6 * u - 2) * hm1) /
                     (h * h);
    return m;
  }

 private:
  TrajectoryProfile profile_;
  std::vector<Vec3> tangents_;
};

// Full kinematic truth: profile shifted by the lead-in plus a constant-rate
// yaw attitude profile.
class TruthModel {
 public:
  explicit TruthModel(const ScenarioConfig& config)
      : config_(config), profile_(config.trajectory) {}

  MotionState nav(double t) const {
    const double local = t - config_.lead_in_duration;
    if (local <= 0.0) {
      MotionState m;
      m.position = profile_.at(0.0).position;
      return m;
    }
    return profile_.at(local);
  }

  double yaw(double t) const {
    const double local = t - config_.lead_in_duration;
    return local <= 0.0 ? 0.0 : config_.yaw_rate * local;
  }

  Rotation attitude(double t) const { return Rotation::from_yaw(yaw(t)); }

  Vec3 angular_rate_body(double t) const {
    const double local = t - config_.lead_in_duration;
    return local <= 0.0 ? Vec3::Zero() : Vec3(0.0, 0.0, config_.yaw_rate);
  }

  // Radar's own velocity: body velocity plus the lever-arm rate.
  Vec3 radar_velocity_nav(double t, const ExtrinsicCalib& calib) const {
    const MotionState m = nav(t);
    return m.velocity +
           attitude(t) * angular_rate_body(t).cross(calib.lever_arm);
  }

  Vec3 radar_velocity_radar(double t, const ExtrinsicCalib& calib) const {
    const Rotation nav_to_radar =
        (attitude(t) * calib.rot_radar_to_body).inverse();
    return nav_to_radar * radar_velocity_nav(t, calib);
  }

 private:
  ScenarioConfig config_;
  ProfileModel profile_;
};

Vec3 sample_direction(SplitMix64& rng, double fov_deg) {
  const double half = 0.5 * fov_deg * kPi / 180.0;
  const double az = rng.uniform(-half, half);
  const double el = rng.uniform(-half, half);
  return Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
              std::sin(el));
}

}  // namespace

void ScenarioConfig::validate() const {
  std::vector<std::string> bad;
  if (!(duration > 0.0)) bad.push_back("duration");
  if (!(radar_rate > 0.0)) bad.push_back("radar_rate");
  if (!(imu_rate > 0.0)) bad.push_back("imu_rate");
  if (!(truth_rate > 0.0)) bad.push_back("truth_rate");
  if (lead_in_duration < 0.0) bad.push_back("lead_in_duration");
  if (n_static_targets < 0) bad.push_back("n_static_targets");
  if (!(fov_deg > 0.0 && fov_deg <= 180.0)) bad.push_back("fov_deg");
  if (!(min_range > 0.0 && min_range < max_range)) bad.push_back("min_range/max_range");
  if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0)) bad.push_back("outlier_fraction");
  if (!(ghost_fraction >= 0.0 && ghost_fraction < 1.0)) bad.push_back("ghost_fraction");
  if (outlier_fraction + ghost_fraction >= 1.0) bad.push_back("outlier_fraction+ghost_fraction");
  for (const auto& obj : dynamic_objects) {
    if (obj.target_count < 0) bad.push_back("dynamic_objects.target_count");
  }
  if (doppler_noise_std < 0.0) bad.push_back("doppler_noise_std");
  if (position_noise_std < 0.0) bad.push_back("position_noise_std");
  if (accel_noise_std < 0.0) bad.push_back("accel_noise_std");
  if (gyro_noise_std < 0.0) bad.push_back("gyro_noise_std");
  if (!(gravity > 0.0)) bad.push_back("gravity");
  if (const auto* cv = std::get_if<ConstantVelocityProfile>(&trajectory)) {
    if (!(cv->ramp_duration > 0.0)) bad.push_back("trajectory.ramp_duration");
  }
  if (const auto* sp = std::get_if<WaypointSplineProfile>(&trajectory)) {
    if (sp->points.size() < 2 || sp->times.size() != sp->points.size()) {
      bad.push_back("trajectory.points/times");
    } else {
      for (std::size_t j = 1; j < sp->times.size(); ++j) {
        if (!(sp->times[j] > sp->times[j - 1])) {
          bad.push_back("trajectory.times (not strictly increasing)");
          break;
        }
      }
    }
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "scenario config: invalid field(s):";
    for (const auto& f : bad) msg << " " << f;
    throw InvalidInputError(msg.str());
  }
}

ExtrinsicCalib ScenarioConfig::extrinsics() const {
  ExtrinsicCalib calib;
  calib.gravity = gravity;
  if (!identity_extrinsics) {
    calib.rot_radar_to_body =
        Rotation::from_yaw(5.0 * kPi / 180.0) * Rotation::from_rpy(kPi, 0, 0);
    calib.lever_arm = Vec3(0.1, 0.0, -0.05);
  }
  return calib;
}

Scenario generate(const ScenarioConfig& config) {
  config.validate();

  Scenario scenario;
  scenario.config = config;
  scenario.calib = config.extrinsics();
  const ExtrinsicCalib& calib = scenario.calib;
  const TruthModel model(config);

  const auto count = [&](double rate) {
    return static_cast<long>(std::floor(config.duration * rate)) + 1;
  };

  // Reference speed for ghost / offset magnitudes.
  const long n_scans = count(config.radar_rate);
  double vmax = 1.0;
  for (long k = 0; k < n_scans; ++k) {
    const double t = static_cast<double>(k) / config.radar_rate;
    vmax = std::max(vmax, model.radar_velocity_radar(t, calib).norm());
  }

  // Radar scans: one deterministic stream per scan index.
  scenario.radar.reserve(n_scans);
  scenario.truth_velocity_radar.reserve(n_scans);
  scenario.truth_velocity_nav.reserve(n_scans);
  for (long k = 0; k < n_scans; ++k) {
    const double t = static_cast<double>(k) / config.radar_rate;
    SplitMix64 rng = SplitMix64::stream(config.rng_seed, 1, k);
    const Vec3 v_radar = model.radar_velocity_radar(t, calib);
    const Rotation nav_to_radar =
        (model.attitude(t) * calib.rot_radar_to_body).inverse();

    RadarScan scan;
    scan.timestamp = t;
    scan.targets.reserve(config.n_static_targets);

    for (int i = 0; i < config.n_static_targets; ++i) {
      const double category = rng.uniform01();
      Vec3 dir = sample_direction(rng, config.fov_deg);
      const double range = rng.uniform(config.min_range, config.max_range);
      RadarTarget target;
      target.position = range * dir;
      if (category < config.ghost_fraction) {
        target.doppler = rng.uniform(-2.0 * vmax, 2.0 * vmax);
        ++scenario.mix.ghosts;
      } else if (category < config.ghost_fraction + config.outlier_fraction) {
        const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        target.doppler = -dir.dot(v_radar) + sign * rng.uniform(1.0, 3.0) * vmax;
        ++scenario.mix.outliers;
      } else {
        target.doppler = -dir.dot(v_radar);
        ++scenario.mix.clean;
      }
      scan.targets.push_back(target);
    }
    for (const auto& obj : config.dynamic_objects) {
      const Vec3 w_radar = nav_to_radar * obj.velocity;
      for (int i = 0; i < obj.target_count; ++i) {
        Vec3 dir = sample_direction(rng, config.fov_deg);
        const double range = rng.uniform(config.min_range, config.max_range);
        RadarTarget target;
        target.position = range * dir;
        target.doppler = dir.dot(w_radar - v_radar);
        scan.targets.push_back(target);
        ++scenario.mix.dynamic;
      }
    }
    // Measurement noise, after the exact forward model.
    for (auto& target : scan.targets) {
      if (config.doppler_noise_std > 0.0) {
        target.doppler += config.doppler_noise_std * rng.normal();
      }
      if (config.position_noise_std > 0.0) {
        target.position += config.position_noise_std *
                           Vec3(rng.normal(), rng.normal(), rng.normal());
      }
    }

    scenario.radar.push_back(std::move(scan));
    scenario.truth_velocity_radar.push_back({t, v_radar});
    scenario.truth_velocity_nav.push_back({t, model.nav(t).velocity});
  }

  // IMU: strapdown sensor model with planted biases.
  const long n_imu = count(config.imu_rate);
  scenario.imu.reserve(n_imu);
  const Vec3 g_nav(0.0, 0.0, config.gravity);
  for (long j = 0; j < n_imu; ++j) {
    const double t = static_cast<double>(j) / config.imu_rate;
    SplitMix64 rng = SplitMix64::stream(config.rng_seed, 2, j);
    const Rotation nav_to_body = model.attitude(t).inverse();
    ImuSample s;
    s.timestamp = t;
    s.specific_force =
        nav_to_body * (model.nav(t).acceleration - g_nav) + config.accel_bias;
    s.angular_rate = model.angular_rate_body(t) + config.gyro_bias;
    if (config.accel_noise_std > 0.0) {
      s.specific_force += config.accel_noise_std *
                          Vec3(rng.normal(), rng.normal(), rng.normal());
    }
    if (config.gyro_noise_std > 0.0) {
      s.angular_rate += config.gyro_noise_std *
                        Vec3(rng.normal(), rng.normal(), rng.normal());
    }
    scenario.imu.push_back(s);
  }

  // Ground-truth poses, noise-free.
  const long n_truth = count(config.truth_rate);
  scenario.truth.reserve(n_truth);
  for (long j = 0; j < n_truth; ++j) {
    const double t = static_cast<double>(j) / config.truth_rate;
    scenario.truth.push_back({t, model.nav(t).position, model.attitude(t)});
  }
  return scenario;
}

TruthState truth_at(const Scenario& scenario, double t) {
  if (t < 0.0 || t > scenario.config.duration) {
    std::ostringstream msg;
    msg << "truth_at: t=" << t << " outside [0, " << scenario.config.duration
        << "]";
    throw OutOfRangeError(msg.str());
  }
  const TruthModel model(scenario.config);
  TruthState state;
  state.velocity_radar = model.radar_velocity_radar(t, scenario.calib);
  state.velocity_nav = model.nav(t).velocity;
  state.accel_nav = model.nav(t).acceleration;
  return state;
}

}  // namespace creve
