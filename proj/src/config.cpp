#include "creve/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace creve {
namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

void check_keys(const ordered_json& obj, const std::string& origin,
                const std::string& section,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) {
      bad(origin, "unknown key '" + section + key + "'");
    }
  }
}

double get_number(const ordered_json& obj, const std::string& origin,
                  const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) bad(origin, "'" + key + "' must be a number");
  return obj.at(key).get<double>();
}

Vec3 get_vec3(const ordered_json& obj, const std::string& origin,
              const std::string& key, const Vec3& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 3) {
    bad(origin, "'" + key + "' must be an array of 3 numbers");
  }
  return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

TrajectoryProfile parse_trajectory(const ordered_json& obj,
                                   const std::string& origin) {
  if (!obj.contains("type") || !obj.at("type").is_string()) {
    bad(origin, "'scenario.trajectory.type' is required");
  }
  const std::string type = obj.at("type").get<std::string>();
  const std::string section = "scenario.trajectory.";
  if (type == "stationary") {
    check_keys(obj, origin, section, {"type"});
    return StationaryProfile{};
  }
  if (type == "constant_velocity") {
    check_keys(obj, origin, section, {"type", "velocity", "ramp_duration"});
    ConstantVelocityProfile p;
    p.velocity = get_vec3(obj, origin, "velocity", p.velocity);
    p.ramp_duration = get_number(obj, origin, "ramp_duration", p.ramp_duration);
    return p;
  }
  if (type == "sinusoid") {
    check_keys(obj, origin, section, {"type", "amplitudes", "frequencies"});
    SinusoidProfile p;
    p.amplitudes = get_vec3(obj, origin, "amplitudes", p.amplitudes);
    p.frequencies = get_vec3(obj, origin, "frequencies", p.frequencies);
    return p;
  }
  if (type == "waypoint_spline") {
    check_keys(obj, origin, section, {"type", "times", "points"});
    WaypointSplineProfile p;
    if (!obj.contains("times") || !obj.contains("points")) {
      bad(origin, "'scenario.trajectory' needs 'times' and 'points'");
    }
    for (const auto& t : obj.at("times")) p.times.push_back(t.get<double>());
    for (const auto& pt : obj.at("points")) {
      if (!pt.is_array() || pt.size() != 3) {
        bad(origin, "'scenario.trajectory.points' entries must be 3-vectors");
      }
      p.points.emplace_back(pt[0].get<double>(), pt[1].get<double>(),
                            pt[2].get<double>());
    }
    return p;
  }
  bad(origin, "unknown trajectory type '" + type + "'");
}

}  // namespace

void PipelineConfig::validate() const {
  // GammaBounds and RansacParams validate themselves on construction/use.
  GammaBounds check(gamma.gamma_min, gamma.gamma_max);
  (void)check;
  ransac.validate();
  if (!(z_threshold >= 0.0)) {
    throw ConfigError("pipeline.z_threshold must be >= 0");
  }
  if (!(bias_cutoff_hz > 0.0)) {
    throw ConfigError("pipeline.bias_cutoff_hz must be > 0");
  }
  if (!(gravity > 0.0)) throw ConfigError("pipeline.gravity must be > 0");
  if (alignment_duration < 0.0) {
    throw ConfigError("pipeline.alignment_duration must be >= 0");
  }
}

void EvaluationConfig::validate() const {
  if (!(max_dt > 0.0)) throw ConfigError("evaluation.max_dt must be > 0");
}

void AppConfig::validate() const {
  pipeline.validate();
  try {
    scenario.validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what());
  }
  evaluation.validate();
  if (!(pipeline.bias_cutoff_hz < scenario.radar_rate / 2.0)) {
    throw ConfigError(
        "pipeline.bias_cutoff_hz must be below half the radar rate");
  }
}

AppConfig parse_config(const std::string& text, const std::string& origin) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad(origin, std::string("JSON parse failure: ") + e.what());
  }
  if (!root.is_object()) bad(origin, "top level must be an object");
  check_keys(root, origin, "", {"pipeline", "scenario", "evaluation"});

  AppConfig config;

  if (root.contains("pipeline")) {
    const auto& p = root.at("pipeline");
    check_keys(p, origin, "pipeline.",
               {"gamma_min", "gamma_max", "z_threshold", "bias_cutoff_hz",
                "gravity", "alignment_duration", "ransac"});
    Vec3 gmin =
        get_vec3(p, origin, "gamma_min", config.pipeline.gamma.gamma_min);
    Vec3 gmax =
        get_vec3(p, origin, "gamma_max", config.pipeline.gamma.gamma_max);
    try {
      config.pipeline.gamma = GammaBounds(gmin, gmax);
    } catch (const InvalidInputError& e) {
      bad(origin, e.what());
    }
    config.pipeline.z_threshold =
        get_number(p, origin, "z_threshold", config.pipeline.z_threshold);
    config.pipeline.bias_cutoff_hz = get_number(
        p, origin, "bias_cutoff_hz", config.pipeline.bias_cutoff_hz);
    config.pipeline.gravity =
        get_number(p, origin, "gravity", config.pipeline.gravity);
    config.pipeline.alignment_duration = get_number(
        p, origin, "alignment_duration", config.pipeline.alignment_duration);
    if (p.contains("ransac")) {
      const auto& r = p.at("ransac");
      check_keys(r, origin, "pipeline.ransac.",
                 {"success_prob", "outlier_prob", "inlier_threshold", "seed"});
      config.pipeline.ransac.success_prob = get_number(
          r, origin, "success_prob", config.pipeline.ransac.success_prob);
      config.pipeline.ransac.outlier_prob = get_number(
          r, origin, "outlier_prob", config.pipeline.ransac.outlier_prob);
      config.pipeline.ransac.inlier_threshold =
          get_number(r, origin, "inlier_threshold",
                     config.pipeline.ransac.inlier_threshold);
      config.pipeline.ransac.rng_seed = static_cast<std::uint64_t>(get_number(
          r, origin, "seed",
          static_cast<double>(config.pipeline.ransac.rng_seed)));
    }
  }

  if (root.contains("scenario")) {
    const auto& s = root.at("scenario");
    check_keys(s, origin, "scenario.",
               {"duration", "radar_rate", "imu_rate", "truth_rate",
                "lead_in_duration", "trajectory", "yaw_rate",
                "n_static_targets", "fov_deg", "min_range", "max_range",
                "outlier_fraction", "ghost_fraction", "dynamic_objects",
                "doppler_noise_std", "position_noise_std", "accel_bias",
                "gyro_bias", "accel_noise_std", "gyro_noise_std", "seed",
                "identity_extrinsics", "gravity"});
    ScenarioConfig& sc = config.scenario;
    sc.duration = get_number(s, origin, "duration", sc.duration);
    sc.radar_rate = get_number(s, origin, "radar_rate", sc.radar_rate);
    sc.imu_rate = get_number(s, origin, "imu_rate", sc.imu_rate);
    sc.truth_rate = get_number(s, origin, "truth_rate", sc.truth_rate);
    sc.lead_in_duration =
        get_number(s, origin, "lead_in_duration", sc.lead_in_duration);
    if (s.contains("trajectory")) {
      sc.trajectory = parse_trajectory(s.at("trajectory"), origin);
    }
    sc.yaw_rate = get_number(s, origin, "yaw_rate", sc.yaw_rate);
    sc.n_static_targets = static_cast<int>(get_number(
        s, origin, "n_static_targets", sc.n_static_targets));
    sc.fov_deg = get_number(s, origin, "fov_deg", sc.fov_deg);
    sc.min_range = get_number(s, origin, "min_range", sc.min_range);
    sc.max_range = get_number(s, origin, "max_range", sc.max_range);
    sc.outlier_fraction =
        get_number(s, origin, "outlier_fraction", sc.outlier_fraction);
    sc.ghost_fraction =
        get_number(s, origin, "ghost_fraction", sc.ghost_fraction);
    if (s.contains("dynamic_objects")) {
      for (const auto& o : s.at("dynamic_objects")) {
        check_keys(o, origin, "scenario.dynamic_objects.",
                   {"velocity", "count"});
        DynamicObjectConfig obj;
        obj.velocity = get_vec3(o, origin, "velocity", obj.velocity);
        obj.target_count =
            static_cast<int>(get_number(o, origin, "count", 0.0));
        sc.dynamic_objects.push_back(obj);
      }
    }
    sc.doppler_noise_std =
        get_number(s, origin, "doppler_noise_std", sc.doppler_noise_std);
    sc.position_noise_std =
        get_number(s, origin, "position_noise_std", sc.position_noise_std);
    sc.accel_bias = get_vec3(s, origin, "accel_bias", sc.accel_bias);
    sc.gyro_bias = get_vec3(s, origin, "gyro_bias", sc.gyro_bias);
    sc.accel_noise_std =
        get_number(s, origin, "accel_noise_std", sc.accel_noise_std);
    sc.gyro_noise_std =
        get_number(s, origin, "gyro_noise_std", sc.gyro_noise_std);
    sc.rng_seed = static_cast<std::uint64_t>(
        get_number(s, origin, "seed", static_cast<double>(sc.rng_seed)));
    if (s.contains("identity_extrinsics")) {
      if (!s.at("identity_extrinsics").is_boolean()) {
        bad(origin, "'scenario.identity_extrinsics' must be a boolean");
      }
      sc.identity_extrinsics = s.at("identity_extrinsics").get<bool>();
    }
    sc.gravity = get_number(s, origin, "gravity", sc.gravity);
  }

  if (root.contains("evaluation")) {
    const auto& e = root.at("evaluation");
    check_keys(e, origin, "evaluation.", {"max_dt"});
    config.evaluation.max_dt =
        get_number(e, origin, "max_dt", config.evaluation.max_dt);
  }

  config.validate();
  return config;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing or unreadable config: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string config_to_json(const AppConfig& config) {
  ordered_json j;
  const PipelineConfig& p = config.pipeline;
  j["pipeline"] = {
      {"gamma_min",
       {p.gamma.gamma_min.x(), p.gamma.gamma_min.y(), p.gamma.gamma_min.z()}},
      {"gamma_max",
       {p.gamma.gamma_max.x(), p.gamma.gamma_max.y(), p.gamma.gamma_max.z()}},
      {"z_threshold", p.z_threshold},
      {"bias_cutoff_hz", p.bias_cutoff_hz},
      {"gravity", p.gravity},
      {"alignment_duration", p.alignment_duration},
      {"ransac",
       {{"success_prob", p.ransac.success_prob},
        {"outlier_prob", p.ransac.outlier_prob},
        {"inlier_threshold", p.ransac.inlier_threshold},
        {"seed", p.ransac.rng_seed}}}};

  const ScenarioConfig& s = config.scenario;
  ordered_json traj;
  if (std::holds_alternative<StationaryProfile>(s.trajectory)) {
    traj = {{"type", "stationary"}};
  } else if (const auto* cv =
                 std::get_if<ConstantVelocityProfile>(&s.trajectory)) {
    traj = {{"type", "constant_velocity"},
            {"velocity", {cv->velocity.x(), cv->velocity.y(), cv->velocity.z()}},
            {"ramp_duration", cv->ramp_duration}};
  } else if (const auto* sp = std::get_if<SinusoidProfile>(&s.trajectory)) {
    traj = {{"type", "sinusoid"},
            {"amplitudes",
             {sp->amplitudes.x(), sp->amplitudes.y(), sp->amplitudes.z()}},
            {"frequencies",
             {sp->frequencies.x(), sp->frequencies.y(), sp->frequencies.z()}}};
  } else {
    const auto& wp = std::get<WaypointSplineProfile>(s.trajectory);
    ordered_json points = ordered_json::array();
    for (const Vec3& pt : wp.points) points.push_back({pt.x(), pt.y(), pt.z()});
    traj = {{"type", "waypoint_spline"}, {"times", wp.times}, {"points", points}};
  }
  ordered_json objects = ordered_json::array();
  for (const auto& o : s.dynamic_objects) {
    objects.push_back(
        {{"velocity", {o.velocity.x(), o.velocity.y(), o.velocity.z()}},
         {"count", o.target_count}});
  }
  j["scenario"] = {
      {"duration", s.duration},
      {"radar_rate", s.radar_rate},
      {"imu_rate", s.imu_rate},
      {"truth_rate", s.truth_rate},
      {"lead_in_duration", s.lead_in_duration},
      {"trajectory", traj},
      {"yaw_rate", s.yaw_rate},
      {"n_static_targets", s.n_static_targets},
      {"fov_deg", s.fov_deg},
      {"min_range", s.min_range},
      {"max_range", s.max_range},
      {"outlier_fraction", s.outlier_fraction},
      {"ghost_fraction", s.ghost_fraction},
      {"dynamic_objects", objects},
      {"doppler_noise_std", s.doppler_noise_std},
      {"position_noise_std", s.position_noise_std},
      {"accel_bias", {s.accel_bias.x(), s.accel_bias.y(), s.accel_bias.z()}},
      {"gyro_bias", {s.gyro_bias.x(), s.gyro_bias.y(), s.gyro_bias.z()}},
      {"accel_noise_std", s.accel_noise_std},
      {"gyro_noise_std", s.gyro_noise_std},
      {"seed", s.rng_seed},
      {"identity_extrinsics", s.identity_extrinsics},
      {"gravity", s.gravity}};
  j["evaluation"] = {{"max_dt", config.evaluation.max_dt}};
  return j.dump(2);
}

}  // namespace creve
