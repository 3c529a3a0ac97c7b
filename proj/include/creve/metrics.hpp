#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "creve/core.hpp"
#include "creve/pipeline.hpp"

namespace creve {

struct TrajectorySample {
  double timestamp = 0.0;
  Vec3 position = Vec3::Zero();
  std::optional<Rotation> attitude;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
};

enum class Alignment { none, se3, pos_yaw };

std::string to_string(Alignment a);

struct AteReport {
  double rmse = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> per_timestamp_errors;
  Alignment alignment = Alignment::none;
  std::size_t matched_pairs = 0;
};

// Nearest-neighbor timestamp association; default half a radar period.
constexpr double kDefaultMaxDt = 0.05;

// Dead-reckoned positions: p_k = p_{k-1} + v_nav_k * dt_k with measured
// inter-epoch gaps; the first epoch uses the median gap. Throws
// InvalidInputError on non-monotonic timestamps.
Trajectory integrate_positions(std::span<const VelocityEstimate> estimates,
                               const Vec3& p0);

// Per-axis RMSE over nearest-timestamp matches within max_dt. Throws
// InsufficientOverlapError when nothing matches.
Vec3 rmse_per_axis(std::span<const TimedVec3> est,
                   std::span<const TimedVec3> gt, double max_dt);

struct PosYawTransform {
  double yaw = 0.0;  // rad, about nav z
  Vec3 translation = Vec3::Zero();
  Vec3 apply(const Vec3& p) const {
    return Rotation::from_yaw(yaw) * p + translation;
  }
};

struct Se3Transform {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

// Closed-form yaw + translation minimizing the summed squared position error
// over matched pairs (1-DoF Procrustes in the horizontal plane plus mean
// offset). Throws InsufficientOverlapError (< 2 matches) or
// DegenerateGeometryError (no horizontal spread).
PosYawTransform align_pos_yaw(const Trajectory& est, const Trajectory& gt,
                              double max_dt = kDefaultMaxDt);

// Closed-form SE(3) least-squares alignment (scale fixed to 1).
Se3Transform align_umeyama(const Trajectory& est, const Trajectory& gt,
                           double max_dt = kDefaultMaxDt);

// Statistics of position error norms after the chosen alignment.
AteReport ate(const Trajectory& est, const Trajectory& gt,
              Alignment alignment, double max_dt = kDefaultMaxDt);

}  // namespace creve
