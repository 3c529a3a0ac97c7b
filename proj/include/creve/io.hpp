#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "creve/core.hpp"
#include "creve/metrics.hpp"
#include "creve/pipeline.hpp"
#include "creve/sim.hpp"

namespace creve {

// Canonical on-disk dataset. A dataset directory holds:
//   radar.csv                    scan_id,t,px,py,pz,doppler   (radar FLU)
//   imu.csv                      t,fx,fy,fz,wx,wy,wz          (body FRD)
//   calib.json                   format_version, q_rb, p_rb, gravity
//   ground_truth.csv             t,px,py,pz,qw,qx,qy,qz       (nav NED; optional)
//   ground_truth_velocity.csv    t,vx_r,vy_r,vz_r,vx_n,vy_n,vz_n (optional)
// Values are written with 17 significant digits so a save/load round trip is
// bit-exact.
struct DatasetMetadata {
  std::string name;
  std::string source;
  std::uint64_t seed = 0;
};

struct Dataset {
  std::vector<RadarScan> radar;
  std::vector<ImuSample> imu;
  std::vector<PoseSample> truth;                // may be empty
  std::vector<TimedVec3> truth_velocity_radar;  // may be empty
  std::vector<TimedVec3> truth_velocity_nav;    // may be empty
  ExtrinsicCalib calib;
  DatasetMetadata metadata;

  bool has_truth() const { return !truth.empty(); }
  bool has_truth_velocity() const { return !truth_velocity_radar.empty(); }
};

inline constexpr int kDatasetFormatVersion = 1;

Dataset to_dataset(const Scenario& scenario, const std::string& name);

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

// Throws IoError for missing files and ParseError (with file and line) for
// malformed rows, non-finite values, zero-range targets and non-monotonic
// timestamps.
Dataset load_dataset(const std::filesystem::path& dir);

// Estimates CSV: t,vx_r,vy_r,vz_r,vx_n,vy_n,vz_n,inlier_ratio,
// gamma_x,gamma_y,gamma_z,constrained,zero_velocity.
void write_estimates(std::span<const VelocityEstimate> estimates,
                     const std::filesystem::path& path);
std::vector<VelocityEstimate> read_estimates(const std::filesystem::path& path);

// Evaluation report (JSON) and the plot-ready aligned trajectory CSV:
// t,est_x,est_y,est_z,gt_x,gt_y,gt_z,error_norm.
struct EvaluationReport {
  bool has_velocity_rmse = false;
  Vec3 velocity_rmse_radar = Vec3::Zero();
  std::string velocity_rmse_note;  // set when skipped
  bool has_ate = false;
  AteReport ate;
  std::string ate_note;  // set when skipped
  std::size_t estimate_count = 0;
};

void write_report(const EvaluationReport& report,
                  const std::filesystem::path& path);

struct AlignedTrajectoryRow {
  double timestamp = 0.0;
  Vec3 est = Vec3::Zero();
  Vec3 gt = Vec3::Zero();
  double error_norm = 0.0;
};

void write_aligned_trajectory(std::span<const AlignedTrajectoryRow> rows,
                              const std::filesystem::path& path);

// Shortest-17 decimal rendering used by every writer.
std::string format_double(double v);

}  // namespace creve
