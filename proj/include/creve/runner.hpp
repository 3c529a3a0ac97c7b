#pragma once

#include <string>
#include <vector>

#include "creve/config.hpp"
#include "creve/io.hpp"
#include "creve/pipeline.hpp"

namespace creve {

enum class Method { reve, creve };

std::string to_string(Method m);

struct RunStats {
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
  long scans = 0;
  long skipped_before_alignment = 0;
  long skipped_no_attitude = 0;
  long skipped_no_imu = 0;
  long skipped_insufficient_targets = 0;
  long constrained_epochs = 0;
  long zero_velocity_epochs = 0;
  long degenerate_epochs = 0;
};

struct RunResult {
  std::vector<VelocityEstimate> estimates;
  RunStats stats;
  Vec3 bias_gyro = Vec3::Zero();
  Vec3 bias_accel_final = Vec3::Zero();
};

// Run the chosen estimator over every radar scan of the dataset. Attitude at
// each scan comes from the ground-truth pose stream (slerp), the IMU sample
// is the nearest one within 1.5 IMU periods, and the leading
// alignment_duration seconds of IMU data seed the biases via coarse
// alignment. method = reve bypasses the constraint machinery entirely.
// Requires ground-truth poses; throws InsufficientDataError without them.
RunResult run_estimation(const Dataset& dataset, const PipelineConfig& config,
                         Method method);

}  // namespace creve
