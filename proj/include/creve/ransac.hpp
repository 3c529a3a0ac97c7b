#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "creve/core.hpp"

namespace creve {

struct RansacParams {
  double success_prob = 0.99;      // in (0, 1)
  double outlier_prob = 0.4;       // in [0, 1)
  double inlier_threshold = 0.15;  // m/s, absolute Doppler residual
  std::uint64_t rng_seed = 0;

  // Iteration count for a minimal sample of 3:
  // ceil(log(1 - success_prob) / log(1 - (1 - outlier_prob)^3)), at least 1.
  int iterations() const;

  void validate() const;
};

struct RansacResult {
  Vec3 velocity = Vec3::Zero();     // m/s, radar frame
  std::vector<int> inlier_indices;  // ascending target indices
  double inlier_ratio = 0.0;        // |inliers| / |targets|
  // True when the consensus refit was rank-deficient and the hypothesis
  // velocity was kept instead.
  bool degenerate = false;
};

// Direction matrix row p_i/||p_i|| and right-hand side -doppler_i for each
// target; shared by the estimators and the constrained solve.
void build_doppler_system(std::span<const RadarTarget> targets,
                          Eigen::MatrixXd& H, Eigen::VectorXd& y);

// Unconstrained least-squares ego velocity from >= 3 targets via the normal
// equations. Throws InsufficientDataError (< 3 targets) or
// DegenerateGeometryError (H^T H condition number above 1e8).
Vec3 lsq_velocity(std::span<const RadarTarget> targets);

// Iterative RANSAC: fixed hypothesis count from params, minimal samples of 3
// distinct targets, consensus by absolute Doppler residual, refit on the
// largest consensus set. Deterministic for a given seed; consensus ties go to
// the earliest hypothesis. Degenerate minimal samples are skipped; if every
// hypothesis is degenerate a DegenerateGeometryError is thrown.
RansacResult ransac_estimate(const RadarScan& scan, const RansacParams& params);

// True when the median absolute Doppler over the scan falls below
// z_threshold. Throws InsufficientDataError on an empty scan.
bool detect_zero_velocity(const RadarScan& scan, double z_threshold);

}  // namespace creve
