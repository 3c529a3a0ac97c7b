#include "creve/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace creve {
namespace {

double median_gap(const std::vector<double>& times) {
  if (times.size() < 2) return 0.1;
  std::vector<double> gaps;
  gaps.reserve(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    gaps.push_back(times[i] - times[i - 1]);
  }
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

// Index of the IMU sample nearest to t (imu is time sorted).
std::size_t nearest_imu(const std::vector<ImuSample>& imu, double t) {
  const auto it = std::lower_bound(
      imu.begin(), imu.end(), t,
      [](const ImuSample& s, double time) { return s.timestamp < time; });
  if (it == imu.begin()) return 0;
  if (it == imu.end()) return imu.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - imu.begin());
  return (t - imu[hi - 1].timestamp <= imu[hi].timestamp - t) ? hi - 1 : hi;
}

}  // namespace

std::string to_string(Method m) {
  return m == Method::reve ? "reve" : "creve";
}

RunResult run_estimation(const Dataset& dataset, const PipelineConfig& config,
                         Method method) {
  config.validate();
  if (dataset.radar.empty()) {
    throw InsufficientDataError("run_estimation: dataset has no radar scans");
  }
  if (dataset.imu.empty()) {
    throw InsufficientDataError("run_estimation: dataset has no IMU samples");
  }
  if (!dataset.has_truth()) {
    throw InsufficientDataError(
        "run_estimation: dataset has no ground-truth poses (required for "
        "attitude)");
  }

  std::vector<double> imu_times, scan_times;
  imu_times.reserve(dataset.imu.size());
  for (const ImuSample& s : dataset.imu) imu_times.push_back(s.timestamp);
  scan_times.reserve(dataset.radar.size());
  for (const RadarScan& s : dataset.radar) scan_times.push_back(s.timestamp);
  const double imu_period = median_gap(imu_times);
  const double scan_period = median_gap(scan_times);

  RunResult result;

  // Coarse alignment over the leading stationary window.
  double start_time = dataset.radar.front().timestamp - scan_period;
  Vec3 bias_accel0 = Vec3::Zero();
  if (config.alignment_duration > 0.0) {
    const double align_end =
        dataset.imu.front().timestamp + config.alignment_duration;
    std::vector<ImuSample> window;
    for (const ImuSample& s : dataset.imu) {
      if (s.timestamp > align_end) break;
      window.push_back(s);
    }
    const CoarseAlignment alignment = coarse_align(window, config.gravity);
    result.bias_gyro = alignment.bias_gyro;
    bias_accel0 = alignment.bias_accel;
    start_time = std::max(start_time, align_end);
  }

  PipelineState state;
  state.prev_timestamp = start_time;
  state.bias_gyro = result.bias_gyro;
  state.calib = dataset.calib;
  state.calib.gravity = dataset.calib.gravity;
  state.gamma = config.gamma;
  state.ransac = config.ransac;
  state.z_threshold = config.z_threshold;
  state.bias_accel = BiasFilter(config.bias_cutoff_hz);
  state.bias_accel.reset(bias_accel0);

  Vec3 reve_prev = Vec3::Zero();
  std::vector<double> step_ms;
  step_ms.reserve(dataset.radar.size());

  for (const RadarScan& scan : dataset.radar) {
    if (scan.timestamp <= state.prev_timestamp) {
      ++result.stats.skipped_before_alignment;
      continue;
    }
    Rotation attitude;
    try {
      attitude = interpolate_attitude(dataset.truth, scan.timestamp);
    } catch (const OutOfRangeError&) {
      ++result.stats.skipped_no_attitude;
      continue;
    }
    const std::size_t imu_idx = nearest_imu(dataset.imu, scan.timestamp);
    const ImuSample& imu = dataset.imu[imu_idx];
    if (std::abs(imu.timestamp - scan.timestamp) > 1.5 * imu_period) {
      ++result.stats.skipped_no_imu;
      continue;
    }

    const auto t0 = std::chrono::steady_clock::now();
    bool stepped = false;
    try {
      if (method == Method::creve) {
        StepResult r = step(state, scan, imu.specific_force,
                            imu.angular_rate, attitude);
        state = std::move(r.state);
        result.estimates.push_back(r.estimate);
        stepped = true;
      } else {
        VelocityEstimate est;
        est.timestamp = scan.timestamp;
        if (detect_zero_velocity(scan, config.z_threshold)) {
          est.zero_velocity = true;
          est.inlier_ratio =
              zero_consensus_ratio(scan, config.ransac.inlier_threshold);
        } else {
          try {
            RansacResult res = ransac_estimate(scan, config.ransac);
            est.velocity_radar = res.velocity;
            est.inlier_ratio = res.inlier_ratio;
          } catch (const DegenerateGeometryError&) {
            est.velocity_radar = reve_prev;  // hold the last estimate
            est.degenerate = true;
          }
        }
        est.velocity_nav =
            body_velocity_nav(est.velocity_radar, attitude, imu.angular_rate,
                              result.bias_gyro, dataset.calib);
        reve_prev = est.velocity_radar;
        result.estimates.push_back(est);
        stepped = true;
      }
    } catch (const InsufficientDataError&) {
      ++result.stats.skipped_insufficient_targets;
    }
    if (stepped) {
      const auto t1 = std::chrono::steady_clock::now();
      step_ms.push_back(
          std::chrono::duration<double, std::milli>(t1 - t0).count());
      const VelocityEstimate& est = result.estimates.back();
      if (est.constrained) ++result.stats.constrained_epochs;
      if (est.zero_velocity) ++result.stats.zero_velocity_epochs;
      if (est.degenerate) ++result.stats.degenerate_epochs;
    }
  }

  if (method == Method::creve) {
    result.bias_accel_final = state.bias_accel.state();
  }

  result.stats.scans = static_cast<long>(step_ms.size());
  if (!step_ms.empty()) {
    double sum = 0.0;
    for (const double v : step_ms) sum += v;
    result.stats.mean_ms = sum / static_cast<double>(step_ms.size());
    std::vector<double> sorted = step_ms;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t p95 = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(sorted.size()))) - 1;
    result.stats.p95_ms = sorted[std::min(p95, sorted.size() - 1)];
    result.stats.max_ms = sorted.back();
  }
  return result;
}

}  // namespace creve
