#include "creve/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace creve {
namespace {

// Indices of the ground-truth sample nearest each estimate timestamp,
// nothing kept beyond max_dt.
template <typename A, typename B>
std::vector<std::pair<int, int>> match_nearest(const std::vector<A>& est,
                                               const std::vector<B>& gt,
                                               double max_dt) {
  std::vector<std::pair<int, int>> pairs;
  if (gt.empty()) return pairs;
  int j = 0;
  const int m = static_cast<int>(gt.size());
  for (int i = 0; i < static_cast<int>(est.size()); ++i) {
    const double t = est[i].timestamp;
    while (j + 1 < m && std::abs(gt[j + 1].timestamp - t) <=
                            std::abs(gt[j].timestamp - t)) {
      ++j;
    }
    if (std::abs(gt[j].timestamp - t) <= max_dt) pairs.emplace_back(i, j);
  }
  return pairs;
}

std::vector<std::pair<Vec3, Vec3>> matched_positions(const Trajectory& est,
                                                     const Trajectory& gt,
                                                     double max_dt) {
  std::vector<std::pair<Vec3, Vec3>> out;
  for (const auto& [i, j] : match_nearest(est.samples, gt.samples, max_dt)) {
    out.emplace_back(est.samples[i].position, gt.samples[j].position);
  }
  return out;
}

}  // namespace

std::string to_string(Alignment a) {
  switch (a) {
    case Alignment::none: return "none";
    case Alignment::se3: return "se3";
    case Alignment::pos_yaw: return "pos_yaw";
  }
  return "unknown";
}

Trajectory integrate_positions(std::span<const VelocityEstimate> estimates,
                               const Vec3& p0) {
  Trajectory traj;
  if (estimates.empty()) return traj;
  std::vector<double> gaps;
  gaps.reserve(estimates.size());
  for (std::size_t k = 1; k < estimates.size(); ++k) {
    const double dt = estimates[k].timestamp - estimates[k - 1].timestamp;
    if (!(dt > 0.0)) {
      throw InvalidInputError(
          "integrate_positions: timestamps must strictly increase");
    }
    gaps.push_back(dt);
  }
  double first_dt = 0.0;
  if (!gaps.empty()) {
    std::vector<double> sorted = gaps;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                     sorted.end());
    first_dt = sorted[sorted.size() / 2];
  }

  Vec3 p = p0;
  traj.samples.reserve(estimates.size());
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const double dt = (k == 0) ? first_dt : gaps[k - 1];
    p += estimates[k].velocity_nav * dt;
    traj.samples.push_back({estimates[k].timestamp, p, std::nullopt});
  }
  return traj;
}

Vec3 rmse_per_axis(std::span<const TimedVec3> est,
                   std::span<const TimedVec3> gt, double max_dt) {
  const std::vector<TimedVec3> ev(est.begin(), est.end());
  const std::vector<TimedVec3> gv(gt.begin(), gt.end());
  const auto pairs = match_nearest(ev, gv, max_dt);
  if (pairs.empty()) {
    throw InsufficientOverlapError("rmse_per_axis: no matched samples");
  }
  Vec3 acc = Vec3::Zero();
  for (const auto& [i, j] : pairs) {
    const Vec3 e = ev[i].value - gv[j].value;
    acc += e.cwiseProduct(e);
  }
  return (acc / static_cast<double>(pairs.size())).cwiseSqrt();
}

PosYawTransform align_pos_yaw(const Trajectory& est, const Trajectory& gt,
                              double max_dt) {
  const auto pairs = matched_positions(est, gt, max_dt);
  if (pairs.size() < 2) {
    throw InsufficientOverlapError("align_pos_yaw: need >= 2 matched pairs");
  }
  Vec3 ce = Vec3::Zero(), cg = Vec3::Zero();
  for (const auto& [p, q] : pairs) {
    ce += p;
    cg += q;
  }
  ce /= static_cast<double>(pairs.size());
  cg /= static_cast<double>(pairs.size());

  double a = 0.0, b = 0.0;
  for (const auto& [p, q] : pairs) {
    const Vec3 pe = p - ce;
    const Vec3 qg = q - cg;
    a += pe.x() * qg.x() + pe.y() * qg.y();
    b += pe.x() * qg.y() - pe.y() * qg.x();
  }
  if (std::hypot(a, b) < 1e-12) {
    throw DegenerateGeometryError(
        "align_pos_yaw: no horizontal spread in matched pairs");
  }
  PosYawTransform t;
  t.yaw = std::atan2(b, a);
  t.translation = cg - Rotation::from_yaw(t.yaw) * ce;
  return t;
}

Se3Transform align_umeyama(const Trajectory& est, const Trajectory& gt,
                           double max_dt) {
  const auto pairs = matched_positions(est, gt, max_dt);
  if (pairs.size() < 3) {
    throw InsufficientOverlapError("align_umeyama: need >= 3 matched pairs");
  }
  Vec3 ce = Vec3::Zero(), cg = Vec3::Zero();
  for (const auto& [p, q] : pairs) {
    ce += p;
    cg += q;
  }
  ce /= static_cast<double>(pairs.size());
  cg /= static_cast<double>(pairs.size());

  Mat3 cross = Mat3::Zero();
  for (const auto& [p, q] : pairs) cross += (q - cg) * (p - ce).transpose();
  Eigen::JacobiSVD<Mat3> svd(cross,
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  Se3Transform t;
  t.rotation =
      Rotation::from_matrix(svd.matrixU() * d * svd.matrixV().transpose());
  t.translation = cg - t.rotation * ce;
  return t;
}

AteReport ate(const Trajectory& est, const Trajectory& gt, Alignment alignment,
              double max_dt) {
  Trajectory aligned = est;
  switch (alignment) {
    case Alignment::none:
      break;
    case Alignment::pos_yaw: {
      const PosYawTransform t = align_pos_yaw(est, gt, max_dt);
      for (auto& s : aligned.samples) s.position = t.apply(s.position);
      break;
    }
    case Alignment::se3: {
      const Se3Transform t = align_umeyama(est, gt, max_dt);
      for (auto& s : aligned.samples) s.position = t.apply(s.position);
      break;
    }
  }

  const auto pairs = matched_positions(aligned, gt, max_dt);
  if (pairs.empty()) {
    throw InsufficientOverlapError("ate: trajectories do not overlap");
  }
  AteReport report;
  report.alignment = alignment;
  report.matched_pairs = pairs.size();
  report.per_timestamp_errors.reserve(pairs.size());
  double sq_sum = 0.0, sum = 0.0;
  for (const auto& [p, q] : pairs) {
    const double e = (p - q).norm();
    report.per_timestamp_errors.push_back(e);
    sq_sum += e * e;
    sum += e;
  }
  const auto n = static_cast<double>(pairs.size());
  report.rmse = std::sqrt(sq_sum / n);
  report.mean = sum / n;
  std::vector<double> sorted = report.per_timestamp_errors;
  std::sort(sorted.begin(), sorted.end());
  report.min = sorted.front();
  report.max = sorted.back();
  report.median = (sorted.size() % 2 == 1)
                      ? sorted[sorted.size() / 2]
                      : 0.5 * (sorted[sorted.size() / 2 - 1] +
                               sorted[sorted.size() / 2]);
  return report;
}

}  // namespace creve
