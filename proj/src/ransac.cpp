#include "creve/ransac.hpp"

#include <algorithm>
#include <cmath>

#include "creve/rng.hpp"

namespace creve {
namespace {

constexpr double kMaxConditionNumber = 1e8;  // on H^T H

// Least-squares solve of the normal equations, with an optional conditioning
// gate. Returns false when gated out.
bool solve_normal(const Mat3& normal, const Vec3& rhs, bool gate_condition,
                  Vec3& out) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(normal);
  const double lam_min = eig.eigenvalues().minCoeff();
  const double lam_max = eig.eigenvalues().maxCoeff();
  if (lam_min <= 0.0 || (gate_condition && lam_max > kMaxConditionNumber * lam_min)) {
    return false;
  }
  out = eig.eigenvectors() *
        (eig.eigenvectors().transpose() * rhs).cwiseQuotient(eig.eigenvalues());
  return true;
}

}  // namespace

int RansacParams::iterations() const {
  validate();
  if (outlier_prob <= 0.0) return 1;
  const double inlier3 = std::pow(1.0 - outlier_prob, 3);
  const double n = std::log(1.0 - success_prob) / std::log(1.0 - inlier3);
  return std::max(1, static_cast<int>(std::ceil(n)));
}

void RansacParams::validate() const {
  if (!(success_prob > 0.0 && success_prob < 1.0)) {
    throw InvalidInputError("ransac: success_prob must be in (0, 1)");
  }
  if (!(outlier_prob >= 0.0 && outlier_prob < 1.0)) {
    throw InvalidInputError("ransac: outlier_prob must be in [0, 1)");
  }
  if (!(inlier_threshold > 0.0)) {
    throw InvalidInputError("ransac: inlier_threshold must be > 0");
  }
}

void build_doppler_system(std::span<const RadarTarget> targets,
                          Eigen::MatrixXd& H, Eigen::VectorXd& y) {
  const auto n = static_cast<Eigen::Index>(targets.size());
  H.resize(n, 3);
  y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const RadarTarget& t = targets[i];
    const double range = t.position.norm();
    if (!(range > 0.0) || !t.position.allFinite() || !std::isfinite(t.doppler)) {
      throw InvalidInputError("doppler system: invalid target");
    }
    H.row(i) = t.position.transpose() / range;
    y(i) = -t.doppler;
  }
}

Vec3 lsq_velocity(std::span<const RadarTarget> targets) {
  if (targets.size() < 3) {
    throw InsufficientDataError("lsq_velocity: need at least 3 targets");
  }
  Eigen::MatrixXd H;
  Eigen::VectorXd y;
  build_doppler_system(targets, H, y);
  Vec3 v;
  if (!solve_normal(H.transpose() * H, H.transpose() * y, true, v)) {
    throw DegenerateGeometryError(
        "lsq_velocity: target directions are ill-conditioned");
  }
  return v;
}

RansacResult ransac_estimate(const RadarScan& scan,
                             const RansacParams& params) {
  const auto& targets = scan.targets;
  const int n = static_cast<int>(targets.size());
  if (n < 3) {
    throw InsufficientDataError("ransac_estimate: need at least 3 targets");
  }

  Eigen::MatrixXd H;
  Eigen::VectorXd y;
  build_doppler_system(targets, H, y);

  const int iterations = params.iterations();
  SplitMix64 rng(params.rng_seed);

  std::vector<int> best_inliers;
  Vec3 best_velocity = Vec3::Zero();
  bool found = false;

  std::vector<int> inliers;
  inliers.reserve(n);
  for (int it = 0; it < iterations; ++it) {
    const int a = static_cast<int>(rng.below(n));
    int b = a;
    while (b == a) b = static_cast<int>(rng.below(n));
    int c = a;
    while (c == a || c == b) c = static_cast<int>(rng.below(n));

    Mat3 sample;
    sample.row(0) = H.row(a);
    sample.row(1) = H.row(b);
    sample.row(2) = H.row(c);
    const Vec3 sample_rhs(y(a), y(b), y(c));
    Vec3 hypothesis;
    if (!solve_normal(sample.transpose() * sample,
                      sample.transpose() * sample_rhs, true, hypothesis)) {
      continue;  // coplanar sample
    }

    inliers.clear();
    for (int i = 0; i < n; ++i) {
      if (std::abs(y(i) - H.row(i).dot(hypothesis)) < params.inlier_threshold) {
        inliers.push_back(i);
      }
    }
    if (!found || inliers.size() > best_inliers.size()) {
      best_inliers = inliers;
      best_velocity = hypothesis;
      found = true;
    }
  }

  if (!found) {
    throw DegenerateGeometryError(
        "ransac_estimate: every minimal sample was degenerate");
  }

  RansacResult result;
  result.inlier_indices = std::move(best_inliers);
  result.inlier_ratio =
      static_cast<double>(result.inlier_indices.size()) / n;

  // Refit on the consensus rows; the set contains a well-conditioned triple,
  // so this only falls back in pathological near-coplanar clouds.
  const auto m = static_cast<Eigen::Index>(result.inlier_indices.size());
  if (m >= 3) {
    Eigen::MatrixXd Hs(m, 3);
    Eigen::VectorXd ys(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      Hs.row(i) = H.row(result.inlier_indices[i]);
      ys(i) = y(result.inlier_indices[i]);
    }
    Vec3 refined;
    if (solve_normal(Hs.transpose() * Hs, Hs.transpose() * ys, false,
                     refined)) {
      result.velocity = refined;
    } else {
      result.velocity = best_velocity;
      result.degenerate = true;
    }
  } else {
    result.velocity = best_velocity;
  }
  return result;
}

bool detect_zero_velocity(const RadarScan& scan, double z_threshold) {
  if (scan.targets.empty()) {
    throw InsufficientDataError("detect_zero_velocity: empty scan");
  }
  std::vector<double> mags;
  mags.reserve(scan.targets.size());
  for (const RadarTarget& t : scan.targets) mags.push_back(std::abs(t.doppler));
  const size_t mid = mags.size() / 2;
  std::nth_element(mags.begin(), mags.begin() + mid, mags.end());
  double median = mags[mid];
  if (mags.size() % 2 == 0) {
    const double lo = *std::max_element(mags.begin(), mags.begin() + mid);
    median = 0.5 * (lo + median);
  }
  return median < z_threshold;
}

}  // namespace creve
