// Test-side oracles, independent of the library's solve paths: hand-rolled
// Cramer solves, exhaustive active-set enumeration, direct summations.
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "creve/box_lsq.hpp"
#include "creve/core.hpp"
#include "creve/rng.hpp"

namespace oracle {

using creve::Vec3;

// 3x3 solve by Cramer's rule; returns false when |det| is tiny.
inline bool solve3(const std::array<std::array<double, 3>, 3>& a,
                   const std::array<double, 3>& b, std::array<double, 3>& x) {
  const double det =
      a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
      a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
      a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (std::abs(det) < 1e-14) return false;
  const auto det_col = [&](int col) {
    auto m = a;
    for (int r = 0; r < 3; ++r) m[r][col] = b[r];
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  for (int c = 0; c < 3; ++c) x[c] = det_col(c) / det;
  return true;
}

// Unconstrained normal-equation solution of min 1/2 ||H v - y||^2 computed
// with hand-rolled accumulation and Cramer's rule.
inline bool normal_equation_solve(const std::vector<Vec3>& directions,
                                  const std::vector<double>& rhs, Vec3& out) {
  std::array<std::array<double, 3>, 3> a{};
  std::array<double, 3> b{};
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const Vec3& d = directions[i];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += d[r] * d[c];
      b[r] += d[r] * rhs[i];
    }
  }
  std::array<double, 3> x{};
  if (!solve3(a, b, x)) return false;
  out = Vec3(x[0], x[1], x[2]);
  return true;
}

inline double objective(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                        const Vec3& v) {
  return 0.5 * (H * v - y).squaredNorm();
}

// Exhaustive box-LSQ oracle: every axis is enumerated as free / at lower /
// at upper (27 combinations); each equality-constrained subproblem is solved
// by Gaussian elimination on the reduced normal system and the feasible
// minimum wins.
inline std::optional<Vec3> box_lsq_bruteforce(const Eigen::MatrixXd& H,
                                              const Eigen::VectorXd& y,
                                              const Vec3& lower,
                                              const Vec3& upper) {
  // Normal system accumulated by hand.
  std::array<std::array<double, 3>, 3> a{};
  std::array<double, 3> b{};
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += H(i, r) * H(i, c);
      b[r] += H(i, r) * y(i);
    }
  }

  std::optional<Vec3> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int combo = 0; combo < 27; ++combo) {
    int state[3];
    int code = combo;
    for (int i = 0; i < 3; ++i) {
      state[i] = code % 3;  // 0 free, 1 lower, 2 upper
      code /= 3;
    }
    Vec3 x = Vec3::Zero();
    std::vector<int> free_axes;
    for (int i = 0; i < 3; ++i) {
      if (state[i] == 1) x[i] = lower[i];
      else if (state[i] == 2) x[i] = upper[i];
      else free_axes.push_back(i);
    }

    // Reduced system over the free axes, solved by Gaussian elimination
    // with partial pivoting.
    const int m = static_cast<int>(free_axes.size());
    if (m > 0) {
      double mat[3][4];
      for (int r = 0; r < m; ++r) {
        const int ri = free_axes[r];
        double rhs = b[ri];
        for (int i = 0; i < 3; ++i) {
          if (state[i] != 0) rhs -= a[ri][i] * x[i];
        }
        for (int c = 0; c < m; ++c) mat[r][c] = a[ri][free_axes[c]];
        mat[r][m] = rhs;
      }
      bool singular = false;
      for (int col = 0; col < m && !singular; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r) {
          if (std::abs(mat[r][col]) > std::abs(mat[pivot][col])) pivot = r;
        }
        if (std::abs(mat[pivot][col]) < 1e-13) {
          singular = true;
          break;
        }
        for (int c = 0; c <= m; ++c) std::swap(mat[col][c], mat[pivot][c]);
        for (int r = 0; r < m; ++r) {
          if (r == col) continue;
          const double f = mat[r][col] / mat[col][col];
          for (int c = col; c <= m; ++c) mat[r][c] -= f * mat[col][c];
        }
      }
      if (singular) continue;
      for (int r = 0; r < m; ++r) x[free_axes[r]] = mat[r][m] / mat[r][r];
    }

    bool feasible = true;
    for (int i = 0; i < 3; ++i) {
      if (x[i] < lower[i] - 1e-9 || x[i] > upper[i] + 1e-9) feasible = false;
    }
    if (!feasible) continue;
    const double obj = objective(H, y, x);
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

// Direct-summation per-axis RMSE over already-paired samples.
inline Vec3 rmse_direct(const std::vector<Vec3>& est,
                        const std::vector<Vec3>& gt) {
  Vec3 acc = Vec3::Zero();
  for (std::size_t i = 0; i < est.size(); ++i) {
    const Vec3 e = est[i] - gt[i];
    acc += Vec3(e.x() * e.x(), e.y() * e.y(), e.z() * e.z());
  }
  acc /= static_cast<double>(est.size());
  return Vec3(std::sqrt(acc.x()), std::sqrt(acc.y()), std::sqrt(acc.z()));
}

inline Vec3 random_unit(creve::SplitMix64& rng) {
  for (;;) {
    const Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double n = v.norm();
    if (n > 1e-3 && n <= 1.0) return v / n;
  }
}

inline creve::Rotation random_rotation(creve::SplitMix64& rng) {
  return creve::Rotation(rng.uniform(-1, 1), rng.uniform(-1, 1),
                         rng.uniform(-1, 1), rng.uniform(-1, 1));
}

// Targets consistent with a planted radar-frame velocity (exact forward
// model), directions spread over the sphere so the geometry is well posed.
inline std::vector<creve::RadarTarget> planted_targets(
    creve::SplitMix64& rng, const Vec3& velocity, int count) {
  std::vector<creve::RadarTarget> targets;
  targets.reserve(count);
  for (int i = 0; i < count; ++i) {
    const Vec3 dir = random_unit(rng);
    const double range = rng.uniform(1.0, 30.0);
    targets.push_back({range * dir, -dir.dot(velocity)});
  }
  return targets;
}

}  // namespace oracle
