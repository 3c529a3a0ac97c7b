#include "creve/box_lsq.hpp"

#include <cmath>
#include <limits>

namespace creve {
namespace {

constexpr double kKktTol = 1e-9;
constexpr double kFeasTol = 1e-9;
constexpr int kMaxActiveSetChanges = 64;

double kkt_residual_at(const Mat3& normal, const Vec3& rhs, const Vec3& x,
                       const std::array<AxisBound, 3>& bound) {
  const Vec3 g = normal * x - rhs;
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    double viol = 0.0;
    switch (bound[i]) {
      case AxisBound::interior: viol = std::abs(g[i]); break;
      case AxisBound::at_lower: viol = std::max(0.0, -g[i]); break;
      case AxisBound::at_upper: viol = std::max(0.0, g[i]); break;
    }
    worst = std::max(worst, viol);
  }
  return worst;
}

// Minimum-norm solution of the (consistent) normal system restricted to the
// free axes, with bound axes held at their current values.
Vec3 solve_free(const Mat3& normal, const Vec3& rhs, const Vec3& x,
                const std::array<AxisBound, 3>& bound) {
  int free_idx[3];
  int m = 0;
  for (int i = 0; i < 3; ++i) {
    if (bound[i] == AxisBound::interior) free_idx[m++] = i;
  }
  Vec3 out = x;
  if (m == 0) return out;

  Eigen::MatrixXd sub(m, m);
  Eigen::VectorXd r(m);
  for (int a = 0; a < m; ++a) {
    r(a) = rhs[free_idx[a]];
    for (int b = 0; b < m; ++b) sub(a, b) = normal(free_idx[a], free_idx[b]);
    for (int j = 0; j < 3; ++j) {
      if (bound[j] != AxisBound::interior) r(a) -= normal(free_idx[a], j) * x[j];
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
  const Eigen::VectorXd sol = cod.solve(r);
  for (int a = 0; a < m; ++a) out[free_idx[a]] = sol(a);
  return out;
}

}  // namespace

BoxConstraint::BoxConstraint(const Vec3& lo, const Vec3& up)
    : lower(lo), upper(up) {
  if (!lo.allFinite() || !up.allFinite()) {
    throw InvalidInputError("box constraint: non-finite bound");
  }
  if ((lo.array() > up.array()).any()) {
    throw InvalidInputError("box constraint: lower exceeds upper");
  }
}

BoxLsqSolution solve_box_lsq(const Eigen::MatrixXd& H,
                             const Eigen::VectorXd& y,
                             const BoxConstraint& box) {
  if (H.rows() < 1 || H.cols() != 3 || y.size() != H.rows()) {
    throw InvalidInputError("solve_box_lsq: H must be Nx3 with matching y");
  }
  if (!H.allFinite() || !y.allFinite()) {
    throw InvalidInputError("solve_box_lsq: non-finite input");
  }

  const Mat3 normal = H.transpose() * H;
  const Vec3 rhs = H.transpose() * y;

  Eigen::SelfAdjointEigenSolver<Mat3> eig(normal);
  const double lam_max = eig.eigenvalues().maxCoeff();
  const bool degenerate =
      lam_max <= 0.0 || eig.eigenvalues().minCoeff() <= lam_max * 1e-12;

  // Warm start: unconstrained (min-norm) optimum clipped to the box, bound
  // axes taken from the clipping.
  std::array<AxisBound, 3> bound = {AxisBound::interior, AxisBound::interior,
                                    AxisBound::interior};
  Vec3 x = solve_free(normal, rhs, Vec3::Zero(), bound);
  for (int i = 0; i < 3; ++i) {
    if (x[i] < box.lower[i]) {
      x[i] = box.lower[i];
      bound[i] = AxisBound::at_lower;
    } else if (x[i] > box.upper[i]) {
      x[i] = box.upper[i];
      bound[i] = AxisBound::at_upper;
    }
  }

  int changes = 0;
  while (changes <= kMaxActiveSetChanges) {
    const Vec3 target = solve_free(normal, rhs, x, bound);

    // Step length to stay inside the box on the free axes.
    double alpha = 1.0;
    int blocker = -1;
    for (int i = 0; i < 3; ++i) {
      if (bound[i] != AxisBound::interior) continue;
      double frac = 1.0;
      if (target[i] > box.upper[i] + kFeasTol) {
        frac = (box.upper[i] - x[i]) / (target[i] - x[i]);
      } else if (target[i] < box.lower[i] - kFeasTol) {
        frac = (box.lower[i] - x[i]) / (target[i] - x[i]);
      }
      if (frac < alpha) {
        alpha = frac;
        blocker = i;
      }
    }
    alpha = std::max(alpha, 0.0);

    if (blocker >= 0) {
      // Blocked: move to the first bound hit, fix the blocking axis plus any
      // other free axis that landed on its offending bound.
      for (int i = 0; i < 3; ++i) {
        if (bound[i] != AxisBound::interior) continue;
        x[i] += alpha * (target[i] - x[i]);
      }
      for (int i = 0; i < 3; ++i) {
        if (bound[i] != AxisBound::interior) continue;
        const bool hit_upper = target[i] > box.upper[i] + kFeasTol &&
                               (i == blocker || x[i] >= box.upper[i] - kFeasTol);
        const bool hit_lower = target[i] < box.lower[i] - kFeasTol &&
                               (i == blocker || x[i] <= box.lower[i] + kFeasTol);
        if (hit_upper) {
          x[i] = box.upper[i];
          bound[i] = AxisBound::at_upper;
          ++changes;
        } else if (hit_lower) {
          x[i] = box.lower[i];
          bound[i] = AxisBound::at_lower;
          ++changes;
        }
      }
      continue;
    }

    // Subproblem optimum is feasible: accept it, then test the bound
    // multipliers.
    for (int i = 0; i < 3; ++i) {
      if (bound[i] == AxisBound::interior) x[i] = box.clamp(target)[i];
    }
    const Vec3 g = normal * x - rhs;
    int release = -1;
    double worst = kKktTol;
    for (int i = 0; i < 3; ++i) {
      if (bound[i] == AxisBound::at_lower && -g[i] > worst) {
        worst = -g[i];
        release = i;
      } else if (bound[i] == AxisBound::at_upper && g[i] > worst) {
        worst = g[i];
        release = i;
      }
    }
    if (release < 0) {
      BoxLsqSolution sol;
      sol.velocity = x;
      sol.active_set = bound;
      sol.iterations = changes;
      sol.kkt_residual = kkt_residual_at(normal, rhs, x, bound);
      sol.degenerate = degenerate;
      return sol;
    }
    bound[release] = AxisBound::interior;
    ++changes;
  }

  throw ConvergenceError("solve_box_lsq: active-set iteration cap exceeded",
                         kkt_residual_at(normal, rhs, x, bound));
}

}  // namespace creve
