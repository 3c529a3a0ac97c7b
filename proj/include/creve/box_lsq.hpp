#pragma once

#include <Eigen/Dense>
#include <array>

#include "creve/core.hpp"

namespace creve {

// Elementwise velocity bounds [lower, upper].
struct BoxConstraint {
  BoxConstraint(const Vec3& lower, const Vec3& upper);

  Vec3 lower;
  Vec3 upper;

  Vec3 center() const { return 0.5 * (lower + upper); }
  Vec3 clamp(const Vec3& v) const {
    return v.cwiseMax(lower).cwiseMin(upper);
  }
  bool contains(const Vec3& v, double tol = 0.0) const {
    return (v.array() >= lower.array() - tol).all() &&
           (v.array() <= upper.array() + tol).all();
  }
};

enum class AxisBound { interior, at_lower, at_upper };

struct BoxLsqSolution {
  Vec3 velocity = Vec3::Zero();
  std::array<AxisBound, 3> active_set = {AxisBound::interior,
                                         AxisBound::interior,
                                         AxisBound::interior};
  int iterations = 0;       // active-set changes
  double kkt_residual = 0;  // max KKT violation at the returned point
  bool degenerate = false;  // normal matrix rank < 3; minimizer may be non-unique
};

// Global minimizer of  1/2 ||H v - y||^2  subject to  lower <= v <= upper.
//
// Primal active-set method specialized to 3 bounded variables, warm-started
// from the unconstrained solution clipped to the box. KKT conditions at the
// result, with g = H^T (H v - y):
//   interior axis:  |g_i| <= 1e-9
//   v_i = lower_i:   g_i >= -1e-9
//   v_i = upper_i:   g_i <=  1e-9
// Rank-deficient H keeps a minimizer (the box is bounded); ties are broken
// by minimum-norm subproblem solutions and the degenerate flag is set.
//
// Throws InvalidInputError on non-finite or mis-shaped input and
// ConvergenceError if 64 active-set changes do not reach a KKT point.
BoxLsqSolution solve_box_lsq(const Eigen::MatrixXd& H,
                             const Eigen::VectorXd& y,
                             const BoxConstraint& box);

}  // namespace creve
