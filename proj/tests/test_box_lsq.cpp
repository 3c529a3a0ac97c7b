#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "creve/box_lsq.hpp"
#include "creve/rng.hpp"
#include "oracles.hpp"

using namespace creve;

namespace {

// KKT check with g = H^T (H v - y).
bool kkt_holds(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
               const BoxLsqSolution& sol, const BoxConstraint& box,
               double tol = 1e-7) {
  const Vec3 g = H.transpose() * (H * sol.velocity - y);
  for (int i = 0; i < 3; ++i) {
    const double v = sol.velocity[i];
    if (std::abs(v - box.lower[i]) <= 1e-9) {
      if (g[i] < -tol) return false;
    } else if (std::abs(v - box.upper[i]) <= 1e-9) {
      if (g[i] > tol) return false;
    } else {
      if (std::abs(g[i]) > tol) return false;
    }
  }
  return true;
}

struct RandomInstance {
  Eigen::MatrixXd H;
  Eigen::VectorXd y;
  BoxConstraint box;
};

RandomInstance random_instance(SplitMix64& rng, int rows) {
  Eigen::MatrixXd H(rows, 3);
  Eigen::VectorXd y(rows);
  for (int i = 0; i < rows; ++i) {
    const Vec3 d = oracle::random_unit(rng);
    H.row(i) = d.transpose();
    y(i) = rng.uniform(-3, 3);
  }
  // Box placed around a random center so the unconstrained optimum is often
  // excluded.
  const Vec3 center(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
  const Vec3 half(rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0),
                  rng.uniform(0.05, 1.0));
  return {H, y, BoxConstraint(center - half, center + half)};
}

}  // namespace

TEST_CASE("unconstrained optimum inside the box passes through") {
  const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd y(3);
  y << 1, 2, 3;
  const BoxConstraint box(Vec3(-10, -10, -10), Vec3(10, 10, 10));
  const BoxLsqSolution sol = solve_box_lsq(H, y, box);
  CHECK((sol.velocity - Vec3(1, 2, 3)).norm() < 1e-12);
  for (int i = 0; i < 3; ++i) CHECK(sol.active_set[i] == AxisBound::interior);
  CHECK(!sol.degenerate);
  CHECK(sol.kkt_residual < 1e-9);
}

TEST_CASE("diagonal system clips exactly at the violated bound") {
  const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd y(3);
  y << 5, 0, 0;
  const BoxConstraint box(Vec3(-10, -10, -10), Vec3(2, 10, 10));
  const BoxLsqSolution sol = solve_box_lsq(H, y, box);
  CHECK((sol.velocity - Vec3(2, 0, 0)).norm() < 1e-12);
  CHECK(sol.active_set[0] == AxisBound::at_upper);
  CHECK(sol.active_set[1] == AxisBound::interior);
  CHECK(sol.active_set[2] == AxisBound::interior);
}

TEST_CASE("matches the exhaustive 27-combination oracle") {
  SplitMix64 rng(101);
  int checked = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    const RandomInstance inst = random_instance(rng, 20);
    const auto expected =
        oracle::box_lsq_bruteforce(inst.H, inst.y, inst.box.lower, inst.box.upper);
    REQUIRE(expected.has_value());
    const BoxLsqSolution sol = solve_box_lsq(inst.H, inst.y, inst.box);
    CHECK((sol.velocity - *expected).norm() < 1e-8);
    CHECK(inst.box.contains(sol.velocity, 1e-9));
    ++checked;
  }
  CHECK(checked == 1200);
}

TEST_CASE("objective beats random feasible points") {
  SplitMix64 rng(303);
  for (int trial = 0; trial < 20; ++trial) {
    const RandomInstance inst = random_instance(rng, 15);
    const BoxLsqSolution sol = solve_box_lsq(inst.H, inst.y, inst.box);
    const double best = oracle::objective(inst.H, inst.y, sol.velocity);
    for (int i = 0; i < 1000; ++i) {
      const Vec3 p(rng.uniform(inst.box.lower.x(), inst.box.upper.x()),
                   rng.uniform(inst.box.lower.y(), inst.box.upper.y()),
                   rng.uniform(inst.box.lower.z(), inst.box.upper.z()));
      CHECK(best <= oracle::objective(inst.H, inst.y, p) + 1e-9);
    }
  }
}

TEST_CASE("consistency: feasible unconstrained optimum is returned unchanged") {
  SplitMix64 rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd H(12, 3);
    Eigen::VectorXd y(12);
    const Vec3 planted(rng.uniform(-1, 1), rng.uniform(-1, 1),
                       rng.uniform(-1, 1));
    for (int i = 0; i < 12; ++i) {
      const Vec3 d = oracle::random_unit(rng);
      H.row(i) = d.transpose();
      y(i) = d.dot(planted) + rng.uniform(-0.01, 0.01);
    }
    // Wide box that certainly contains the optimum.
    const BoxConstraint box(planted - Vec3(5, 5, 5), planted + Vec3(5, 5, 5));
    const BoxLsqSolution sol = solve_box_lsq(H, y, box);
    Vec3 unconstrained;
    std::vector<Vec3> dirs;
    std::vector<double> rhs;
    for (int i = 0; i < 12; ++i) {
      dirs.push_back(H.row(i).transpose());
      rhs.push_back(y(i));
    }
    REQUIRE(oracle::normal_equation_solve(dirs, rhs, unconstrained));
    CHECK((sol.velocity - unconstrained).norm() < 1e-9);
  }
}

TEST_CASE("enlarging the box never increases the optimal objective") {
  SplitMix64 rng(505);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomInstance inst = random_instance(rng, 10);
    const BoxLsqSolution tight = solve_box_lsq(inst.H, inst.y, inst.box);
    const Vec3 grow(rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1));
    const BoxConstraint wider(inst.box.lower - grow, inst.box.upper + grow);
    const BoxLsqSolution wide = solve_box_lsq(inst.H, inst.y, wider);
    CHECK(oracle::objective(inst.H, inst.y, wide.velocity) <=
          oracle::objective(inst.H, inst.y, tight.velocity) + 1e-9);
  }
}

TEST_CASE("rank-deficient systems still return a feasible KKT point") {
  SplitMix64 rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    // One or two rows: rank < 3 by construction.
    const int rows = 1 + static_cast<int>(rng.below(2));
    Eigen::MatrixXd H(rows, 3);
    Eigen::VectorXd y(rows);
    for (int i = 0; i < rows; ++i) {
      H.row(i) = oracle::random_unit(rng).transpose();
      y(i) = rng.uniform(-2, 2);
    }
    const RandomInstance helper = random_instance(rng, 3);
    const BoxConstraint& box = helper.box;
    const BoxLsqSolution sol = solve_box_lsq(H, y, box);
    CHECK(sol.degenerate);
    CHECK(box.contains(sol.velocity, 1e-9));
    CHECK(kkt_holds(H, y, sol, box));
  }
}

TEST_CASE("KKT conditions hold at every returned point") {
  SplitMix64 rng(707);
  for (int trial = 0; trial < 300; ++trial) {
    const RandomInstance inst = random_instance(rng, 8);
    const BoxLsqSolution sol = solve_box_lsq(inst.H, inst.y, inst.box);
    CHECK(kkt_holds(inst.H, inst.y, sol, inst.box));
    CHECK(sol.kkt_residual < 1e-7);
  }
}

TEST_CASE("input validation") {
  const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd y(3);
  y << 1, 2, 3;
  CHECK_THROWS_AS(BoxConstraint(Vec3(1, 0, 0), Vec3(0, 1, 1)),
                  InvalidInputError);
  Eigen::VectorXd bad = y;
  bad(0) = std::nan("");
  CHECK_THROWS_AS(
      solve_box_lsq(H, bad, BoxConstraint(Vec3(-1, -1, -1), Vec3(1, 1, 1))),
      InvalidInputError);
  Eigen::MatrixXd empty(0, 3);
  Eigen::VectorXd empty_y(0);
  CHECK_THROWS_AS(
      solve_box_lsq(empty, empty_y,
                    BoxConstraint(Vec3(-1, -1, -1), Vec3(1, 1, 1))),
      InvalidInputError);
}
