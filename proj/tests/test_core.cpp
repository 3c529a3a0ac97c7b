#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "creve/core.hpp"
#include "creve/rng.hpp"
#include "oracles.hpp"

using namespace creve;

namespace {
constexpr double kPi = 3.141592653589793;
}

TEST_CASE("skew matrix implements the cross product") {
  CHECK((skew(Vec3(0, 0, 1)) * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() == 0.0);
  CHECK(skew(Vec3::Zero()).isZero(0.0));
  const Mat3 s = skew(Vec3(1, 2, 3));
  CHECK((s.transpose() + s).isZero(0.0));

  SplitMix64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    const Vec3 b(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    CHECK((skew(a) * b - a.cross(b)).norm() < 1e-12);
    CHECK((skew(a) * b + skew(b) * a).norm() < 1e-12);
  }
}

TEST_CASE("rotation construction renormalizes and validates") {
  const Rotation r(2.0, 0.0, 0.0, 0.0);  // unnormalized identity
  CHECK(r.quaternion().norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(Rotation(0, 0, 0, 0), InvalidInputError);
  const double nan = std::nan("");
  CHECK_THROWS_AS(Rotation(nan, 0, 0, 1), InvalidInputError);

  SplitMix64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Rotation q = oracle::random_rotation(rng);
    const Mat3 m = q.matrix();
    CHECK((m * m.transpose() - Mat3::Identity()).norm() < 1e-9);
    CHECK(m.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((q * q.inverse()).angle_to(Rotation()) < 1e-9);
  }
}

TEST_CASE("rotate preserves norms and matches axis conventions") {
  CHECK((rotate(Rotation(), Vec3(1, 2, 3)) - Vec3(1, 2, 3)).norm() == 0.0);
  // NED yaw +90 deg takes north to east.
  const Rotation yaw90 = Rotation::from_yaw(kPi / 2);
  CHECK((rotate(yaw90, Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() < 1e-12);

  SplitMix64 rng(13);
  for (int i = 0; i < 100; ++i) {
    const Rotation r = oracle::random_rotation(rng);
    const Vec3 v(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    CHECK(std::abs(rotate(r, v).norm() - v.norm()) < 1e-9);
    CHECK((rotate(r.inverse(), rotate(r, v)) - v).norm() < 1e-12);
  }
}

TEST_CASE("rotation composition is associative") {
  SplitMix64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const Rotation a = oracle::random_rotation(rng);
    const Rotation b = oracle::random_rotation(rng);
    const Rotation c = oracle::random_rotation(rng);
    const Vec3 v(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Vec3 left = ((a * b) * c) * v;
    const Vec3 right = (a * (b * c)) * v;
    CHECK((left - right).norm() < 1e-12);
  }
}

TEST_CASE("interpolate_attitude slerps between bracketing samples") {
  std::vector<PoseSample> poses;
  poses.push_back({0.0, Vec3::Zero(), Rotation()});
  poses.push_back({1.0, Vec3::Zero(), Rotation::from_yaw(kPi / 2)});
  poses.push_back({2.0, Vec3::Zero(), Rotation::from_yaw(kPi / 2)});

  CHECK(interpolate_attitude(poses, 1.0).angle_to(Rotation::from_yaw(kPi / 2)) <
        1e-12);
  CHECK(interpolate_attitude(poses, 0.5).angle_to(Rotation::from_yaw(kPi / 4)) <
        1e-9);
  CHECK_THROWS_AS(interpolate_attitude(poses, -0.1), OutOfRangeError);
  CHECK_THROWS_AS(interpolate_attitude(poses, 2.1), OutOfRangeError);
  CHECK_THROWS_AS(interpolate_attitude({}, 0.0), InsufficientDataError);
}
