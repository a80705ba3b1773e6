#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "robopainter/geometry.hpp"
#include "robopainter/rng.hpp"

using namespace robopainter;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Independent composition of one joint-table row using Eigen's own rotation
// types, for cross-checking the hand-rolled transform chain.
Eigen::Isometry3d naive_row(double alpha, double d, double theta, double r) {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  T.rotate(Eigen::AngleAxisd(alpha, Eigen::Vector3d::UnitX()));
  T.translate(Eigen::Vector3d(d, 0, 0));
  T.rotate(Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitZ()));
  T.translate(Eigen::Vector3d(0, 0, r));
  return T;
}
}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("elementary rotations act as expected") {
  const Eigen::Vector3d ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1);
  CHECK((rot_z(kPi / 2) * ex - ey).norm() < 1e-15);
  CHECK((rot_x(kPi / 2) * ey - ez).norm() < 1e-15);
  Rng rng(42);
  for (int i = 0; i < 20; ++i) {
    const double a = rng.uniform(-kPi, kPi);
    const Eigen::Matrix3d R = rot_x(a) * rot_z(a);
    CHECK((R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(R.determinant() - 1.0) < 1e-14);
  }
}

TEST_CASE("transform compose and inverse are consistent") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    Transform a, b;
    a.R = rot_x(rng.uniform(-3, 3)) * rot_z(rng.uniform(-3, 3));
    a.p = Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    b.R = rot_z(rng.uniform(-3, 3)) * rot_x(rng.uniform(-3, 3));
    b.p = Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));

    const Transform ab = a * b;
    const Eigen::Vector3d x(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    CHECK((ab.apply(x) - a.apply(b.apply(x))).norm() < 1e-12);

    const Transform id = ab * ab.inverse();
    CHECK((id.R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(id.p.norm() < 1e-12);
  }
}

TEST_CASE("long composition chains stay orthonormal") {
  Rng rng(99);
  Transform t;
  for (int i = 0; i < 20000; ++i) {
    Transform step;
    step.R = rot_x(rng.uniform(-0.2, 0.2)) * rot_z(rng.uniform(-0.2, 0.2));
    step.p = Eigen::Vector3d(0.01, 0, 0);
    t = t * step;
  }
  CHECK(t.orthonormality_error() < 1e-9);
}

TEST_CASE("renormalize projects back to a proper rotation") {
  Transform t;
  t.R = rot_z(0.3);
  t.R(0, 0) += 1e-4;  // knock it off the manifold
  REQUIRE(t.orthonormality_error() > 1e-5);
  t.renormalize();
  CHECK(t.orthonormality_error() < 1e-12);
  CHECK(std::abs(t.R.determinant() - 1.0) < 1e-12);
}

TEST_CASE("joint-table row composes RotX TransX RotZ TransZ in that order") {
  // second arm row: alpha = -pi/2, d = 0.0784, r = 0.0644
  KKRow row{-kPi / 2, 0.0784, 0.0, 0.0644, 2};
  const Transform t = kk_transform(row, 0.0);
  // RotX(-pi/2) sends +z to +y, so the TransZ offset lands on the y axis
  CHECK((t.p - Eigen::Vector3d(0.0784, 0.0644, 0.0)).norm() < 1e-15);
  CHECK((t.R - rot_x(-kPi / 2)).cwiseAbs().maxCoeff() < 1e-15);

  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    KKRow rr{rng.uniform(-3, 3), rng.uniform(-1, 1), rng.uniform(-3, 3), rng.uniform(-1, 1), 1};
    const double q = rng.uniform(-3, 3);
    const Transform got = kk_transform(rr, q);
    const Eigen::Isometry3d want = naive_row(rr.alpha, rr.d, rr.theta_offset + q, rr.r);
    CHECK((got.R - want.rotation()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((got.p - want.translation()).norm() < 1e-13);
  }
}

}  // TEST_SUITE
