#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "robopainter/error.hpp"
#include "robopainter/kinematics.hpp"
#include "robopainter/rng.hpp"
#include "test_support.hpp"

using namespace robopainter;

namespace {
constexpr double kPi = 3.14159265358979323846;

Vector6d random_q(Rng& rng, double span = 2.0) {
  Vector6d q;
  for (int i = 0; i < 6; ++i) q[i] = rng.uniform(-span, span);
  return q;
}

// Full-chain forward kinematics rebuilt from the raw table with Eigen's own
// rotation types — an independent route to the same pose.
Eigen::Isometry3d naive_fk(const RobotParams& p, const Vector6d& q) {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  for (const KKRow& row : p.geometry.kk_table) {
    const double theta = row.theta_offset + (row.joint >= 1 ? q[row.joint - 1] : 0.0);
    T.rotate(Eigen::AngleAxisd(row.alpha, Eigen::Vector3d::UnitX()));
    T.translate(Eigen::Vector3d(row.d, 0, 0));
    T.rotate(Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitZ()));
    T.translate(Eigen::Vector3d(0, 0, row.r));
  }
  return T;
}

Vector9d random_base_state(Rng& rng) {
  Vector9d qb;
  for (int i = 0; i < 9; ++i) qb[i] = rng.uniform(-3, 3);
  return qb;
}
}  // namespace

TEST_SUITE("kinematics") {

TEST_CASE("forward kinematics agrees with an independent chain composition") {
  const RobotParams& p = testsupport::params();
  const ArmKinematics kin(p);
  Rng rng(20240611);
  for (int i = 0; i < 50; ++i) {
    const Vector6d q = random_q(rng, kPi);
    const Transform got = kin.fk(q);
    const Eigen::Isometry3d want = naive_fk(p, q);
    CHECK((got.p - want.translation()).norm() < 1e-12);
    CHECK((got.R - want.rotation()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("zero-configuration nozzle position is the sum of the chain offsets") {
  const RobotParams& p = testsupport::params();
  const ArmKinematics kin(p);
  const Transform tip = kin.fk(Vector6d::Zero());
  const auto& g = p.geometry;
  const Eigen::Vector3d expected(g.d1 + g.d3 + g.d4,   // 1.3684
                                 g.rl2 + g.rl4 + g.rl5,  // 0.3498
                                 g.rl1 + g.rl7);         // 1.4015
  CHECK((tip.p - expected).norm() < 1e-12);
  CHECK((tip.p - Eigen::Vector3d(1.3684, 0.3498, 1.4015)).norm() < 1e-12);
}

TEST_CASE("planar elbow span follows the two-link cosine law") {
  const RobotParams& p = testsupport::params();
  const ArmKinematics kin(p);
  const double d3 = p.geometry.d3, d4 = p.geometry.d4;
  // the shoulder-to-wrist vector carries a constant lateral offset along the
  // elbow axis; reach lives in the plane perpendicular to that axis
  const auto planar_span = [&kin](double q3) {
    Vector6d q = Vector6d::Zero();
    q[2] = q3;
    const auto fr = kin.frames(q);
    const Eigen::Vector3d v = fr[4].p - fr[2].p;
    const Eigen::Vector3d axis = fr[2].R.col(2);
    return (v - axis * axis.dot(v)).norm();
  };
  for (double q3 = -2.5; q3 <= 2.5; q3 += 0.25) {
    const double law = std::sqrt(d3 * d3 + d4 * d4 + 2 * d3 * d4 * std::cos(q3));
    CHECK(std::abs(planar_span(q3) - law) < 1e-12);
  }
  // fully stretched: exactly the advertised 1.290 m planar reach
  CHECK(std::abs(planar_span(0.0) - 1.290) < 1e-12);
}

TEST_CASE("geometric jacobian matches finite differences of the pose") {
  const ArmKinematics kin(testsupport::params());
  Rng rng(5150);
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const Vector6d q = random_q(rng);
    const Matrix6d J = kin.jacobian(q);
    const Transform T0 = kin.fk(q);
    for (int i = 0; i < 6; ++i) {
      Vector6d qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const Transform Tp = kin.fk(qp), Tm = kin.fk(qm);
      const Eigen::Vector3d v_fd = (Tp.p - Tm.p) / (2 * h);
      CHECK((J.block<3, 1>(0, i) - v_fd).norm() < 1e-6);
      // angular rate: vee of Rdot R^T
      const Eigen::Matrix3d Rdot = (Tp.R - Tm.R) / (2 * h);
      const Eigen::Matrix3d W = Rdot * T0.R.transpose();
      const Eigen::Vector3d w_fd(W(2, 1), W(0, 2), W(1, 0));
      CHECK((J.block<3, 1>(3, i) - w_fd).norm() < 1e-6);
    }
  }
}

TEST_CASE("inverse kinematics recovers reachable poses") {
  const ArmKinematics kin(testsupport::params());
  Rng rng(8080);
  int converged = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const Vector6d q_true = random_q(rng, 1.4);
    const Transform target = kin.fk(q_true);
    Vector6d seed = q_true;
    for (int i = 0; i < 6; ++i) seed[i] += rng.uniform(-0.2, 0.2);
    const IkResult r = kin.ik(target, seed);
    if (!r.converged) continue;
    ++converged;
    const Transform reached = kin.fk(r.q);
    CHECK((reached.p - target.p).norm() < 2e-6);
    CHECK((reached.R - target.R).cwiseAbs().maxCoeff() < 1e-4);
    CHECK(r.pos_residual < ArmKinematics::kIkTolerance);
  }
  CHECK(converged >= 23);  // damped iteration from a nearby seed must almost always land
}

TEST_CASE("inverse kinematics reports non-convergence for unreachable targets") {
  const ArmKinematics kin(testsupport::params());
  Transform target;
  target.p = Eigen::Vector3d(5.0, 5.0, 5.0);  // far outside the arm's sphere
  const IkResult r = kin.ik(target, Vector6d::Zero());
  CHECK_FALSE(r.converged);
}

TEST_CASE("wheel constraint rows annihilate the mobility columns") {
  const RobotParams& p = testsupport::params();
  Rng rng(31415);
  for (int i = 0; i < 50; ++i) {
    const Vector9d qb = random_base_state(rng);
    const auto J = base_constraint_matrix(qb, p);
    const auto S = base_mobility_matrix(qb, p);
    CHECK((J * S).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("constraint matrix keeps full row rank and a two-dimensional null space") {
  const RobotParams& p = testsupport::params();
  Rng rng(2718);
  for (int i = 0; i < 20; ++i) {
    const Vector9d qb = random_base_state(rng);
    const auto J = base_constraint_matrix(qb, p);
    Eigen::JacobiSVD<Eigen::Matrix<double, 7, 9>> svd(J);
    CHECK(svd.singularValues()(6) > 1e-9);  // rank 7 => null space dim 2
  }
}

TEST_CASE("mobility derivative matches finite differences along the flow") {
  const RobotParams& p = testsupport::params();
  Rng rng(161803);
  const double h = 1e-6;
  for (int i = 0; i < 20; ++i) {
    const Vector9d qb = random_base_state(rng);
    const Eigen::Vector2d u(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vector9d qdot = base_mobility_matrix(qb, p) * u;
    const auto Sp = base_mobility_matrix(qb + h * qdot, p);
    const auto Sm = base_mobility_matrix(qb - h * qdot, p);
    const Eigen::Matrix<double, 9, 2> Sdot_fd = (Sp - Sm) / (2 * h);
    const auto Sdot = base_mobility_matrix_dot(qb, u, p);
    CHECK((Sdot - Sdot_fd).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("trailing castors are an equilibrium of straight driving") {
  const RobotParams& p = testsupport::params();
  Vector9d qb = Vector9d::Zero();
  qb[base_coord::kBeta1] = kPi;
  qb[base_coord::kBeta2] = kPi;
  const auto S = base_mobility_matrix(qb, p);
  // forward column: no steering rate when the wheels already trail
  CHECK(std::abs(S(base_coord::kBeta1, 0)) < 1e-12);
  CHECK(std::abs(S(base_coord::kBeta2, 0)) < 1e-12);
  // drive wheels spin at v / r_f
  CHECK(std::abs(S(base_coord::kWheel1, 0) - 1.0 / p.geometry.drive_wheel_radius) < 1e-12);
  CHECK(std::abs(S(base_coord::kWheel2, 0) - 1.0 / p.geometry.drive_wheel_radius) < 1e-12);
}

TEST_CASE("zero castor trail raises the steering singularity") {
  RobotParams p = testsupport::params();
  p.geometry.castor_trail = 0.0;
  const Vector9d qb = Vector9d::Zero();
  CHECK_THROWS_AS(base_mobility_matrix(qb, p), CastorSingularity);
}

}  // TEST_SUITE
