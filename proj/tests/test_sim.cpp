#include <doctest.h>

#include <cmath>
#include <vector>

#include "robopainter/dynamics.hpp"
#include "robopainter/kinematics.hpp"
#include "robopainter/sim.hpp"
#include "robopainter/trajectory.hpp"
#include "test_support.hpp"

using namespace robopainter;

namespace {
constexpr double kPi = 3.14159265358979323846;

const ArmDynamics& arm() {
  static const ArmDynamics dyn(testsupport::params());
  return dyn;
}

double total_energy(const ArmDynamics& dyn, const ArmState& s) {
  const Eigen::ArrayXd rotor = dyn.rotor_inertia().array();
  const double rotor_ke = 0.5 * (rotor * s.qd.array().square()).sum();
  return dyn.kinetic_energy(s.q, s.qd) + rotor_ke + dyn.potential_energy(s.q);
}

ArmState swing_start() {
  ArmState s;
  s.q << 0.3, -0.7, 1.1, 0.4, -0.8, 0.2;
  s.qd << 0.5, -0.4, 0.8, -0.3, 0.6, -0.2;
  return s;
}

// free swing drift (no friction, no spray) over `T` seconds at step `dt`
double swing_drift(double dt, double T, Integrator integ) {
  const ArmPlant plant(arm(), nullptr, FrictionParams{0.0, 0.0});
  ArmState s = swing_start();
  const double e0 = total_energy(arm(), s);
  const int n = static_cast<int>(std::round(T / dt));
  for (int i = 0; i < n; ++i) s = plant.step(s, Vector6d::Zero(), i * dt, false, dt, integ);
  return std::abs(total_energy(arm(), s) - e0);
}
}  // namespace

TEST_SUITE("sim") {

TEST_CASE("holding the gravity torque keeps the arm exactly still") {
  const ArmPlant plant(arm(), nullptr, FrictionParams{0.0, 0.0});
  ArmState s;
  s.q << 0.2, -0.4, 0.9, 0.1, -0.3, 0.5;
  const Vector6d q0 = s.q;
  const Vector6d tau_hold = arm().gravity_torque(s.q);
  for (int i = 0; i < 1000; ++i)
    s = plant.step(s, tau_hold, i * 1e-3, false, 1e-3, Integrator::RK4);
  CHECK((s.q - q0).norm() < 1e-12);
  CHECK(s.qd.norm() < 1e-12);
}

TEST_CASE("free-swing energy drifts below 1e-4 J at the mission step size") {
  CHECK(swing_drift(1e-3, 1.0, Integrator::RK4) < 2e-5);
}

TEST_CASE("energy drift shrinks at fourth order in the step size") {
  const double d8 = swing_drift(8e-3, 1.0, Integrator::RK4);
  const double d4 = swing_drift(4e-3, 1.0, Integrator::RK4);
  const double d2 = swing_drift(2e-3, 1.0, Integrator::RK4);
  const double order_a = std::log2(d8 / d4);
  const double order_b = std::log2(d4 / d2);
  CHECK(order_a > 3.2);
  CHECK(order_b > 3.2);
  CHECK(order_a < 5.5);
  CHECK(order_b < 5.5);
}

TEST_CASE("the symplectic fallback stays bounded but is visibly coarser") {
  const double drift = swing_drift(1e-3, 1.0, Integrator::SemiImplicitEuler);
  CHECK(drift < 0.5);
  CHECK(drift > swing_drift(1e-3, 1.0, Integrator::RK4));
}

TEST_CASE("single-joint swing matches the analytic pendulum period to 0.1%") {
  const ArmDynamics& dyn = arm();

  // With every other joint frozen at zero, the links distal to the shoulder
  // rotate rigidly: the potential is a single cosine in q2 and the diagonal
  // inertia M22 is constant. Locate the stable equilibrium by bisection on
  // the gravity torque.
  auto g2 = [&](double q2) {
    Vector6d q = Vector6d::Zero();
    q[1] = q2;
    return dyn.gravity_torque(q)[1];
  };
  double lo = -kPi, hi = kPi;
  bool found = false;
  for (double a = -kPi; a < kPi && !found; a += 0.01) {
    const double b = a + 0.01;
    if (g2(a) < 0.0 && g2(b) >= 0.0) {  // crossing with positive slope: a minimum
      lo = a;
      hi = b;
      found = true;
    }
  }
  REQUIRE(found);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g2(mid) < 0.0 ? lo : hi) = mid;
  }
  const double q2_eq = 0.5 * (lo + hi);

  Vector6d q_eq = Vector6d::Zero();
  q_eq[1] = q2_eq;
  const double m22 = dyn.mass_matrix(q_eq)(1, 1);
  const double h = 1e-5;
  const double stiffness = (g2(q2_eq + h) - g2(q2_eq - h)) / (2 * h);
  REQUIRE(stiffness > 0.0);
  const double period_lin = 2.0 * kPi * std::sqrt(m22 / stiffness);

  // integrate the one-degree-of-freedom swing and time two upward crossings
  const double amp = 0.01;
  double q2 = q2_eq + amp, qd2 = 0.0;
  const double dt = 1e-3;
  auto accel = [&](double pos) { return -g2(pos) / m22; };
  double t = 0.0, first_cross = -1.0, second_cross = -1.0;
  double prev_q = q2, prev_t = 0.0;
  for (int i = 0; i < 200000 && second_cross < 0.0; ++i) {
    // classic fourth-order step on (q2, qd2)
    const double k1q = qd2, k1v = accel(q2);
    const double k2q = qd2 + 0.5 * dt * k1v, k2v = accel(q2 + 0.5 * dt * k1q);
    const double k3q = qd2 + 0.5 * dt * k2v, k3v = accel(q2 + 0.5 * dt * k2q);
    const double k4q = qd2 + dt * k3v, k4v = accel(q2 + dt * k3q);
    prev_q = q2;
    prev_t = t;
    q2 += dt / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
    qd2 += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    t += dt;
    if (prev_q < q2_eq && q2 >= q2_eq && qd2 > 0.0) {
      const double frac = (q2_eq - prev_q) / (q2 - prev_q);
      const double t_cross = prev_t + frac * dt;
      if (first_cross < 0.0) {
        first_cross = t_cross;
      } else {
        second_cross = t_cross;
      }
    }
  }
  REQUIRE(second_cross > 0.0);
  const double period_sim = second_cross - first_cross;
  CHECK(std::abs(period_sim - period_lin) / period_lin < 1e-3);
}

TEST_CASE("computed torque with zero error reduces to inverse dynamics") {
  const ArmDynamics& dyn = arm();
  const Gains g;
  ArmState s;
  s.q << 0.4, -0.6, 0.8, 0.3, -0.5, 0.7;
  s.qd << 0.2, 0.1, -0.3, 0.4, -0.1, 0.2;
  Vector6d qdd_ref;
  qdd_ref << 1.0, -2.0, 0.5, -0.5, 1.5, -1.0;
  const Vector6d via_ctl = computed_torque(dyn, s, s.q, s.qd, qdd_ref, g);
  const Vector6d via_id = dyn.inverse_dynamics(s.q, s.qd, qdd_ref);
  CHECK((via_ctl - via_id).norm() < 1e-7 * std::max(1.0, via_id.norm()));
}

TEST_CASE("set-point errors decay to the friction-limited band") {
  const RobotParams& p = testsupport::params();
  const ArmPlant plant(arm(), nullptr, p.friction);
  const Gains g;
  Vector6d q_ref;
  q_ref << 0.3, -0.5, 0.9, 0.2, -0.6, 0.4;
  ArmState s;
  s.q = q_ref + Vector6d::Constant(0.05);
  const double dt = 1e-3;
  // Inside the velocity-smoothed Coulomb zone the loop degenerates to an
  // overdamped crawl with rate kp * M_ii * eps / coulomb (~0.25/s for the
  // lightest wrist joint), so the last fraction of a degree takes seconds.
  for (int i = 0; i < 10000; ++i) {
    const Vector6d tau = computed_torque(arm(), s, q_ref, Vector6d::Zero(), Vector6d::Zero(), g);
    s = plant.step(s, tau, i * dt, false, dt, Integrator::RK4);
  }
  for (int i = 0; i < 6; ++i) CHECK(std::abs(s.q[i] - q_ref[i]) < 5e-4);
  CHECK(s.qd.norm() < 5e-3);
}

TEST_CASE("tip tracks a stroke-like joint move within 5 mm despite the gun load") {
  const RobotParams& p = testsupport::params();
  const ArmDynamics& dyn = arm();
  const ArmKinematics& kin = dyn.kinematics();
  const SprayDisturbance spray(p, 77);
  const ArmPlant plant(dyn, &spray, p.friction);
  const Gains g;

  Vector6d q0, q1;
  q0 << 0.2, -0.8, 1.2, 0.1, -0.4, 0.3;
  q1 << -0.3, -0.2, 0.6, 0.5, 0.2, -0.4;
  const double T = 5.0;
  std::vector<QuinticSegment> segs;
  for (int i = 0; i < 6; ++i) segs.push_back(quintic_segment(q0[i], q1[i], T));

  ArmState s;
  s.q = q0;
  const double dt = 1e-3;
  double worst_tip = 0.0;
  for (int i = 0; i * dt < T; ++i) {
    const double t = i * dt;
    Vector6d q_ref, qd_ref, qdd_ref;
    for (int j = 0; j < 6; ++j) {
      const QuinticSample smp = sample(segs[static_cast<std::size_t>(j)], t);
      q_ref[j] = smp.position;
      qd_ref[j] = smp.velocity;
      qdd_ref[j] = smp.acceleration;
    }
    const Vector6d tau = computed_torque(dyn, s, q_ref, qd_ref, qdd_ref, g);
    s = plant.step(s, tau, t, /*spray_on=*/true, dt, Integrator::RK4);
    if (i % 10 == 0) {
      const double tip_err = (kin.fk(s.q).p - kin.fk(q_ref).p).norm();
      worst_tip = std::max(worst_tip, tip_err);
    }
  }
  CHECK(worst_tip < 5e-3);
}

TEST_CASE("torque-driven base reaches commanded speeds while honouring the rolling constraints") {
  const RobotParams& p = testsupport::params();
  const BaseDynamics dyn(p);
  const BasePlant plant(dyn, p);
  BaseSimState s;
  s.q[base_coord::kBeta1] = kPi;
  s.q[base_coord::kBeta2] = kPi;
  const Eigen::Vector2d u_ref(0.4, 0.3);
  const double dt = 1e-3;
  double worst_residual = 0.0;
  for (int i = 0; i < 1500; ++i) {
    const Eigen::Vector2d tau =
        base_wheel_torques(dyn, s, u_ref, Eigen::Vector2d::Zero(), 20.0, p);
    s = plant.step(s, tau, dt, Integrator::RK4);
    worst_residual = std::max(worst_residual, plant.constraint_residual(s));
  }
  CHECK((s.u - u_ref).norm() < 0.01);
  CHECK(worst_residual < 1e-9);
}

TEST_CASE("a coasting base conserves its reduced kinetic energy") {
  const RobotParams& p = testsupport::params();
  const BaseDynamics dyn(p);
  const BasePlant plant(dyn, p);
  BaseSimState s;
  s.q[base_coord::kBeta1] = 2.8;  // deliberately off-trailing so the castors swing
  s.q[base_coord::kBeta2] = -3.0;
  s.u = Eigen::Vector2d(0.6, 0.4);
  const auto ke = [&](const BaseSimState& st) {
    return dyn.kinetic_energy(st.q, base_mobility_matrix(st.q, p) * st.u);
  };
  const double e0 = ke(s);
  for (int i = 0; i < 2000; ++i) s = plant.step(s, Eigen::Vector2d::Zero(), 1e-3, Integrator::RK4);
  // the castor realignment transient is fast (v/d ~ 30 rad/s); fourth-order
  // integration keeps the energy error well under one part in 1e5
  CHECK(std::abs(ke(s) - e0) < 1e-5 * std::max(1.0, e0));
}

TEST_CASE("kinematic base integration follows exact arcs") {
  const RobotParams& p = testsupport::params();
  BaseSimState s;
  s.q[base_coord::kBeta1] = kPi;
  s.q[base_coord::kBeta2] = kPi;

  SUBCASE("straight drive") {
    for (int i = 0; i < 1000; ++i)
      s = base_kinematic_step(s, Eigen::Vector2d(1.0, 0.0), 1e-3, p);
    CHECK(std::abs(s.q[base_coord::kX] - 1.0) < 1e-9);
    CHECK(std::abs(s.q[base_coord::kY]) < 1e-12);
    CHECK(std::abs(s.q[base_coord::kPhi]) < 1e-12);
    CHECK(std::abs(s.q[base_coord::kBeta1] - kPi) < 1e-9);  // castors keep trailing
    // drive wheels rolled through x / r_f radians
    CHECK(std::abs(s.q[base_coord::kWheel1] - 1.0 / p.geometry.drive_wheel_radius) < 1e-6);
  }

  SUBCASE("turn in place") {
    for (int i = 0; i < 1000; ++i)
      s = base_kinematic_step(s, Eigen::Vector2d(0.0, 0.5), 1e-3, p);
    CHECK(std::abs(s.q[base_coord::kPhi] - 0.5) < 1e-9);
    CHECK(std::abs(s.q[base_coord::kX]) < 1e-9);
    CHECK(std::abs(s.q[base_coord::kY]) < 1e-9);
  }
}

}  // TEST_SUITE
