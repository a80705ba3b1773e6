#include "robopainter/sim.hpp"

#include <cmath>

namespace robopainter {

Vector6d computed_torque(const ArmDynamics& dyn, const ArmState& s, const Vector6d& q_ref,
                         const Vector6d& qd_ref, const Vector6d& qdd_ref, const Gains& g) {
  const Vector6d qdd_cmd = qdd_ref + g.kd * (qd_ref - s.qd) + g.kp * (q_ref - s.q);
  // force recursion + rotor column: equals the energy-route inverse dynamics
  // (cross-checked in tests) at a fraction of the cost for the 1 kHz loop
  return dyn.newton_euler(s.q, s.qd, qdd_cmd) +
         (dyn.rotor_inertia().array() * qdd_cmd.array()).matrix();
}

Eigen::Vector2d base_wheel_torques(const BaseDynamics& dyn, const BaseSimState& s,
                                   const Eigen::Vector2d& u_ref, const Eigen::Vector2d& udot_ff,
                                   double ku, const RobotParams& params) {
  const GeometricParams& geom = params.geometry;
  const auto red = dyn.reduce(s.q, s.u);
  const Eigen::Vector2d udot_cmd = udot_ff + ku * (u_ref - s.u);
  const Eigen::Vector2d rhs = red.M * udot_cmd + red.C * s.u;
  // wheel torques map to the reduced force through B = (1/r_f) [[1, 1], [b, -b]]
  Eigen::Matrix2d B;
  B << 1.0 / geom.drive_wheel_radius, 1.0 / geom.drive_wheel_radius,
      geom.half_track / geom.drive_wheel_radius, -geom.half_track / geom.drive_wheel_radius;
  return B.inverse() * rhs;
}

// ------------------------------------------------------------------- arm ---

ArmPlant::ArmPlant(const ArmDynamics& dyn, const SprayDisturbance* spray,
                   const FrictionParams& friction)
    : dyn_(dyn), spray_(spray), friction_(friction) {}

Vector6d ArmPlant::acceleration(const ArmState& s, const Vector6d& tau, double t,
                                bool spray_on) const {
  const Vector6d fr = friction_torque(s.qd, friction_);
  Vector6d ext = Vector6d::Zero();
  if (spray_ != nullptr) {
    ext = spray_->torque(dyn_.kinematics(), s.q, t, spray_on);
  }
  return dyn_.forward_dynamics(s.q, s.qd, tau, fr, ext);
}

ArmState ArmPlant::step(const ArmState& s, const Vector6d& tau, double t, bool spray_on, double dt,
                        Integrator integrator) const {
  if (integrator == Integrator::SemiImplicitEuler) {
    ArmState out;
    const Vector6d a = acceleration(s, tau, t, spray_on);
    out.qd = s.qd + dt * a;
    out.q = s.q + dt * out.qd;
    return out;
  }
  // classic RK4 on (q, qd) with the commanded torque held over the step
  auto deriv = [&](const ArmState& x, double tx) {
    ArmState d;
    d.q = x.qd;
    d.qd = acceleration(x, tau, tx, spray_on);
    return d;
  };
  auto advance = [](const ArmState& x, const ArmState& d, double h) {
    ArmState y;
    y.q = x.q + h * d.q;
    y.qd = x.qd + h * d.qd;
    return y;
  };
  const ArmState k1 = deriv(s, t);
  const ArmState k2 = deriv(advance(s, k1, dt / 2), t + dt / 2);
  const ArmState k3 = deriv(advance(s, k2, dt / 2), t + dt / 2);
  const ArmState k4 = deriv(advance(s, k3, dt), t + dt);
  ArmState out;
  out.q = s.q + dt / 6.0 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q);
  out.qd = s.qd + dt / 6.0 * (k1.qd + 2 * k2.qd + 2 * k3.qd + k4.qd);
  return out;
}

// ------------------------------------------------------------------ base ---

BasePlant::BasePlant(const BaseDynamics& dyn, const RobotParams& params)
    : dyn_(dyn), params_(params) {}

BaseSimState BasePlant::step(const BaseSimState& s, const Eigen::Vector2d& wheel_tau, double dt,
                             Integrator integrator) const {
  struct D {
    Vector9d dq;
    Eigen::Vector2d du;
  };
  auto deriv = [&](const BaseSimState& x) {
    D d;
    d.dq = base_mobility_matrix(x.q, params_) * x.u;
    d.du = dyn_.forward_reduced(x.q, x.u, wheel_tau);
    return d;
  };
  auto advance = [](const BaseSimState& x, const D& d, double h) {
    BaseSimState y;
    y.q = x.q + h * d.dq;
    y.u = x.u + h * d.du;
    return y;
  };
  if (integrator == Integrator::SemiImplicitEuler) {
    BaseSimState out;
    const D d = deriv(s);
    out.u = s.u + dt * d.du;
    out.q = s.q + dt * (base_mobility_matrix(s.q, params_) * out.u);
    return out;
  }
  const D k1 = deriv(s);
  const D k2 = deriv(advance(s, k1, dt / 2));
  const D k3 = deriv(advance(s, k2, dt / 2));
  const D k4 = deriv(advance(s, k3, dt));
  BaseSimState out;
  out.q = s.q + dt / 6.0 * (k1.dq + 2 * k2.dq + 2 * k3.dq + k4.dq);
  out.u = s.u + dt / 6.0 * (k1.du + 2 * k2.du + 2 * k3.du + k4.du);
  return out;
}

double BasePlant::constraint_residual(const BaseSimState& s) const {
  const auto J = base_constraint_matrix(s.q, params_);
  const Vector9d qdot = base_mobility_matrix(s.q, params_) * s.u;
  return (J * qdot).norm();
}

BaseSimState base_kinematic_step(const BaseSimState& s, const Eigen::Vector2d& u_cmd, double dt,
                                 const RobotParams& params) {
  // integrate qdot = S(q) u with the command applied instantaneously
  auto deriv = [&](const Vector9d& q) -> Vector9d {
    return base_mobility_matrix(q, params) * u_cmd;
  };
  const Vector9d k1 = deriv(s.q);
  const Vector9d k2 = deriv(s.q + dt / 2 * k1);
  const Vector9d k3 = deriv(s.q + dt / 2 * k2);
  const Vector9d k4 = deriv(s.q + dt * k3);
  BaseSimState out;
  out.q = s.q + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  out.u = u_cmd;
  return out;
}

}  // namespace robopainter
