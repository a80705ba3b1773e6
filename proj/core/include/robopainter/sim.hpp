#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "robopainter/dynamics.hpp"
#include "robopainter/geometry.hpp"
#include "robopainter/kinematics.hpp"

namespace robopainter {

enum class Integrator { RK4, SemiImplicitEuler };

struct ArmState {
  Vector6d q = Vector6d::Zero();
  Vector6d qd = Vector6d::Zero();
};

struct BaseSimState {
  Vector9d q = Vector9d::Zero();             // [x y phi beta1 beta2 wf1 wf2 wc1 wc2]
  Eigen::Vector2d u = Eigen::Vector2d::Zero();  // [v omega]
};

struct Gains {
  double kp = 400.0;  // per-joint stiffness  (critically damped, 20 rad/s)
  double kd = 40.0;
  double ku = 20.0;  // base velocity loop
};

struct SimConfig {
  double dt = 1e-3;
  double duration_cap = 3600.0;
  Integrator integrator = Integrator::RK4;
  Gains gains;
  std::uint64_t seed = 1;
  bool dynamic = true;  // false: kinematic fidelity (references integrated directly)
  double trace_interval = 0.1;
  std::string trace_path;   // JSONL mission trace ("" = off)
  std::string joints_path;  // CSV joint log ("" = off)
  std::string svg_path;     // coverage SVG ("" = off)
  std::string report_path;  // JSON mission report ("" = off)
};

// Computed-torque law: Gamma = ID(q, qd, qdd_ref + Kd (qd_ref - qd) + Kp (q_ref - q)),
// gravity and rotor inertia included; friction and spray reaction are left to
// the robustness of the loop.
Vector6d computed_torque(const ArmDynamics& dyn, const ArmState& s, const Vector6d& q_ref,
                         const Vector6d& qd_ref, const Vector6d& qdd_ref, const Gains& g);

// Closed-form wheel torques realising a desired reduced acceleration:
// tau = B^-1 (M~ (udot_ff + Ku (u_ref - u)) + C~ u) with B the wheel-to-(v,w) map.
Eigen::Vector2d base_wheel_torques(const BaseDynamics& dyn, const BaseSimState& s,
                                   const Eigen::Vector2d& u_ref, const Eigen::Vector2d& udot_ff,
                                   double ku, const RobotParams& params);

// One torque-driven arm step: plant is the rigid-body model plus joint
// friction and (when spraying) the gun disturbance wrench.
class ArmPlant {
 public:
  ArmPlant(const ArmDynamics& dyn, const SprayDisturbance* spray, const FrictionParams& friction);
  ArmState step(const ArmState& s, const Vector6d& tau, double t, bool spray_on, double dt,
                Integrator integrator) const;
  Vector6d acceleration(const ArmState& s, const Vector6d& tau, double t, bool spray_on) const;

 private:
  const ArmDynamics& dyn_;
  const SprayDisturbance* spray_;
  FrictionParams friction_;
};

// Torque-driven base step in reduced coordinates; the full coordinate lift
// q_b' = S(q_b) u keeps the wheel constraints satisfied to integrator order.
class BasePlant {
 public:
  BasePlant(const BaseDynamics& dyn, const RobotParams& params);
  BaseSimState step(const BaseSimState& s, const Eigen::Vector2d& wheel_tau, double dt,
                    Integrator integrator) const;
  // constraint violation |J(q_b) qdot_b| for diagnostics/tests
  double constraint_residual(const BaseSimState& s) const;

 private:
  const BaseDynamics& dyn_;
  const RobotParams& params_;
};

// Kinematic fallback used by the fidelity mode: integrate u directly.
BaseSimState base_kinematic_step(const BaseSimState& s, const Eigen::Vector2d& u_cmd, double dt,
                                 const RobotParams& params);

}  // namespace robopainter
