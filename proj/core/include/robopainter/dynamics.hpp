#pragma once

#include <functional>
#include <vector>

#include "robopainter/kinematics.hpp"
#include "robopainter/params.hpp"
#include "robopainter/rng.hpp"

namespace robopainter {

constexpr double kGravity = 9.81;

// Coriolis/centrifugal matrix from Christoffel symbols of the first kind,
//   c_ijk = 1/2 (dM_ij/dq_k + dM_ik/dq_j - dM_jk/dq_i),
// with the mass-matrix partials taken by central differences (step h).
// Guarantees the skew symmetry of (dM/dt - 2C) by construction.
Eigen::MatrixXd christoffel_coriolis(const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& mass,
                                     const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                                     double h = 1e-6);

// Viscous + Coulomb joint friction; the sign function is smoothed with
// tanh(qdot/eps) so the torque is continuous through zero crossings.
Vector6d friction_torque(const Vector6d& qdot, const FrictionParams& fr, double eps = 1e-3);

// tau = Kt * i per motor
Eigen::VectorXd actuator_torque(const Eigen::VectorXd& currents,
                                const std::vector<MotorParams>& motors);

// Spray gun load model: constant axial reaction along the nozzle axis plus a
// band-limited zero-mean vibration force (sum of fixed-seed sinusoids whose
// acceleration-equivalent RMS is drawn from the configured band). Returns the
// generalized load torque, i.e. the term subtracted on the right-hand side of
// the forward dynamics; deterministic in (seed, t).
class SprayDisturbance {
 public:
  SprayDisturbance(const RobotParams& params, std::uint64_t seed);

  Vector6d torque(const ArmKinematics& kin, const Vector6d& q, double t, bool spray_on) const;

  // tip acceleration equivalent of the vibration component (what a gun-mount
  // IMU measures); `healthy` false models the dry-gun signature after the
  // paint cup empties
  Eigen::Vector3d tip_acceleration(double t, bool spray_on, bool healthy = true) const;

  double target_rms() const { return target_rms_; }

 private:
  double gun_mass_;
  double reaction_force_;
  double target_rms_;
  static constexpr int kModes = 8;
  double freq_[3][kModes];   // Hz
  double phase_[3][kModes];
  double amp_[3][kModes];    // m/s^2
};

// 6-DOF arm dynamics in the base frame (the base is treated as inertial
// support while painting; the reduced base model below owns the driving
// phase). Mass matrix is assembled exactly as the Hessian of the kinetic
// energy quadratic form via per-link CG jacobians.
class ArmDynamics {
 public:
  explicit ArmDynamics(const RobotParams& params);

  const ArmKinematics& kinematics() const { return kin_; }

  double kinetic_energy(const Vector6d& q, const Vector6d& qdot) const;
  double potential_energy(const Vector6d& q) const;

  Matrix6d mass_matrix(const Vector6d& q) const;          // links only
  Matrix6d joint_space_inertia(const Vector6d& q) const;  // + rotor inertias
  Vector6d gravity_torque(const Vector6d& q) const;       // dU/dq, analytic
  Matrix6d coriolis_matrix(const Vector6d& q, const Vector6d& qdot) const;

  // Energy route: (M + diag(Ia)) qdd + C qd + Q + tau_fr + tau_ext.
  // include_rotor=false drops diag(Ia) (used when cross-checking against the
  // force-recursion route, which models bare links).
  Vector6d inverse_dynamics(const Vector6d& q, const Vector6d& qdot, const Vector6d& qddot,
                            const Vector6d& tau_friction = Vector6d::Zero(),
                            const Vector6d& tau_external = Vector6d::Zero(),
                            bool include_rotor = true) const;

  // Independent route: recursive Newton-Euler over the same chain, gravity as
  // a base acceleration, bare links (no rotor inertia, friction or external
  // load terms).
  Vector6d newton_euler(const Vector6d& q, const Vector6d& qdot, const Vector6d& qddot) const;

  // qdd = (M + diag(Ia))^-1 (tau - C qd - Q - tau_fr - tau_ext);
  // throws SingularInertia if the joint-space inertia is numerically singular
  Vector6d forward_dynamics(const Vector6d& q, const Vector6d& qdot, const Vector6d& tau,
                            const Vector6d& tau_friction = Vector6d::Zero(),
                            const Vector6d& tau_external = Vector6d::Zero()) const;

  const Vector6d& rotor_inertia() const { return rotor_inertia_; }

 private:
  void cg_jacobians(const Vector6d& q, Eigen::Matrix<double, 3, 6>* jv,
                    Eigen::Matrix<double, 3, 6>* jw, Eigen::Matrix3d* inertia_world,
                    Eigen::Vector3d* cg_world) const;

  ArmKinematics kin_;
  std::array<LinkInertial, 6> links_;
  Vector6d rotor_inertia_;
};

// Reduced base dynamics u' = M~^-1 (S^T Gamma - C~ u) with
// M~ = S^T M S, C~ = S^T M S' + S^T C S. The arm rides along as a rigid body
// frozen at the configuration set with set_arm_configuration.
class BaseDynamics {
 public:
  BaseDynamics(const RobotParams& params, const Vector6d& arm_q = Vector6d::Zero());

  void set_arm_configuration(const Vector6d& arm_q);

  double kinetic_energy(const Vector9d& q_b, const Vector9d& qdot_b) const;
  Matrix9d mass_matrix(const Vector9d& q_b) const;
  Matrix9d coriolis_matrix(const Vector9d& q_b, const Vector9d& qdot_b) const;

  struct Reduced {
    Eigen::Matrix2d M;
    Eigen::Matrix2d C;
  };
  Reduced reduce(const Vector9d& q_b, const Eigen::Vector2d& u) const;

  // wheel torques (right, left) -> u' in (v, omega) space
  Eigen::Vector2d forward_reduced(const Vector9d& q_b, const Eigen::Vector2d& u,
                                  const Eigen::Vector2d& wheel_tau) const;

  // generalized force vector for given wheel torques (only wheel rows used)
  static Vector9d wheel_generalized_force(const Eigen::Vector2d& wheel_tau);

 private:
  struct PlanarBody {
    double mass;
    double inertia_zz;           // about own CG, vertical axis
    Eigen::Vector2d offset;      // CG in carrier frame
    int spin_coord;              // extra spin coordinate (-1 none)
    double spin_inertia;         // about the spin axis
    int steer_coord;             // castor steering coordinate (-1 none)
  };

  void rebuild_bodies();

  std::vector<PlanarBody> bodies_;
  const RobotParams* params_;
  Vector6d arm_q_;
  double arm_mass_ = 0.0;
  Eigen::Vector2d arm_cg_ = Eigen::Vector2d::Zero();
  double arm_inertia_zz_ = 0.0;
};

// lambda solving J^T lambda = M qdd + C qd - Gamma in least squares, plus the
// residual norm of that fit; throws RankDeficient if J loses row rank
struct MultiplierEstimate {
  Eigen::Matrix<double, 7, 1> lambda;
  double residual;
};
MultiplierEstimate recover_lagrange_multipliers(const BaseDynamics& dyn, const Vector9d& q_b,
                                                const Vector9d& qdot_b, const Vector9d& qddot_b,
                                                const Vector9d& gamma, const RobotParams& p);

}  // namespace robopainter
