#include <cmath>

#include "robopainter/dynamics.hpp"
#include "robopainter/error.hpp"

namespace robopainter {

Eigen::MatrixXd christoffel_coriolis(const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& mass,
                                     const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                                     double h) {
  const int n = static_cast<int>(q.size());
  std::vector<Eigen::MatrixXd> dM(static_cast<size_t>(n));
  Eigen::VectorXd qp = q, qm = q;
  for (int k = 0; k < n; ++k) {
    qp[k] = q[k] + h;
    qm[k] = q[k] - h;
    dM[static_cast<size_t>(k)] = (mass(qp) - mass(qm)) / (2.0 * h);
    qp[k] = q[k];
    qm[k] = q[k];
  }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double cij = 0.0;
      for (int k = 0; k < n; ++k)
        cij += 0.5 *
               (dM[static_cast<size_t>(k)](i, j) + dM[static_cast<size_t>(j)](i, k) -
                dM[static_cast<size_t>(i)](j, k)) *
               qdot[k];
      C(i, j) = cij;
    }
  return C;
}

Vector6d friction_torque(const Vector6d& qdot, const FrictionParams& fr, double eps) {
  Vector6d out;
  for (int i = 0; i < 6; ++i)
    out[i] = fr.viscous * qdot[i] + fr.coulomb * std::tanh(qdot[i] / eps);
  return out;
}

Eigen::VectorXd actuator_torque(const Eigen::VectorXd& currents,
                                const std::vector<MotorParams>& motors) {
  if (currents.size() != static_cast<Eigen::Index>(motors.size()))
    throw Error("actuator_torque: current vector size does not match motor count");
  Eigen::VectorXd tau(currents.size());
  for (Eigen::Index i = 0; i < currents.size(); ++i)
    tau[i] = motors[static_cast<size_t>(i)].torque_constant * currents[i];
  return tau;
}

SprayDisturbance::SprayDisturbance(const RobotParams& params, std::uint64_t seed)
    : gun_mass_(params.arm_links[5].mass), reaction_force_(params.spray.reaction_force) {
  Rng rng(seed);
  target_rms_ = rng.uniform(params.spray.vibration_band_lo, params.spray.vibration_band_hi);
  // per-axis RMS so the 3-vector RMS hits the target; each axis splits its
  // variance evenly across the modes
  const double axis_rms = target_rms_ / std::sqrt(3.0);
  const double mode_amp = axis_rms * std::sqrt(2.0 / kModes);
  for (int a = 0; a < 3; ++a)
    for (int m = 0; m < kModes; ++m) {
      freq_[a][m] = rng.uniform(10.0, 50.0);
      phase_[a][m] = rng.uniform(0.0, 2.0 * M_PI);
      amp_[a][m] = mode_amp;
    }
}

Eigen::Vector3d SprayDisturbance::tip_acceleration(double t, bool spray_on, bool healthy) const {
  if (!spray_on) return Eigen::Vector3d::Zero();
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  for (int ax = 0; ax < 3; ++ax)
    for (int m = 0; m < kModes; ++m)
      a[ax] += amp_[ax][m] * std::sin(2.0 * M_PI * freq_[ax][m] * t + phase_[ax][m]);
  // dry gun: the atomizer loses its load and the vibration collapses well
  // below the healthy band
  if (!healthy) a *= 0.3 / target_rms_;
  return a;
}

Vector6d SprayDisturbance::torque(const ArmKinematics& kin, const Vector6d& q, double t,
                                  bool spray_on) const {
  if (!spray_on) return Vector6d::Zero();
  const auto fr = kin.frames(q);
  const Eigen::Vector3d nozzle = fr[7].R.col(2);
  // reaction pushes the gun opposite the spray direction
  const Eigen::Vector3d force_on_gun = -reaction_force_ * nozzle + gun_mass_ * tip_acceleration(t, true);
  const Matrix6d J = kin.jacobian(q);
  // load convention: subtracted on the forward-dynamics right-hand side
  return -(J.block<3, 6>(0, 0).transpose() * force_on_gun);
}

ArmDynamics::ArmDynamics(const RobotParams& params)
    : kin_(params), links_(params.arm_links) {
  for (int i = 0; i < 6; ++i) rotor_inertia_[i] = params.arm_motors[static_cast<size_t>(i)].rotor_inertia;
}

void ArmDynamics::cg_jacobians(const Vector6d& q, Eigen::Matrix<double, 3, 6>* jv,
                               Eigen::Matrix<double, 3, 6>* jw, Eigen::Matrix3d* inertia_world,
                               Eigen::Vector3d* cg_world) const {
  const auto fr = kin_.frames(q);
  for (int l = 0; l < 6; ++l) {
    const auto& link = links_[static_cast<size_t>(l)];
    const Eigen::Matrix3d& R = fr[static_cast<size_t>(l + 1)].R;
    const Eigen::Vector3d cg = fr[static_cast<size_t>(l + 1)].apply(link.cg);
    cg_world[l] = cg;
    inertia_world[l] = R * link.inertia * R.transpose();
    jv[l].setZero();
    jw[l].setZero();
    for (int j = 0; j <= l; ++j) {
      const Eigen::Vector3d z = fr[static_cast<size_t>(j + 1)].R.col(2);
      const Eigen::Vector3d o = fr[static_cast<size_t>(j + 1)].p;
      jv[l].col(j) = z.cross(cg - o);
      jw[l].col(j) = z;
    }
  }
}

double ArmDynamics::kinetic_energy(const Vector6d& q, const Vector6d& qdot) const {
  // direct velocity propagation; deliberately not the jacobian assembly used
  // by mass_matrix so energy/matrix cross-checks are meaningful
  const auto fr = kin_.frames(q);
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();  // velocity of the previous frame origin
  Eigen::Vector3d o_prev = Eigen::Vector3d::Zero();
  double e = 0.0;
  for (int l = 0; l < 6; ++l) {
    const Eigen::Vector3d o = fr[static_cast<size_t>(l + 1)].p;
    v += w.cross(o - o_prev);
    w += qdot[l] * fr[static_cast<size_t>(l + 1)].R.col(2);
    o_prev = o;
    const auto& link = links_[static_cast<size_t>(l)];
    const Eigen::Matrix3d& R = fr[static_cast<size_t>(l + 1)].R;
    const Eigen::Vector3d cg = fr[static_cast<size_t>(l + 1)].apply(link.cg);
    const Eigen::Vector3d v_cg = v + w.cross(cg - o);
    const Eigen::Matrix3d iw = R * link.inertia * R.transpose();
    e += 0.5 * link.mass * v_cg.squaredNorm() + 0.5 * w.dot(iw * w);
  }
  return e;
}

double ArmDynamics::potential_energy(const Vector6d& q) const {
  const auto fr = kin_.frames(q);
  double u = 0.0;
  for (int l = 0; l < 6; ++l)
    u += links_[static_cast<size_t>(l)].mass * kGravity *
         fr[static_cast<size_t>(l + 1)].apply(links_[static_cast<size_t>(l)].cg).z();
  return u;
}

Matrix6d ArmDynamics::mass_matrix(const Vector6d& q) const {
  Eigen::Matrix<double, 3, 6> jv[6], jw[6];
  Eigen::Matrix3d iw[6];
  Eigen::Vector3d cg[6];
  cg_jacobians(q, jv, jw, iw, cg);
  Matrix6d M = Matrix6d::Zero();
  for (int l = 0; l < 6; ++l)
    M += links_[static_cast<size_t>(l)].mass * jv[l].transpose() * jv[l] +
         jw[l].transpose() * iw[l] * jw[l];
  return 0.5 * (M + M.transpose());
}

Matrix6d ArmDynamics::joint_space_inertia(const Vector6d& q) const {
  Matrix6d M = mass_matrix(q);
  for (int i = 0; i < 6; ++i) M(i, i) += rotor_inertia_[i];
  return M;
}

Vector6d ArmDynamics::gravity_torque(const Vector6d& q) const {
  Eigen::Matrix<double, 3, 6> jv[6], jw[6];
  Eigen::Matrix3d iw[6];
  Eigen::Vector3d cg[6];
  cg_jacobians(q, jv, jw, iw, cg);
  // dU/dq_i: gravity acts on the CG height row of each link jacobian
  Vector6d Q = Vector6d::Zero();
  for (int l = 0; l < 6; ++l)
    Q += links_[static_cast<size_t>(l)].mass * kGravity * jv[l].row(2).transpose();
  return Q;
}

Matrix6d ArmDynamics::coriolis_matrix(const Vector6d& q, const Vector6d& qdot) const {
  auto mass = [this](const Eigen::VectorXd& qq) -> Eigen::MatrixXd {
    return mass_matrix(Vector6d(qq));
  };
  return christoffel_coriolis(mass, q, qdot);
}

Vector6d ArmDynamics::inverse_dynamics(const Vector6d& q, const Vector6d& qdot,
                                       const Vector6d& qddot, const Vector6d& tau_friction,
                                       const Vector6d& tau_external, bool include_rotor) const {
  const Matrix6d M = include_rotor ? joint_space_inertia(q) : mass_matrix(q);
  return M * qddot + coriolis_matrix(q, qdot) * qdot + gravity_torque(q) + tau_friction +
         tau_external;
}

Vector6d ArmDynamics::newton_euler(const Vector6d& q, const Vector6d& qdot,
                                   const Vector6d& qddot) const {
  // force recursion in link-local frames; gravity handled as an upward base
  // acceleration
  const auto fr = kin_.frames(q);
  Eigen::Matrix3d R[6];   // frame i -> frame i-1
  Eigen::Vector3d P[6];   // frame-i origin in frame i-1
  for (int i = 0; i < 6; ++i) {
    const Transform rel = fr[static_cast<size_t>(i)].inverse() * fr[static_cast<size_t>(i + 1)];
    R[i] = rel.R;
    P[i] = rel.p;
  }

  const Eigen::Vector3d zhat = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d w[7], wd[7], a[7];
  w[0].setZero();
  wd[0].setZero();
  a[0] = kGravity * zhat;
  for (int i = 1; i <= 6; ++i) {
    const Eigen::Matrix3d Rt = R[i - 1].transpose();
    const Eigen::Vector3d w_prev = Rt * w[i - 1];
    w[i] = w_prev + qdot[i - 1] * zhat;
    wd[i] = Rt * wd[i - 1] + qddot[i - 1] * zhat + w_prev.cross(qdot[i - 1] * zhat);
    a[i] = Rt * (a[i - 1] + wd[i - 1].cross(P[i - 1]) + w[i - 1].cross(w[i - 1].cross(P[i - 1])));
  }

  Eigen::Vector3d F[7], N[7];
  for (int i = 1; i <= 6; ++i) {
    const auto& link = links_[static_cast<size_t>(i - 1)];
    const Eigen::Vector3d a_cg = a[i] + wd[i].cross(link.cg) + w[i].cross(w[i].cross(link.cg));
    F[i] = link.mass * a_cg;
    N[i] = link.inertia * wd[i] + w[i].cross(link.inertia * w[i]);
  }

  Vector6d tau;
  Eigen::Vector3d f = Eigen::Vector3d::Zero();  // force from link i+1 on link i, frame i+1
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
  for (int i = 6; i >= 1; --i) {
    Eigen::Vector3d fi = F[i];
    Eigen::Vector3d ni = N[i] + links_[static_cast<size_t>(i - 1)].cg.cross(F[i]);
    if (i < 6) {
      const Eigen::Vector3d f_here = R[i] * f;
      fi += f_here;
      ni += R[i] * n + P[i].cross(f_here);
    }
    tau[i - 1] = ni.z();
    f = fi;
    n = ni;
  }
  return tau;
}

Vector6d ArmDynamics::forward_dynamics(const Vector6d& q, const Vector6d& qdot,
                                       const Vector6d& tau, const Vector6d& tau_friction,
                                       const Vector6d& tau_external) const {
  const Matrix6d M = joint_space_inertia(q);
  // bias C qd + Q in one force recursion (the Christoffel route stays
  // available through coriolis_matrix for the consistency tests)
  const Vector6d bias = newton_euler(q, qdot, Vector6d::Zero());
  const Vector6d rhs = tau - bias - tau_friction - tau_external;
  Eigen::LDLT<Matrix6d> ldlt(M);
  const auto d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= 0.0 ||
      d.maxCoeff() / d.minCoeff() > 1e12)
    throw SingularInertia("joint-space inertia numerically singular");
  return ldlt.solve(rhs);
}

}  // namespace robopainter
