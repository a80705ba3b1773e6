#include <cmath>

#include <Eigen/QR>

#include "robopainter/dynamics.hpp"
#include "robopainter/error.hpp"

namespace robopainter {

namespace {

inline Eigen::Vector2d rot2(double a, const Eigen::Vector2d& v) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

inline Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

}  // namespace

BaseDynamics::BaseDynamics(const RobotParams& params, const Vector6d& arm_q) : params_(&params) {
  set_arm_configuration(arm_q);
}

void BaseDynamics::set_arm_configuration(const Vector6d& arm_q) {
  arm_q_ = arm_q;
  ArmKinematics kin(*params_);
  const auto fr = kin.frames(arm_q);

  arm_mass_ = 0.0;
  Eigen::Vector3d cg = Eigen::Vector3d::Zero();
  for (int l = 0; l < 6; ++l) {
    const auto& link = params_->arm_links[static_cast<size_t>(l)];
    arm_mass_ += link.mass;
    cg += link.mass * fr[static_cast<size_t>(l + 1)].apply(link.cg);
  }
  cg /= arm_mass_;
  arm_cg_ = cg.head<2>();

  // vertical-axis inertia of the frozen arm about its own planar CG
  arm_inertia_zz_ = 0.0;
  for (int l = 0; l < 6; ++l) {
    const auto& link = params_->arm_links[static_cast<size_t>(l)];
    const Eigen::Matrix3d& R = fr[static_cast<size_t>(l + 1)].R;
    const Eigen::Vector3d c = fr[static_cast<size_t>(l + 1)].apply(link.cg);
    const Eigen::Matrix3d iw = R * link.inertia * R.transpose();
    arm_inertia_zz_ += iw(2, 2) + link.mass * (c.head<2>() - arm_cg_).squaredNorm();
  }

  rebuild_bodies();
}

void BaseDynamics::rebuild_bodies() {
  using namespace base_coord;
  const auto& g = params_->geometry;
  bodies_.clear();

  // chassis and the frozen arm ride directly on the base frame
  bodies_.push_back({params_->base_body.mass, params_->base_body.inertia(2, 2),
                     params_->base_body.cg.head<2>(), -1, 0.0, -1});
  bodies_.push_back({arm_mass_, arm_inertia_zz_, arm_cg_, -1, 0.0, -1});

  for (int i = 0; i < 2; ++i) {
    const double s = kSide[i];
    // drive wheel: centre on the axle line, spins about the axle; the
    // vertical axis through the centre is diametral
    bodies_.push_back({params_->drive_wheel.mass, params_->drive_wheel.inertia(0, 0),
                       Eigen::Vector2d(0.0, s * g.half_track), kWheel1 + i,
                       params_->drive_wheel.inertia(2, 2), -1});
    // castor hub: offset is its CG in the hub (steered) frame
    bodies_.push_back({params_->castor_hub.mass, params_->castor_hub.inertia(2, 2),
                       params_->castor_hub.cg.head<2>(), -1, 0.0, kBeta1 + i});
    // castor wheel: centre trails the steering axis along the hub x axis
    bodies_.push_back({params_->castor_wheel.mass, params_->castor_wheel.inertia(0, 0),
                       Eigen::Vector2d(g.castor_trail, 0.0), kCastor1 + i,
                       params_->castor_wheel.inertia(2, 2), kBeta1 + i});
  }
}

Matrix9d BaseDynamics::mass_matrix(const Vector9d& q_b) const {
  using namespace base_coord;
  const auto& g = params_->geometry;
  const double phi = q_b[kPhi];
  Matrix9d M = Matrix9d::Zero();

  Vector9d jvx, jvy, jw;
  for (const auto& body : bodies_) {
    jvx.setZero();
    jvy.setZero();
    jw.setZero();
    jvx[kX] = 1.0;
    jvy[kY] = 1.0;
    jw[kPhi] = 1.0;
    if (body.steer_coord < 0) {
      const Eigen::Vector2d w = perp(rot2(phi, body.offset));
      jvx[kPhi] += w.x();
      jvy[kPhi] += w.y();
    } else {
      const int i = body.steer_coord - kBeta1;
      const Eigen::Vector2d mount(-g.castor_mount_x, kSide[i] * g.castor_mount_y);
      const Eigen::Vector2d wm = perp(rot2(phi, mount));
      const Eigen::Vector2d wc = perp(rot2(phi + q_b[body.steer_coord], body.offset));
      jvx[kPhi] += wm.x() + wc.x();
      jvy[kPhi] += wm.y() + wc.y();
      jvx[body.steer_coord] += wc.x();
      jvy[body.steer_coord] += wc.y();
      jw[body.steer_coord] = 1.0;
    }
    M += body.mass * (jvx * jvx.transpose() + jvy * jvy.transpose()) +
         body.inertia_zz * (jw * jw.transpose());
    if (body.spin_coord >= 0) M(body.spin_coord, body.spin_coord) += body.spin_inertia;
  }
  return 0.5 * (M + M.transpose());
}

double BaseDynamics::kinetic_energy(const Vector9d& q_b, const Vector9d& qdot_b) const {
  using namespace base_coord;
  const auto& g = params_->geometry;
  const double phi = q_b[kPhi];
  const Eigen::Vector2d v_base(qdot_b[kX], qdot_b[kY]);
  const double phidot = qdot_b[kPhi];

  // direct velocity route, kept separate from the jacobian assembly above
  double e = 0.0;
  for (const auto& body : bodies_) {
    Eigen::Vector2d v_cg;
    double wz;
    if (body.steer_coord < 0) {
      v_cg = v_base + phidot * perp(rot2(phi, body.offset));
      wz = phidot;
    } else {
      const int i = body.steer_coord - kBeta1;
      const Eigen::Vector2d mount(-g.castor_mount_x, kSide[i] * g.castor_mount_y);
      wz = phidot + qdot_b[body.steer_coord];
      v_cg = v_base + phidot * perp(rot2(phi, mount)) +
             wz * perp(rot2(phi + q_b[body.steer_coord], body.offset));
    }
    e += 0.5 * body.mass * v_cg.squaredNorm() + 0.5 * body.inertia_zz * wz * wz;
    if (body.spin_coord >= 0)
      e += 0.5 * body.spin_inertia * qdot_b[body.spin_coord] * qdot_b[body.spin_coord];
  }
  return e;
}

Matrix9d BaseDynamics::coriolis_matrix(const Vector9d& q_b, const Vector9d& qdot_b) const {
  auto mass = [this](const Eigen::VectorXd& qq) -> Eigen::MatrixXd {
    return mass_matrix(Vector9d(qq));
  };
  return christoffel_coriolis(mass, q_b, qdot_b);
}

BaseDynamics::Reduced BaseDynamics::reduce(const Vector9d& q_b, const Eigen::Vector2d& u) const {
  const Eigen::Matrix<double, 9, 2> S = base_mobility_matrix(q_b, *params_);
  const Eigen::Matrix<double, 9, 2> Sdot = base_mobility_matrix_dot(q_b, u, *params_);
  const Matrix9d M = mass_matrix(q_b);
  const Matrix9d C = coriolis_matrix(q_b, S * u);
  Reduced r;
  r.M = S.transpose() * M * S;
  r.C = S.transpose() * (M * Sdot + C * S);
  return r;
}

Eigen::Vector2d BaseDynamics::forward_reduced(const Vector9d& q_b, const Eigen::Vector2d& u,
                                              const Eigen::Vector2d& wheel_tau) const {
  // Fast path: only the Coriolis *bias* b = C(q, qdot) qdot is needed, and it
  // follows from the energy form b = Mdot qdot - 1/2 d(qdot^T M qdot)/dq
  // without assembling the full Christoffel matrix (which reduce() keeps for
  // the property tests).
  const Eigen::Matrix<double, 9, 2> S = base_mobility_matrix(q_b, *params_);
  const Eigen::Matrix<double, 9, 2> Sdot = base_mobility_matrix_dot(q_b, u, *params_);
  const Matrix9d M = mass_matrix(q_b);
  const Vector9d qdot = S * u;

  const double h = 1e-6;
  const Matrix9d M_plus = mass_matrix(q_b + h * qdot);
  const Matrix9d M_minus = mass_matrix(q_b - h * qdot);
  const Vector9d mdot_qdot = ((M_plus - M_minus) / (2.0 * h)) * qdot;
  Vector9d ke_grad;
  for (int i = 0; i < 9; ++i) {
    Vector9d dq = Vector9d::Zero();
    dq[i] = h;
    const double ke_p = kinetic_energy(q_b + dq, qdot);
    const double ke_m = kinetic_energy(q_b - dq, qdot);
    ke_grad[i] = (ke_p - ke_m) / (2.0 * h);
  }
  const Vector9d bias = mdot_qdot - ke_grad;

  const Eigen::Matrix2d Mr = S.transpose() * M * S;
  const Eigen::Vector2d rhs =
      S.transpose() * (wheel_generalized_force(wheel_tau) - M * (Sdot * u) - bias);
  return Mr.ldlt().solve(rhs);
}

Vector9d BaseDynamics::wheel_generalized_force(const Eigen::Vector2d& wheel_tau) {
  Vector9d gamma = Vector9d::Zero();
  gamma[base_coord::kWheel1] = wheel_tau[0];
  gamma[base_coord::kWheel2] = wheel_tau[1];
  return gamma;
}

MultiplierEstimate recover_lagrange_multipliers(const BaseDynamics& dyn, const Vector9d& q_b,
                                                const Vector9d& qdot_b, const Vector9d& qddot_b,
                                                const Vector9d& gamma, const RobotParams& p) {
  const Eigen::Matrix<double, 7, 9> J = base_constraint_matrix(q_b, p);
  const Vector9d r =
      dyn.mass_matrix(q_b) * qddot_b + dyn.coriolis_matrix(q_b, qdot_b) * qdot_b - gamma;
  const Eigen::Matrix<double, 9, 7> Jt = J.transpose();
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 9, 7>> qr(Jt);
  if (qr.rank() < 7)
    throw RankDeficient("constraint matrix lost row rank; contact multipliers not identifiable");
  MultiplierEstimate est;
  est.lambda = qr.solve(r);
  est.residual = (Jt * est.lambda - r).norm();
  return est;
}

}  // namespace robopainter
