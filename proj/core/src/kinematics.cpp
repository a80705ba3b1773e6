#include "robopainter/kinematics.hpp"

#include <array>
#include <cmath>

#include "robopainter/error.hpp"

namespace robopainter {

ArmKinematics::ArmKinematics(const RobotParams& params) {
  int i = 0;
  for (const auto& row : params.geometry.kk_table) {
    if (row.joint == 0) {
      tool_ = row;
      has_tool_ = true;
    } else {
      rows_[static_cast<size_t>(i++)] = row;
    }
  }
  if (i != 6)
    throw Error("arm kinematics needs 6 driven joint rows");
}

std::array<Transform, 8> ArmKinematics::frames(const Vector6d& q) const {
  std::array<Transform, 8> out;
  out[0] = Transform::identity();
  for (int i = 0; i < 6; ++i)
    out[static_cast<size_t>(i + 1)] =
        out[static_cast<size_t>(i)] * kk_transform(rows_[static_cast<size_t>(i)], q[i]);
  out[7] = has_tool_ ? out[6] * kk_transform(tool_, 0.0) : out[6];
  return out;
}

Transform ArmKinematics::fk(const Vector6d& q) const { return frames(q)[7]; }

Matrix6d ArmKinematics::jacobian(const Vector6d& q) const {
  const auto fr = frames(q);
  const Eigen::Vector3d tip = fr[7].p;
  Matrix6d J;
  for (int i = 0; i < 6; ++i) {
    // joint i+1 rotates about the z axis of its own frame
    const Eigen::Vector3d z = fr[static_cast<size_t>(i + 1)].R.col(2);
    const Eigen::Vector3d o = fr[static_cast<size_t>(i + 1)].p;
    J.block<3, 1>(0, i) = z.cross(tip - o);
    J.block<3, 1>(3, i) = z;
  }
  return J;
}

namespace {

// rotation error as a rotation vector: log(R_target * R^T)
Eigen::Vector3d rotation_error(const Eigen::Matrix3d& target, const Eigen::Matrix3d& current) {
  const Eigen::Matrix3d e = target * current.transpose();
  Eigen::AngleAxisd aa(e);
  return aa.angle() * aa.axis();
}

IkResult solve_from(const ArmKinematics& kin, const Transform& target, const Vector6d& seed) {
  IkResult res;
  res.q = seed;
  for (int it = 0; it < ArmKinematics::kIkMaxIterations; ++it) {
    const auto fr = kin.frames(res.q);
    const Eigen::Vector3d pe = target.p - fr[7].p;
    const Eigen::Vector3d re = rotation_error(target.R, fr[7].R);
    res.pos_residual = pe.norm();
    res.rot_residual = re.norm();
    res.iterations = it;
    if (res.pos_residual < ArmKinematics::kIkTolerance &&
        res.rot_residual < ArmKinematics::kIkTolerance) {
      res.converged = true;
      return res;
    }
    Vector6d err;
    err << pe, re;
    const Matrix6d J = kin.jacobian(res.q);
    const Matrix6d JJt = J * J.transpose() +
                         ArmKinematics::kIkDamping * ArmKinematics::kIkDamping *
                             Matrix6d::Identity();
    res.q += J.transpose() * JJt.ldlt().solve(err);
  }
  const auto fr = kin.frames(res.q);
  res.pos_residual = (target.p - fr[7].p).norm();
  res.rot_residual = rotation_error(target.R, fr[7].R).norm();
  res.iterations = ArmKinematics::kIkMaxIterations;
  res.converged = res.pos_residual < ArmKinematics::kIkTolerance &&
                  res.rot_residual < ArmKinematics::kIkTolerance;
  return res;
}

// every joint is full-turn revolute, so shifting any of them by whole turns
// leaves the pose untouched; fold the solution back to within half a turn of
// the seed so follow-up moves never unwind entire revolutions
void fold_turns(Vector6d& q, const Vector6d& seed) {
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  for (int i = 0; i < 6; ++i) q[i] = seed[i] + std::remainder(q[i] - seed[i], kTwoPi);
}

}  // namespace

IkResult ArmKinematics::ik(const Transform& target, const Vector6d& seed) const {
  IkResult best = solve_from(*this, target, seed);
  if (best.converged) {
    fold_turns(best.q, seed);
    return best;
  }
  // Damped least squares only descends locally; a seed far from the target
  // can stall against a fold of the workspace. Retry from a fixed set of
  // spread-out postures (base joint turned toward the target, elbow raised
  // or dropped) and keep the best attempt if none of them converges either.
  const double az = std::atan2(target.p.y(), target.p.x());
  std::array<Vector6d, 4> restarts;
  restarts.fill(Vector6d::Zero());
  restarts[1][0] = az;
  restarts[2][0] = az;
  restarts[2][2] = 1.2;
  restarts[3][0] = az;
  restarts[3][1] = -0.6;
  restarts[3][2] = -1.2;
  for (const auto& s : restarts) {
    IkResult r = solve_from(*this, target, s);
    if (r.pos_residual + r.rot_residual < best.pos_residual + best.rot_residual ||
        (r.converged && !best.converged)) {
      best = r;
    }
    if (best.converged) break;
  }
  fold_turns(best.q, seed);
  return best;
}

}  // namespace robopainter
