#pragma once

#include <array>

#include "robopainter/geometry.hpp"
#include "robopainter/params.hpp"

namespace robopainter {

struct IkResult {
  Vector6d q = Vector6d::Zero();
  int iterations = 0;
  double pos_residual = 0.0;  // m
  double rot_residual = 0.0;  // rad
  bool converged = false;
};

class ArmKinematics {
 public:
  explicit ArmKinematics(const RobotParams& params);

  // frames[0] = base, frames[i] = joint-i frame (i = 1..6), frames[7] = nozzle tip
  std::array<Transform, 8> frames(const Vector6d& q) const;
  Transform fk(const Vector6d& q) const;

  // world-frame geometric jacobian at the tip: rows 0-2 linear, 3-5 angular
  Matrix6d jacobian(const Vector6d& q) const;

  // damped least squares; never throws, inspect IkResult::converged
  IkResult ik(const Transform& target, const Vector6d& seed) const;

  static constexpr double kIkTolerance = 1e-6;
  static constexpr double kIkDamping = 1e-3;
  static constexpr int kIkMaxIterations = 200;

 private:
  std::array<KKRow, 6> rows_;
  KKRow tool_;
  bool has_tool_ = false;
};

// Base generalized coordinates, 9 entries:
//   [x, y, phi, beta1, beta2, wf1, wf2, wc1, wc2]
// x/y/phi base pose in world, beta castor steering angles (relative to the
// base, measured from the +x body axis to the wheel heading), wf drive wheel
// spin angles (1 = right at y=-b, 2 = left at y=+b), wc castor wheel spins
// (1 = right hub at (-a,-p), 2 = left hub at (-a,+p)).
namespace base_coord {
constexpr int kX = 0, kY = 1, kPhi = 2, kBeta1 = 3, kBeta2 = 4;
constexpr int kWheel1 = 5, kWheel2 = 6, kCastor1 = 7, kCastor2 = 8;
constexpr double kSide[2] = {-1.0, +1.0};  // index 0 = right wheel/castor, 1 = left
}  // namespace base_coord

// Rolling/no-slip rows: J(q_b) * q_b_dot = 0. 7 rows (two drive-wheel rolling,
// one shared axle lateral, rolling + lateral per castor), full row rank,
// null space dimension 2.
Eigen::Matrix<double, 7, 9> base_constraint_matrix(const Vector9d& q_b, const RobotParams& p);

// q_b_dot = S(q_b) * u with u = (v, omega). Columns span null(J). Throws
// CastorSingularity when the trail is ~0.
Eigen::Matrix<double, 9, 2> base_mobility_matrix(const Vector9d& q_b, const RobotParams& p);

// Analytic dS/dt along q_b_dot = S(q_b) u.
Eigen::Matrix<double, 9, 2> base_mobility_matrix_dot(const Vector9d& q_b, const Eigen::Vector2d& u,
                                                     const RobotParams& p);

}  // namespace robopainter
