#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace robopainter {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector9d = Eigen::Matrix<double, 9, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix9d = Eigen::Matrix<double, 9, 9>;

Eigen::Matrix3d rot_x(double a);
Eigen::Matrix3d rot_z(double a);

// Rigid transform. Rotations drift under long composition chains, so compose
// re-orthonormalizes (polar projection) once the error passes 1e-9.
struct Transform {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();

  static Transform identity() { return {}; }

  Transform operator*(const Transform& o) const;
  Transform inverse() const;
  Eigen::Vector3d apply(const Eigen::Vector3d& x) const { return R * x + p; }

  // max |R^T R - I| entry
  double orthonormality_error() const;
  // nearest rotation (polar factor), det +1
  void renormalize();
};

// One row of the joint-frame table: frame i relative to frame i-1 is
// RotX(alpha) * TransX(d) * RotZ(theta_offset + q) * TransZ(r).
// joint = 1..6 selects the driven coordinate, joint = 0 marks a fixed row
// (the tool flange-to-nozzle offset).
struct KKRow {
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
  double r = 0.0;
  int joint = 0;
};

Transform kk_transform(const KKRow& row, double q);

}  // namespace robopainter
