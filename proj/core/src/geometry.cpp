#include "robopainter/geometry.hpp"

namespace robopainter {

Eigen::Matrix3d rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return m;
}

Eigen::Matrix3d rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d m;
  m << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return m;
}

Transform Transform::operator*(const Transform& o) const {
  Transform out;
  out.R = R * o.R;
  out.p = R * o.p + p;
  if (out.orthonormality_error() > 1e-9) out.renormalize();
  return out;
}

Transform Transform::inverse() const {
  Transform out;
  out.R = R.transpose();
  out.p = -(out.R * p);
  return out;
}

double Transform::orthonormality_error() const {
  return ((R.transpose() * R) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

void Transform::renormalize() {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  R = r;
}

Transform kk_transform(const KKRow& row, double q) {
  const double theta = row.theta_offset + (row.joint != 0 ? q : 0.0);
  Transform t;
  t.R = rot_x(row.alpha) * rot_z(theta);
  // translation: RotX(alpha) applied to (d, 0, r); TransZ rides on the
  // rotated z axis which RotZ leaves unchanged.
  t.p = rot_x(row.alpha) * Eigen::Vector3d(row.d, 0.0, row.r);
  return t;
}

}  // namespace robopainter
