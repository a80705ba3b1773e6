#include <cmath>

#include "robopainter/error.hpp"
#include "robopainter/kinematics.hpp"

namespace robopainter {

using namespace base_coord;


// Row derivation, all contact points at ground level:
//  drive wheel i at body (0, s_i b), axle on the body y axis:
//    rolling   x_b . v_c - r_f wf_i' = 0  ->  [cos, sin, -s_i b, ..., -r_f, ...]
//    lateral   y_b . v_c = 0, identical for both wheels -> one shared row
//  castor i: hub at body (-a, s_i p), wheel heading w = R(phi+beta_i) x,
//  wheel centre trails the hub by d along w:
//    rolling   w . v_hub = r_c wc_i'
//    lateral   n . v_hub + d (phi' + beta_i') = 0,  n = R(phi+beta_i) y
Eigen::Matrix<double, 7, 9> base_constraint_matrix(const Vector9d& q_b, const RobotParams& p) {
  const auto& g = p.geometry;
  const double phi = q_b[kPhi];
  const double c = std::cos(phi), s = std::sin(phi);

  Eigen::Matrix<double, 7, 9> J = Eigen::Matrix<double, 7, 9>::Zero();
  for (int i = 0; i < 2; ++i) {
    J(i, kX) = c;
    J(i, kY) = s;
    J(i, kPhi) = -kSide[i] * g.half_track;
    J(i, kWheel1 + i) = -g.drive_wheel_radius;
  }
  J(2, kX) = -s;
  J(2, kY) = c;

  for (int i = 0; i < 2; ++i) {
    const double beta = q_b[kBeta1 + i];
    const double cb = std::cos(phi + beta), sb = std::sin(phi + beta);
    const double cl = std::cos(beta), sl = std::sin(beta);
    const int roll = 3 + 2 * i, lat = 4 + 2 * i;
    J(roll, kX) = cb;
    J(roll, kY) = sb;
    J(roll, kPhi) = -kSide[i] * g.castor_mount_y * cl - g.castor_mount_x * sl;
    J(roll, kCastor1 + i) = -g.castor_wheel_radius;
    J(lat, kX) = -sb;
    J(lat, kY) = cb;
    J(lat, kPhi) = kSide[i] * g.castor_mount_y * sl - g.castor_mount_x * cl + g.castor_trail;
    J(lat, kBeta1 + i) = g.castor_trail;
  }
  return J;
}

Eigen::Matrix<double, 9, 2> base_mobility_matrix(const Vector9d& q_b, const RobotParams& p) {
  const auto& g = p.geometry;
  if (g.castor_trail < 1e-9)
    throw CastorSingularity("castor trail is zero; steering rate is unbounded");
  const double phi = q_b[kPhi];

  Eigen::Matrix<double, 9, 2> S = Eigen::Matrix<double, 9, 2>::Zero();
  S(kX, 0) = std::cos(phi);
  S(kY, 0) = std::sin(phi);
  S(kPhi, 1) = 1.0;
  for (int i = 0; i < 2; ++i) {
    const double beta = q_b[kBeta1 + i];
    const double cb = std::cos(beta), sb = std::sin(beta);
    S(kBeta1 + i, 0) = sb / g.castor_trail;
    S(kBeta1 + i, 1) = -(kSide[i] * g.castor_mount_y * sb - g.castor_mount_x * cb) / g.castor_trail - 1.0;
    S(kWheel1 + i, 0) = 1.0 / g.drive_wheel_radius;
    S(kWheel1 + i, 1) = -kSide[i] * g.half_track / g.drive_wheel_radius;
    S(kCastor1 + i, 0) = cb / g.castor_wheel_radius;
    S(kCastor1 + i, 1) = (-kSide[i] * g.castor_mount_y * cb - g.castor_mount_x * sb) / g.castor_wheel_radius;
  }
  return S;
}

Eigen::Matrix<double, 9, 2> base_mobility_matrix_dot(const Vector9d& q_b, const Eigen::Vector2d& u,
                                                     const RobotParams& p) {
  const auto& g = p.geometry;
  if (g.castor_trail < 1e-9)
    throw CastorSingularity("castor trail is zero; steering rate is unbounded");
  const double phi = q_b[kPhi];
  const double omega = u[1];
  const Eigen::Matrix<double, 9, 2> S = base_mobility_matrix(q_b, p);

  Eigen::Matrix<double, 9, 2> Sd = Eigen::Matrix<double, 9, 2>::Zero();
  Sd(kX, 0) = -std::sin(phi) * omega;
  Sd(kY, 0) = std::cos(phi) * omega;
  for (int i = 0; i < 2; ++i) {
    const double beta = q_b[kBeta1 + i];
    const double cb = std::cos(beta), sb = std::sin(beta);
    const double beta_dot = S(kBeta1 + i, 0) * u[0] + S(kBeta1 + i, 1) * u[1];
    Sd(kBeta1 + i, 0) = cb * beta_dot / g.castor_trail;
    Sd(kBeta1 + i, 1) = -(kSide[i] * g.castor_mount_y * cb + g.castor_mount_x * sb) * beta_dot / g.castor_trail;
    Sd(kCastor1 + i, 0) = -sb * beta_dot / g.castor_wheel_radius;
    Sd(kCastor1 + i, 1) = (kSide[i] * g.castor_mount_y * sb - g.castor_mount_x * cb) * beta_dot / g.castor_wheel_radius;
  }
  return Sd;
}

}  // namespace robopainter
