#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "robopainter/geometry.hpp"

namespace robopainter {

// Mass, centre of gravity (link frame, m) and inertia tensor about the CG
// (link frame axes, kg m^2). Stored in SI regardless of file units.
struct LinkInertial {
  double mass = 0.0;
  Eigen::Vector3d cg = Eigen::Vector3d::Zero();
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();
};

struct MotorParams {
  double rotor_inertia = 0.0;    // reflected to the joint, kg m^2
  double torque_constant = 0.0;  // N m / A
};

struct GeometricParams {
  // arm chain lengths/offsets (m)
  double rl1 = 0.0, d1 = 0.0, rl2 = 0.0, d3 = 0.0, rl4 = 0.0, d4 = 0.0, rl5 = 0.0, rl7 = 0.0;
  // base: drive wheels on the lateral axis at y = +-half_track; castor hubs
  // mounted at (-castor_mount_x, +-castor_mount_y); wheel centre trails the
  // hub axis by castor_trail.
  double castor_mount_x = 0.0;     // a
  double half_track = 0.0;         // b
  double castor_wheel_radius = 0;  // r_c
  double drive_wheel_radius = 0;   // r_f
  double castor_mount_y = 0.0;     // p
  double castor_trail = 0.0;       // d
  std::vector<KKRow> kk_table;     // 6 driven rows + fixed tool row
};

struct SprayParams {
  double pattern_width = 0.26;   // long axis, m
  double pattern_height = 0.05;  // short axis, m
  double standoff = 0.175;       // nozzle-to-wall, m
  double standoff_min = 0.10;
  double standoff_max = 0.25;
  double vibration_band_lo = 2.5;   // healthy gun-vibration RMS band, m/s^2
  double vibration_band_hi = 10.0;
  double reaction_force = 1.0;  // axial pushback while spraying, N
};

struct FrictionParams {
  double viscous = 0.1;  // N m s/rad per joint
  double coulomb = 0.05; // N m per joint
};

struct ValidationIssue {
  enum class Severity { Warning, Error };
  Severity severity;
  std::string what;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const {
    for (const auto& i : issues)
      if (i.severity == ValidationIssue::Severity::Error) return false;
    return true;
  }
  std::string to_string() const;
};

struct RobotParams {
  GeometricParams geometry;
  std::array<LinkInertial, 6> arm_links;
  LinkInertial base_body;
  LinkInertial castor_hub;    // steering fork/hub, one per castor
  LinkInertial castor_wheel;
  LinkInertial drive_wheel;
  std::array<MotorParams, 6> arm_motors;
  std::array<MotorParams, 2> wheel_motors;
  SprayParams spray;
  FrictionParams friction;
  // Original document text. Kept so serialization reproduces the file's
  // numeric values bit-exactly (unit re-conversion would not).
  std::string source_text;
};

// Parse + convert to SI + validate; throws ParamsError on parse/structure
// problems or any error-severity validation issue.
RobotParams load_robot_params(const std::string& path);
RobotParams parse_robot_params(const std::string& json_text);

// Re-emit. Loaded records reproduce their source document's values exactly;
// records built in code are emitted in SI metres.
std::string serialize_robot_params(const RobotParams& p);

// Physical consistency checks (positive masses, PSD inertias, wheel geometry,
// reach identity, mass budget). Triangle-inequality violations within 5%
// slack are warnings: the paper's printed values are rounded.
ValidationReport validate_params(const RobotParams& p);

// Full robot mass: 6 arm links + base + 2 hubs + 2 castor wheels + 2 drive wheels.
double total_mass(const RobotParams& p);

// Every table symbol -> SI value (RL1, D3, M6, X2, ZZb, XY2, Ia1, Kt2, ...).
std::map<std::string, double> symbol_table(const RobotParams& p);

}  // namespace robopainter
