#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "robopainter/coverage.hpp"
#include "robopainter/dynamics.hpp"
#include "robopainter/rng.hpp"
#include "robopainter/room.hpp"
#include "robopainter/sim.hpp"
#include "robopainter/trajectory.hpp"

namespace robopainter {

// ---------------------------------------------------------------- sonars ---

struct SonarMount {
  Eigen::Vector2d offset;  // in the base frame
  double bearing;          // ray direction relative to base +x
  const char* name;
};

enum class SonarStatus { Valid, OutOfRange, BelowMinRange };

struct SonarReading {
  SonarStatus status = SonarStatus::OutOfRange;
  double range = 0.0;  // meaningful only when Valid
};

// Ten ultrasonic mounts: FRONT (+x), RIGHT (-y), the SIDE pair (-y, 0.4 m
// baseline) used for wall orientation, and a six-way obstacle ring.
class SonarSuite {
 public:
  static constexpr int kFront = 0;
  static constexpr int kRight = 1;
  static constexpr int kSide1 = 2;  // forward member of the pair
  static constexpr int kSide2 = 3;
  static constexpr int kObsFirst = 4;
  static constexpr int kObsCount = 6;
  static constexpr int kCount = 10;

  static constexpr double kMinRange = 0.02;
  static constexpr double kMaxRange = 5.0;
  static constexpr double kResolution = 0.01;  // readings snap to 1 cm
  static constexpr double kNoiseSigma = 0.005;
  static constexpr double kPlaneHeight = 0.25;  // scan plane above the floor

  SonarSuite();
  const SonarMount& mount(int i) const { return mounts_[i]; }
  double side_baseline() const;

  // Ray origin/direction in the world for base pose (x, y, yaw).
  Eigen::Vector2d ray_origin(int i, const Eigen::Vector3d& pose) const;
  Eigen::Vector2d ray_dir(int i, const Eigen::Vector3d& pose) const;

  // True range against the room, then Gaussian noise and 1 cm quantisation;
  // out-of-band values degrade to OutOfRange / BelowMinRange.
  SonarReading measure(int i, const RoomModel& room, const Eigen::Vector3d& pose_true, double t,
                       Rng& rng) const;
  // Noise-free expected reading at a pose estimate (for innovation tests).
  double expected_range(int i, const RoomModel& room, const Eigen::Vector3d& pose, double t) const;

 private:
  std::array<SonarMount, kCount> mounts_;
};

// quantise a true range the way the hardware reports it
double quantise_range(double range);

// ---------------------------------------------------------- localization ---

// Yaw of the base x-axis relative to the plane the SIDE pair is facing:
// psi = atan((d1 - d2) / baseline), d1 the forward sonar of the pair.
double estimate_yaw(double side1, double side2, double baseline);

// Pose implied by seeing the registration corner: FRONT facing the wall y=0,
// RIGHT facing the wall x=0, with `yaw` the current heading estimate.
Eigen::Vector3d register_world_frame(double front_range, double right_range, double yaw,
                                     const SonarSuite& suite);

// Exact unicycle dead-reckoning over dt (closed-form arc).
Eigen::Vector3d dead_reckon(const Eigen::Vector3d& pose, const Eigen::Vector2d& u, double dt);

// Snap each pose component observed by a valid localisation sonar onto its
// reading, rejecting innovations larger than `gate` (0.3 m / 0.3 rad). Only
// FRONT/RIGHT/SIDE readings participate; returns the corrected pose.
Eigen::Vector3d correct_pose(const Eigen::Vector3d& pose,
                             const std::array<SonarReading, 4>& readings, const SonarSuite& suite,
                             const RoomModel& room, double t, double gate = 0.3);

// ------------------------------------------------------------- watchdogs ---

enum class GuardDecision { Clear, PauseRequired };

// Pause while anything intrudes inside the stop radius; release only after a
// sustained clear interval.
class ObstacleGuard {
 public:
  explicit ObstacleGuard(double stop_radius = 0.5, double clear_hold = 1.0);
  GuardDecision update(const std::array<SonarReading, SonarSuite::kObsCount>& ring, double t);
  GuardDecision state() const { return state_; }
  double stop_radius() const { return stop_radius_; }

 private:
  double stop_radius_, clear_hold_;
  GuardDecision state_ = GuardDecision::Clear;
  double clear_since_ = -1.0;
};

// Two-second window of tip acceleration at 200 Hz; RMS drives the empty-cup
// monitor (a healthy gun vibrates at 2.5-10 m/s^2 RMS while spraying).
class ImuWindow {
 public:
  static constexpr double kRate = 200.0;
  static constexpr double kSpan = 2.0;

  void push(const Eigen::Vector3d& accel);
  void clear();
  bool full() const;
  std::size_t size() const { return buffer_.size(); }
  double rms() const;  // throws WindowNotFull until 2 s have accumulated

 private:
  std::deque<Eigen::Vector3d> buffer_;
};

enum class CupState { Ok, Empty };

// Empty iff the whole window sits below the healthy vibration band.
CupState detect_empty_cup(const ImuWindow& window, double band_lo);

// ------------------------------------------------------------------ FSM ----

enum class MissionPhase {
  Init,
  SeekReliableLocation,
  MeasureOrientation,
  RegisterWorldFrame,
  NavigateToStart,
  PaintCoreStrip,
  PaintOutline,
  AdvancePost,
  RotateToNextWall,
  Paused,
  Terminated,
};

enum class PauseReason { None, Obstacle, EmptyCup };

const char* phase_name(MissionPhase p);

struct PhaseEvent {
  double t;
  MissionPhase phase;
  int wall = -1, post = -1, strip = -1;
  PauseReason reason = PauseReason::None;
};

struct MissionConfig {
  PlanTiming timing;
  double spray_capacity_s = 600.0;   // continuous spray seconds per cup
  double refill_delay_s = 20.0;      // operator swap time
  double correction_rate_hz = 20.0;  // sonar localisation rate (spray off)
  double imu_rate_hz = 200.0;
  double pose_gain = 0.25;  // executive smoothing over snapped corrections
  double yaw_gain = 0.10;
  double stop_radius = 0.5;
  double clear_hold_s = 1.0;
  double odom_noise_pos = 0.01;  // random-walk densities, m/sqrt(s), rad/sqrt(s)
  double odom_noise_yaw = 0.01;
  double settle_time_s = 0.3;  // dwell after each base move
  // arm tip pose while the cup is swapped: folded forward, nozzle ~0.8 m up
  Eigen::Vector3d refill_tip{0.5, 0.0, 0.8};
  double registration_dwell_s = 0.5;  // MeasureOrientation averaging window
};

// ----------------------------------------------------------------- report --

struct PauseRecord {
  double t_start = 0, t_end = 0;
  PauseReason reason = PauseReason::None;
};

struct MissionReport {
  int schema_version = 1;
  bool completed = false;
  double wall_area = 0.0;       // four walls, gross
  double opening_area = 0.0;    // excluded exactly
  double paintable_area = 0.0;  // wall_area - opening_area
  double painted_area = 0.0;
  double covered_fraction = 0.0;
  double spray_on_time = 0.0;
  double total_time = 0.0;
  double achieved_rate = 0.0;  // painted_area / total_time, m^2/h
  double pure_paint_rate = 0.0;
  double sustained_core_rate = 0.0;  // steady-state strip cycle, m^2/h
  double max_tracking_error = 0.0;   // tip deviation during strokes, m
  double max_constraint_residual = 0.0;  // ||J qdot|| of the rolling base at logged steps
  double registration_error_pos = 0.0;
  double registration_error_yaw = 0.0;
  double max_localization_error = 0.0;  // after registration, corrected
  double mean_localization_error = 0.0;
  double final_localization_error = 0.0;
  double energy_J = 0.0;  // integral of |Gamma . qdot|
  int refills = 0;
  std::vector<PauseRecord> pauses;
  std::vector<PhaseEvent> phase_trace;
  std::array<double, 4> wall_covered_fraction{};
  std::uint64_t seed = 0;
  bool localization_enabled = true;
  std::string notes;
};

std::string report_to_json(const MissionReport& r);

// One line per phase event ("t=... phase=... wall=... post=... strip=...
// reason=..."). This is the text frozen as the reference trace: byte-stable
// for a given seed and configuration.
std::string phase_trace_text(const MissionReport& r);

// ------------------------------------------------------------- executive ---

struct MissionOptions {
  bool corrections_enabled = true;  // disable to demonstrate unbounded drift
  bool emit_trace = true;
};

// Runs the whole job: registration, four walls of core strips and outline
// bands, pauses, refills; integrates the plant per SimConfig (dynamic or
// kinematic), rasterises true paint deposition, and accumulates the report.
MissionReport run_mission(const RobotParams& params, const RoomModel& room, const SimConfig& sim,
                          const MissionConfig& cfg, const MissionOptions& opts = {});

}  // namespace robopainter
