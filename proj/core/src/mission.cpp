#include "robopainter/mission.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "robopainter/error.hpp"
#include "robopainter/log.hpp"

namespace robopainter {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a < -kPi) a += 2.0 * kPi;
  return a;
}

Eigen::Matrix2d rot2(double a) {
  Eigen::Matrix2d r;
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}
}  // namespace

// ----------------------------------------------------------------- sonars ---

SonarSuite::SonarSuite() {
  mounts_[kFront] = {{0.30, 0.0}, 0.0, "front"};
  mounts_[kRight] = {{0.0, -0.27}, -kPi / 2, "right"};
  mounts_[kSide1] = {{0.20, -0.27}, -kPi / 2, "side1"};
  mounts_[kSide2] = {{-0.20, -0.27}, -kPi / 2, "side2"};
  static const char* ring_names[kObsCount] = {"ring0", "ring60",  "ring120",
                                              "ring180", "ring240", "ring300"};
  for (int k = 0; k < kObsCount; ++k) {
    const double b = wrap_angle(k * kPi / 3.0);
    mounts_[kObsFirst + k] = {{0.25 * std::cos(b), 0.25 * std::sin(b)}, b, ring_names[k]};
  }
}

double SonarSuite::side_baseline() const {
  return mounts_[kSide1].offset.x() - mounts_[kSide2].offset.x();
}

Eigen::Vector2d SonarSuite::ray_origin(int i, const Eigen::Vector3d& pose) const {
  return pose.head<2>() + rot2(pose.z()) * mounts_[i].offset;
}

Eigen::Vector2d SonarSuite::ray_dir(int i, const Eigen::Vector3d& pose) const {
  const double a = pose.z() + mounts_[i].bearing;
  return {std::cos(a), std::sin(a)};
}

double quantise_range(double range) { return std::round(range * 100.0) / 100.0; }

SonarReading SonarSuite::measure(int i, const RoomModel& room, const Eigen::Vector3d& pose_true,
                                 double t, Rng& rng) const {
  // the noise draw happens unconditionally so the stream stays aligned
  // whatever the geometry does
  const double noise = rng.gaussian(0.0, kNoiseSigma);
  const double truth = room.raycast(ray_origin(i, pose_true), ray_dir(i, pose_true),
                                    kPlaneHeight, t);
  SonarReading r;
  if (!std::isfinite(truth)) {
    r.status = SonarStatus::OutOfRange;
    return r;
  }
  const double q = quantise_range(truth + noise);
  r.range = q;
  if (q > kMaxRange) {
    r.status = SonarStatus::OutOfRange;
  } else if (q < kMinRange) {
    r.status = SonarStatus::BelowMinRange;
  } else {
    r.status = SonarStatus::Valid;
  }
  return r;
}

double SonarSuite::expected_range(int i, const RoomModel& room, const Eigen::Vector3d& pose,
                                  double t) const {
  return room.raycast(ray_origin(i, pose), ray_dir(i, pose), kPlaneHeight, t);
}

// ---------------------------------------------------------- localization ---

double estimate_yaw(double side1, double side2, double baseline) {
  return std::atan((side1 - side2) / baseline);
}

Eigen::Vector3d register_world_frame(double front_range, double right_range, double yaw,
                                     const SonarSuite& suite) {
  const Eigen::Matrix2d R = rot2(yaw);
  const Eigen::Vector2d of = R * suite.mount(SonarSuite::kFront).offset;
  const Eigen::Vector2d orr = R * suite.mount(SonarSuite::kRight).offset;
  const double af = yaw + suite.mount(SonarSuite::kFront).bearing;
  const double ar = yaw + suite.mount(SonarSuite::kRight).bearing;
  // front faces the wall y = 0, right faces the wall x = 0
  const double py = front_range * std::abs(std::sin(af)) - of.y();
  const double px = right_range * std::abs(std::cos(ar)) - orr.x();
  return {px, py, yaw};
}

Eigen::Vector3d dead_reckon(const Eigen::Vector3d& pose, const Eigen::Vector2d& u, double dt) {
  const double v = u[0], w = u[1];
  Eigen::Vector3d out = pose;
  if (std::abs(w) < 1e-12) {
    out.x() += v * dt * std::cos(pose.z());
    out.y() += v * dt * std::sin(pose.z());
    return out;
  }
  const double phi1 = pose.z() + w * dt;
  out.x() += v / w * (std::sin(phi1) - std::sin(pose.z()));
  out.y() -= v / w * (std::cos(phi1) - std::cos(pose.z()));
  out.z() = phi1;
  return out;
}

namespace {

struct WallHit {
  int wall = -1;
  double dist = kInf;
};

// walls-only raycast that reports which wall was hit; a ray escaping through
// an opening reports no hit
WallHit wall_ray(const RoomModel& room, const Eigen::Vector2d& o, const Eigen::Vector2d& d,
                 double z_plane) {
  WallHit best;
  double best_u = 0.0;
  for (int w = 0; w < 4; ++w) {
    const Eigen::Vector2d n = room.wall_inward_normal(w);
    const double denom = n.dot(d);
    if (denom > -1e-9) continue;
    const double s = n.dot(room.wall_origin(w) - o) / denom;
    if (s < 1e-9 || s >= best.dist) continue;
    const Eigen::Vector2d hit = o + s * d;
    const double u = room.wall_u(w, hit);
    if (u < -1e-9 || u > room.wall_length(w) + 1e-9) continue;
    best.wall = w;
    best.dist = s;
    best_u = u;
  }
  if (best.wall >= 0) {
    for (const auto& op : room.walls[best.wall].openings) {
      if (best_u > op.u0 && best_u < op.u1 && z_plane > op.z0 && z_plane < op.z1) {
        return {};  // escapes through the hole
      }
    }
  }
  return best;
}

}  // namespace

Eigen::Vector3d correct_pose(const Eigen::Vector3d& pose,
                             const std::array<SonarReading, 4>& readings, const SonarSuite& suite,
                             const RoomModel& room, double t, double gate) {
  (void)t;
  Eigen::Vector3d out = pose;
  const double z = SonarSuite::kPlaneHeight;

  // yaw first, from the SIDE pair when both see the same wall
  const auto& s1 = readings[SonarSuite::kSide1];
  const auto& s2 = readings[SonarSuite::kSide2];
  if (s1.status == SonarStatus::Valid && s2.status == SonarStatus::Valid) {
    const WallHit h1 = wall_ray(room, suite.ray_origin(SonarSuite::kSide1, out),
                                suite.ray_dir(SonarSuite::kSide1, out), z);
    const WallHit h2 = wall_ray(room, suite.ray_origin(SonarSuite::kSide2, out),
                                suite.ray_dir(SonarSuite::kSide2, out), z);
    if (h1.wall >= 0 && h1.wall == h2.wall) {
      const double psi = estimate_yaw(s1.range, s2.range, suite.side_baseline());
      const Eigen::Vector2d n = room.wall_inward_normal(h1.wall);
      // heading at which the pair faces this wall squarely
      const double square = std::atan2(-n.y(), -n.x()) - suite.mount(SonarSuite::kSide1).bearing;
      const double dpsi = wrap_angle(square + psi - out.z());
      if (std::abs(dpsi) <= gate) out.z() = wrap_angle(out.z() + dpsi);
    }
  }

  // then the position components, one sonar at a time
  for (int i : {SonarSuite::kFront, SonarSuite::kRight, SonarSuite::kSide1, SonarSuite::kSide2}) {
    const auto& r = readings[i];
    if (r.status != SonarStatus::Valid) continue;
    const Eigen::Vector2d o = suite.ray_origin(i, out);
    const Eigen::Vector2d d = suite.ray_dir(i, out);
    const WallHit hit = wall_ray(room, o, d, z);
    if (hit.wall < 0) continue;
    const double e = r.range - hit.dist;
    if (std::abs(e) > gate) continue;
    const Eigen::Vector2d n = room.wall_inward_normal(hit.wall);
    out.head<2>() += e * std::abs(d.dot(n)) * n;
  }
  return out;
}

// ------------------------------------------------------------- watchdogs ---

ObstacleGuard::ObstacleGuard(double stop_radius, double clear_hold)
    : stop_radius_(stop_radius), clear_hold_(clear_hold) {}

GuardDecision ObstacleGuard::update(const std::array<SonarReading, SonarSuite::kObsCount>& ring,
                                    double t) {
  bool intrusion = false;
  for (const auto& r : ring) {
    if (r.status == SonarStatus::BelowMinRange) intrusion = true;
    if (r.status == SonarStatus::Valid && r.range < stop_radius_) intrusion = true;
  }
  if (intrusion) {
    state_ = GuardDecision::PauseRequired;
    clear_since_ = -1.0;
  } else if (state_ == GuardDecision::PauseRequired) {
    if (clear_since_ < 0.0) clear_since_ = t;
    if (t - clear_since_ >= clear_hold_) {
      state_ = GuardDecision::Clear;
      clear_since_ = -1.0;
    }
  }
  return state_;
}

void ImuWindow::push(const Eigen::Vector3d& accel) {
  buffer_.push_back(accel);
  const std::size_t cap = static_cast<std::size_t>(kRate * kSpan);
  while (buffer_.size() > cap) buffer_.pop_front();
}

void ImuWindow::clear() { buffer_.clear(); }

bool ImuWindow::full() const {
  return buffer_.size() >= static_cast<std::size_t>(kRate * kSpan);
}

double ImuWindow::rms() const {
  if (!full()) {
    throw WindowNotFull("vibration window holds " + std::to_string(buffer_.size()) +
                        " samples; a full 2 s window is required");
  }
  double s = 0.0;
  for (const auto& a : buffer_) s += a.squaredNorm();
  return std::sqrt(s / static_cast<double>(buffer_.size()));
}

CupState detect_empty_cup(const ImuWindow& window, double band_lo) {
  if (!window.full()) return CupState::Ok;
  return window.rms() < band_lo ? CupState::Empty : CupState::Ok;
}

// ------------------------------------------------------------------ FSM ----

const char* phase_name(MissionPhase p) {
  switch (p) {
    case MissionPhase::Init: return "Init";
    case MissionPhase::SeekReliableLocation: return "SeekReliableLocation";
    case MissionPhase::MeasureOrientation: return "MeasureOrientation";
    case MissionPhase::RegisterWorldFrame: return "RegisterWorldFrame";
    case MissionPhase::NavigateToStart: return "NavigateToStart";
    case MissionPhase::PaintCoreStrip: return "PaintCoreStrip";
    case MissionPhase::PaintOutline: return "PaintOutline";
    case MissionPhase::AdvancePost: return "AdvancePost";
    case MissionPhase::RotateToNextWall: return "RotateToNextWall";
    case MissionPhase::Paused: return "Paused";
    case MissionPhase::Terminated: return "Terminated";
  }
  return "?";
}

static const char* pause_reason_name(PauseReason r) {
  switch (r) {
    case PauseReason::None: return "None";
    case PauseReason::Obstacle: return "Obstacle";
    case PauseReason::EmptyCup: return "EmptyCup";
  }
  return "?";
}

std::string report_to_json(const MissionReport& r) {
  nlohmann::json j;
  j["schema_version"] = r.schema_version;
  j["completed"] = r.completed;
  j["seed"] = r.seed;
  j["localization_enabled"] = r.localization_enabled;
  j["area"] = {{"wall_m2", r.wall_area},
               {"openings_m2", r.opening_area},
               {"paintable_m2", r.paintable_area},
               {"painted_m2", r.painted_area},
               {"covered_fraction", r.covered_fraction},
               {"per_wall_fraction", r.wall_covered_fraction}};
  j["time"] = {{"total_s", r.total_time}, {"spray_on_s", r.spray_on_time}};
  j["rates_m2h"] = {{"achieved", r.achieved_rate},
                    {"pure_paint", r.pure_paint_rate},
                    {"sustained_core", r.sustained_core_rate}};
  j["tracking"] = {{"max_tip_error_m", r.max_tracking_error},
                   {"max_constraint_residual", r.max_constraint_residual}};
  j["localization"] = {{"registration_pos_m", r.registration_error_pos},
                       {"registration_yaw_rad", r.registration_error_yaw},
                       {"max_error_m", r.max_localization_error},
                       {"mean_error_m", r.mean_localization_error},
                       {"final_error_m", r.final_localization_error}};
  j["energy_J"] = r.energy_J;
  j["refills"] = r.refills;
  j["pauses"] = nlohmann::json::array();
  for (const auto& p : r.pauses) {
    j["pauses"].push_back({{"t_start", p.t_start},
                           {"t_end", p.t_end},
                           {"reason", pause_reason_name(p.reason)}});
  }
  j["phase_trace"] = nlohmann::json::array();
  for (const auto& e : r.phase_trace) {
    j["phase_trace"].push_back({{"t", e.t},
                                {"phase", phase_name(e.phase)},
                                {"wall", e.wall},
                                {"post", e.post},
                                {"strip", e.strip},
                                {"reason", pause_reason_name(e.reason)}});
  }
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j.dump(2);
}

std::string phase_trace_text(const MissionReport& r) {
  std::string out;
  char buf[160];
  for (const auto& e : r.phase_trace) {
    std::snprintf(buf, sizeof(buf), "t=%.3f phase=%s wall=%d post=%d strip=%d reason=%s\n", e.t,
                  phase_name(e.phase), e.wall, e.post, e.strip, pause_reason_name(e.reason));
    out += buf;
  }
  return out;
}

// ------------------------------------------------------------- executive ---

namespace {

constexpr double kTurnVmax = 1.0;   // rad/s during point turns
constexpr double kTurnAccel = 2.0;  // rad/s^2

// nozzle pitch-up schedule near the top of core strips: the wrist cannot hold
// a horizontal gun at 2.45 m across the full lateral span, so the gun tilts
// like a human painter does near the ceiling line
double core_pitch(double z, double core_top) {
  const double z0 = 2.0;
  if (z <= z0 || core_top <= z0) return 0.0;
  double s = std::clamp((z - z0) / (core_top - z0), 0.0, 1.0);
  s = s * s * (3.0 - 2.0 * s);
  return s * (kPi / 4.0);
}

Transform tip_pose_world(const RoomModel& room, int wall, const Eigen::Vector2d& wallpt,
                         double standoff, bool outline, double core_top) {
  const Eigen::Vector2d n2 = room.wall_inward_normal(wall);
  const Eigen::Vector2d t2 = room.wall_tangent(wall);
  const Eigen::Vector3d n(n2.x(), n2.y(), 0.0);
  const Eigen::Vector3d tw(t2.x(), t2.y(), 0.0);
  const Eigen::Vector3d up(0.0, 0.0, 1.0);
  const double pitch = outline ? kPi / 4.0 : core_pitch(wallpt.y(), core_top);
  const Eigen::Vector3d zt = -std::cos(pitch) * n + std::sin(pitch) * up;  // spray direction
  const Eigen::Vector3d xt =
      outline ? (std::sin(pitch) * n + std::cos(pitch) * up).eval() : tw;  // pattern width axis
  const Eigen::Vector3d yt = zt.cross(xt);
  Transform T;
  T.R.col(0) = xt;
  T.R.col(1) = yt;
  T.R.col(2) = zt;
  const Eigen::Vector2d w2 = room.wall_origin(wall) + wallpt.x() * t2;
  T.p = Eigen::Vector3d(w2.x(), w2.y(), wallpt.y()) - standoff * zt;
  return T;
}

Transform world_to_base(const Eigen::Vector3d& pose, const Transform& Tw) {
  const Eigen::Matrix3d R = rot_z(pose.z());
  Transform Tb;
  Tb.R = R.transpose() * Tw.R;
  Tb.p = R.transpose() * (Tw.p - Eigen::Vector3d(pose.x(), pose.y(), 0.0));
  return Tb;
}

enum class StepKind { Dwell, Seek, Measure, Register, BaseGoto, ArmLegs, Terminate };

struct ScriptStep {
  MissionPhase phase = MissionPhase::Init;
  StepKind kind = StepKind::Dwell;
  int wall = -1, post = -1;
  double dwell = 0.0;
  // BaseGoto
  Eigen::Vector3d target = Eigen::Vector3d::Zero();
  double settle = 0.0;
  bool has_arm_target = false;
  Eigen::Vector2d arm_wallpt = Eigen::Vector2d::Zero();
  bool arm_outline = false;
  // ArmLegs
  std::vector<TipLeg> legs;
  bool outline = false;
};

struct GotoRt {
  int stage = -1;  // -1 plan, 0 turn-to-course, 1 drive, 2 turn-to-heading, 3 settle
  double stage_t = 0.0;
  TrapezoidProfile turn1, drive, turn2;
  double course = 0.0;
};

struct JointMoveRt {
  bool active = false;
  std::array<QuinticSegment, 6> seg;
  double duration = 0.0;
  double t = 0.0;
};

struct LegsRt {
  int idx = 0;
  double t = 0.0;
  int strip_entry_idx = 0;
  int last_strip = -1;
  int approach_tries = 0;
};

class Executive {
 public:
  Executive(const RobotParams& params, const RoomModel& room, const SimConfig& sim,
            const MissionConfig& cfg, const MissionOptions& opts)
      : params_(params),
        room_(room),
        simcfg_(sim),
        cfg_(cfg),
        opts_(opts),
        kin_(params),
        adyn_(params),
        bdyn_(params),
        spray_(params, sim.seed),
        plant_(adyn_, &spray_, params.friction),
        bplant_(bdyn_, params_),
        rng_master_(sim.seed),
        rng_sonar_(rng_master_.fork()),
        rng_odom_(rng_master_.fork()) {}

  MissionReport run();

 private:
  // --- setup ---
  void build_plan();
  void build_script();
  Eigen::Vector3d post_pose(int wall, const BasePost& post) const;

  // --- per-tick ---
  void sensors();
  void references();
  void integrate();
  void truth_and_logs();

  void advance_step();
  void enter_pause(PauseReason reason);
  void leave_pause();
  void emit(MissionPhase ph, int wall, int post, int strip,
            PauseReason reason = PauseReason::None);
  void plan_joint_move_to(const Transform& tip_base, double duration);
  void plan_goto(const ScriptStep& st);
  Transform leg_tip_world(const ScriptStep& st, const TipLeg& leg, double s01) const;
  Transform arrival_tip_base(const ScriptStep& st) const;

  const RobotParams& params_;
  const RoomModel& room_;
  SimConfig simcfg_;
  MissionConfig cfg_;
  MissionOptions opts_;

  ArmKinematics kin_;
  ArmDynamics adyn_;
  BaseDynamics bdyn_;
  SprayDisturbance spray_;
  ArmPlant plant_;
  BasePlant bplant_;
  SonarSuite suite_;
  ObstacleGuard guard_{0.5, 1.0};
  ImuWindow imu_;
  Rng rng_master_, rng_sonar_, rng_odom_;

  PaintPlan plan_;
  std::vector<CoverageGrid> grids_;
  std::vector<ScriptStep> script_;

  // sim state
  double t_ = 0.0;
  std::uint64_t tick_ = 0;
  int corr_period_ = 50, imu_period_ = 5, trace_period_ = 100, csv_period_ = 10;
  std::size_t si_ = 0;
  bool done_ = false;

  ArmState arm_;
  Vector6d q_ref_ = (Vector6d() << 0.0, -0.5, 1.0, 0.0, 1.0, 0.0).finished();
  Vector6d qd_ref_ = Vector6d::Zero();
  Vector6d qdd_ref_ = Vector6d::Zero();
  Vector6d tau_cmd_ = Vector6d::Zero();
  Transform tip_target_base_;  // valid while tracking legs
  bool tracking_tip_ = false;

  BaseSimState base_;
  Eigen::Vector2d u_ref_ = Eigen::Vector2d::Zero();
  Eigen::Vector2d u_ref_prev_ = Eigen::Vector2d::Zero();
  bool braked_ = true;

  Eigen::Vector3d est_ = Eigen::Vector3d::Zero();
  bool registered_ = false;

  bool spray_cmd_ = false;
  double paint_left_s_ = 0.0;
  bool depositing_prev_ = false;
  Eigen::Vector2d prev_aim_ = Eigen::Vector2d::Zero();

  bool paused_ = false;
  PauseReason pause_reason_ = PauseReason::None;
  int refill_stage_ = -1;  // 0 fold to cup, 1 swap dwell, 2 done
  double refill_t_ = 0.0;

  GotoRt goto_rt_;
  JointMoveRt jmove_;
  LegsRt legs_rt_;
  bool approach_pending_ = false;
  double dwell_t_ = 0.0;
  double seek_valid_streak_ = 0.0;
  int measure_count_ = 0;
  double measure_front_ = 0.0, measure_right_ = 0.0, measure_s1_ = 0.0, measure_s2_ = 0.0;
  // averaged corner ranges, frozen when MeasureOrientation completes
  double avg_front_ = 0.0, avg_right_ = 0.0, avg_s1_ = 0.0, avg_s2_ = 0.0;
  MissionPhase last_emitted_ = MissionPhase::Init;
  bool init_emitted_ = false;

  MissionReport report_;
  double loc_err_sum_ = 0.0;
  std::uint64_t loc_err_count_ = 0;

  std::ofstream trace_out_, csv_out_;
};

Eigen::Vector3d Executive::post_pose(int wall, const BasePost& post) const {
  const Eigen::Vector2d p = room_.world_from_wall(wall, post.u, post.distance);
  return {p.x(), p.y(), room_.wall_heading(wall)};
}

void Executive::build_plan() {
  plan_.timing = cfg_.timing;
  plan_.pure_paint_rate = 0.25 * 2.45 / cfg_.timing.stroke_duration * 3600.0;
  for (int w = 0; w < 4; ++w) {
    plan_.walls.push_back(plan_wall(w, room_.wall_length(w), room_.height,
                                    room_.opening_rects(w), params_.spray, cfg_.timing));
    plan_.total_paintable_area += plan_.walls.back().paintable_area;
    plan_.total_planned_spray_time += plan_.walls.back().planned_spray_time;
    grids_.emplace_back(room_.wall_length(w), room_.height, room_.opening_rects(w));
  }
}

void Executive::build_script() {
  ScriptStep init;
  init.phase = MissionPhase::Init;
  init.kind = StepKind::Dwell;
  init.dwell = 0.2;
  script_.push_back(init);

  ScriptStep seek;
  seek.phase = MissionPhase::SeekReliableLocation;
  seek.kind = StepKind::Seek;
  script_.push_back(seek);

  ScriptStep meas;
  meas.phase = MissionPhase::MeasureOrientation;
  meas.kind = StepKind::Measure;
  meas.dwell = cfg_.registration_dwell_s;
  script_.push_back(meas);

  ScriptStep reg;
  reg.phase = MissionPhase::RegisterWorldFrame;
  reg.kind = StepKind::Register;
  script_.push_back(reg);

  for (int w = 0; w < 4; ++w) {
    const WallPlan& wall = plan_.walls[w];
    const int nposts = static_cast<int>(wall.posts.size());
    for (int p = 0; p < nposts; ++p) {
      const PostPlan& pp = wall.posts[p];
      if (p == 0) {
        ScriptStep go;
        go.phase = (w == 0) ? MissionPhase::NavigateToStart : MissionPhase::RotateToNextWall;
        go.kind = StepKind::BaseGoto;
        go.wall = w;
        go.post = 0;
        go.target = post_pose(w, pp.post);
        go.settle = cfg_.settle_time_s;
        go.has_arm_target = true;
        go.arm_wallpt = pp.core_legs.front().a;
        go.arm_outline = false;
        script_.push_back(go);
      }
      ScriptStep legs;
      legs.phase = MissionPhase::PaintCoreStrip;
      legs.kind = StepKind::ArmLegs;
      legs.wall = w;
      legs.post = p;
      legs.legs = pp.core_legs;
      legs.outline = false;
      script_.push_back(legs);
      if (p + 1 < nposts) {
        const PostPlan& np = wall.posts[p + 1];
        ScriptStep hop;
        hop.phase = MissionPhase::AdvancePost;
        hop.kind = StepKind::BaseGoto;
        hop.wall = w;
        hop.post = p + 1;
        hop.target = post_pose(w, np.post);
        hop.settle = 0.0;  // strokes only start once the profile has ended at rest
        hop.has_arm_target = true;
        hop.arm_wallpt = np.core_legs.front().a;
        hop.arm_outline = false;
        script_.push_back(hop);
      }
    }
    // top outline band: revisit every post left to right
    for (int p = 0; p < nposts; ++p) {
      const PostPlan& pp = wall.posts[p];
      if (pp.outline_legs.empty()) continue;
      ScriptStep go;
      go.phase = MissionPhase::PaintOutline;
      go.kind = StepKind::BaseGoto;
      go.wall = w;
      go.post = p;
      go.target = post_pose(w, pp.post);
      go.settle = (p == 0) ? cfg_.settle_time_s : 0.0;
      go.has_arm_target = true;
      go.arm_wallpt = pp.outline_legs.front().a;
      go.arm_outline = true;
      script_.push_back(go);

      ScriptStep legs;
      legs.phase = MissionPhase::PaintOutline;
      legs.kind = StepKind::ArmLegs;
      legs.wall = w;
      legs.post = p;
      legs.legs = pp.outline_legs;
      legs.outline = true;
      script_.push_back(legs);
    }
  }
  ScriptStep term;
  term.phase = MissionPhase::Terminated;
  term.kind = StepKind::Terminate;
  script_.push_back(term);
}

void Executive::emit(MissionPhase ph, int wall, int post, int strip, PauseReason reason) {
  PhaseEvent e;
  e.t = t_;
  e.phase = ph;
  e.wall = wall;
  e.post = post;
  e.strip = strip;
  e.reason = reason;
  report_.phase_trace.push_back(e);
  last_emitted_ = ph;
}

void Executive::plan_joint_move_to(const Transform& tip_base, double duration) {
  const IkResult res = kin_.ik(tip_base, q_ref_);
  if (!res.converged) {
    log(LogLevel::Warn, "arm target out of easy reach (residual " +
                            std::to_string(res.pos_residual) + " m); holding best solution");
  }
  // stretch short moves so the peak joint speed stays under ~2 rad/s
  const double dq_max = (res.q - q_ref_).cwiseAbs().maxCoeff();
  jmove_.active = true;
  jmove_.duration = std::max({0.3, duration, dq_max});
  jmove_.t = 0.0;
  for (int i = 0; i < 6; ++i) {
    jmove_.seg[i] = quintic_segment(q_ref_[i], res.q[i], jmove_.duration);
  }
}

Transform Executive::arrival_tip_base(const ScriptStep& st) const {
  const double core_top = plan_.walls[st.wall].core_top;
  const Transform Tw = tip_pose_world(room_, st.wall, st.arm_wallpt, params_.spray.standoff,
                                      st.arm_outline, core_top);
  return world_to_base(st.target, Tw);
}

void Executive::plan_goto(const ScriptStep& st) {
  const Eigen::Vector2d delta = st.target.head<2>() - est_.head<2>();
  const double dist = delta.norm();
  goto_rt_.course = dist > 0.02 ? std::atan2(delta.y(), delta.x()) : est_.z();
  goto_rt_.turn1 =
      TrapezoidProfile{wrap_angle(goto_rt_.course - est_.z()), kTurnVmax, kTurnAccel};
  goto_rt_.drive = TrapezoidProfile{dist, cfg_.timing.hop_vmax, cfg_.timing.hop_accel};
  goto_rt_.turn2 =
      TrapezoidProfile{wrap_angle(st.target.z() - goto_rt_.course), kTurnVmax, kTurnAccel};
  goto_rt_.stage = 0;
  goto_rt_.stage_t = 0.0;
  if (st.has_arm_target) {
    const double total = goto_rt_.turn1.duration() + goto_rt_.drive.duration() +
                         goto_rt_.turn2.duration() + st.settle;
    plan_joint_move_to(arrival_tip_base(st), std::max(0.8, total));
  }
  // the base inertia felt by the wheels includes the arm frozen at its pose
  bdyn_.set_arm_configuration(q_ref_);
}

Transform Executive::leg_tip_world(const ScriptStep& st, const TipLeg& leg, double s01) const {
  const Eigen::Vector2d wallpt = leg.a + s01 * (leg.b - leg.a);
  const double core_top = plan_.walls[st.wall].core_top;
  return tip_pose_world(room_, st.wall, wallpt, params_.spray.standoff, st.outline, core_top);
}

void Executive::advance_step() {
  ++si_;
  goto_rt_ = GotoRt{};
  legs_rt_ = LegsRt{};
  dwell_t_ = 0.0;
  seek_valid_streak_ = 0.0;
  measure_count_ = 0;
  measure_front_ = measure_right_ = measure_s1_ = measure_s2_ = 0.0;
  approach_pending_ = true;
  if (si_ < script_.size()) {
    const ScriptStep& st = script_[si_];
    const bool per_strip = st.kind == StepKind::ArmLegs && !st.outline;
    if (!per_strip && st.phase != last_emitted_) {
      emit(st.phase, st.wall, st.post, -1);
    }
  }
}

void Executive::enter_pause(PauseReason reason) {
  paused_ = true;
  pause_reason_ = reason;
  PauseRecord rec;
  rec.t_start = t_;
  rec.reason = reason;
  report_.pauses.push_back(rec);
  spray_cmd_ = false;
  ScriptStep& st = script_[si_];
  if (st.kind == StepKind::ArmLegs) {
    // the whole interrupted strip is repainted on resume
    legs_rt_.idx = legs_rt_.strip_entry_idx;
    legs_rt_.t = 0.0;
    approach_pending_ = true;
  } else if (st.kind == StepKind::BaseGoto) {
    goto_rt_.stage = -1;  // replan from wherever we stopped
  }
  if (reason == PauseReason::EmptyCup) {
    refill_stage_ = 0;
    refill_t_ = 0.0;
    Transform fold;
    fold.R.col(0) = Eigen::Vector3d(0, 0, -1);
    fold.R.col(1) = Eigen::Vector3d(0, 1, 0);
    fold.R.col(2) = Eigen::Vector3d(1, 0, 0);
    fold.p = cfg_.refill_tip;
    plan_joint_move_to(fold, 2.0);
  }
  emit(MissionPhase::Paused, st.wall, st.post, -1, reason);
}

void Executive::leave_pause() {
  paused_ = false;
  pause_reason_ = PauseReason::None;
  refill_stage_ = -1;
  report_.pauses.back().t_end = t_;
  const ScriptStep& st = script_[si_];
  emit(st.phase, st.wall, st.post, -1);
  if (st.kind == StepKind::ArmLegs) {
    approach_pending_ = true;
  }
}

void Executive::sensors() {
  const Eigen::Vector3d true_pose(base_.q[base_coord::kX], base_.q[base_coord::kY],
                                  base_.q[base_coord::kPhi]);
  // localisation corrections at 20 Hz while the gun is off
  if (tick_ % corr_period_ == 0 && registered_ && opts_.corrections_enabled && !spray_cmd_) {
    std::array<SonarReading, 4> loc;
    for (int i = 0; i < 4; ++i) loc[i] = suite_.measure(i, room_, true_pose, t_, rng_sonar_);
    const Eigen::Vector3d snapped = correct_pose(est_, loc, suite_, room_, t_);
    est_.head<2>() += cfg_.pose_gain * (snapped.head<2>() - est_.head<2>());
    est_.z() = wrap_angle(est_.z() + cfg_.yaw_gain * wrap_angle(snapped.z() - est_.z()));
  }
  // obstacle ring at 20 Hz from Init onwards
  if (tick_ % corr_period_ == 0 && si_ > 0) {
    std::array<SonarReading, SonarSuite::kObsCount> ring;
    for (int k = 0; k < SonarSuite::kObsCount; ++k) {
      const int idx = SonarSuite::kObsFirst + k;
      SonarReading r = suite_.measure(idx, room_, true_pose, t_, rng_sonar_);
      if (registered_ && r.status != SonarStatus::OutOfRange) {
        // known walls are expected echoes, not intruders; that includes
        // dead-zone returns when a corner post parks the ring against a wall
        const Eigen::Vector2d org = suite_.ray_origin(idx, est_);
        const Eigen::Vector2d dir = suite_.ray_dir(idx, est_);
        WallHit exp = wall_ray(room_, org, dir, SonarSuite::kPlaneHeight);
        if (exp.wall < 0) {
          // a pose-estimate error can poke a mount origin just past a wall
          // plane; recast from slightly behind so that wall still registers
          exp = wall_ray(room_, org - 0.08 * dir, dir, SonarSuite::kPlaneHeight);
          if (exp.wall >= 0) exp.dist -= 0.08;
        }
        const double expected = exp.wall >= 0 ? exp.dist : kInf;
        const bool explained = (r.status == SonarStatus::Valid && expected - r.range <= 0.10) ||
                               (r.status == SonarStatus::BelowMinRange &&
                                expected <= SonarSuite::kMinRange + 0.10);
        if (explained) r.status = SonarStatus::OutOfRange;
      }
      ring[k] = r;
    }
    const GuardDecision d = guard_.update(ring, t_);
    if (d == GuardDecision::PauseRequired && !paused_ &&
        script_[si_].phase != MissionPhase::Terminated) {
      enter_pause(PauseReason::Obstacle);
    } else if (d == GuardDecision::Clear && paused_ && pause_reason_ == PauseReason::Obstacle) {
      leave_pause();
    }
  }
  // gun-mount IMU at 200 Hz while spraying
  if (tick_ % imu_period_ == 0) {
    if (spray_cmd_) {
      imu_.push(spray_.tip_acceleration(t_, true, paint_left_s_ > 0.0));
      if (!paused_ && detect_empty_cup(imu_, params_.spray.vibration_band_lo) == CupState::Empty) {
        enter_pause(PauseReason::EmptyCup);
        imu_.clear();
      }
    } else if (imu_.size() > 0) {
      imu_.clear();
    }
  }
}

void Executive::references() {
  ScriptStep& st = script_[si_];
  spray_cmd_ = false;
  tracking_tip_ = false;

  if (paused_) {
    u_ref_.setZero();
    braked_ = true;
    if (pause_reason_ == PauseReason::EmptyCup) {
      switch (refill_stage_) {
        case 0:
          if (!jmove_.active) {
            refill_stage_ = 1;
            refill_t_ = 0.0;
          }
          break;
        case 1:
          refill_t_ += simcfg_.dt;
          if (refill_t_ >= cfg_.refill_delay_s) {
            paint_left_s_ = cfg_.spray_capacity_s;
            ++report_.refills;
            refill_stage_ = 2;
          }
          break;
        default:
          if (guard_.state() == GuardDecision::Clear) leave_pause();
          break;
      }
    }
    return;
  }

  switch (st.kind) {
    case StepKind::Dwell: {
      u_ref_.setZero();
      braked_ = true;
      if (!init_emitted_) {
        emit(st.phase, st.wall, st.post, -1);
        init_emitted_ = true;
      }
      dwell_t_ += simcfg_.dt;
      if (dwell_t_ >= st.dwell) advance_step();
      break;
    }
    case StepKind::Seek: {
      braked_ = false;
      const Eigen::Vector3d true_pose(base_.q[base_coord::kX], base_.q[base_coord::kY],
                                      base_.q[base_coord::kPhi]);
      bool ok = false;
      if (tick_ % corr_period_ == 0) {
        const SonarReading f = suite_.measure(SonarSuite::kFront, room_, true_pose, t_, rng_sonar_);
        const SonarReading r = suite_.measure(SonarSuite::kRight, room_, true_pose, t_, rng_sonar_);
        ok = f.status == SonarStatus::Valid && r.status == SonarStatus::Valid;
        seek_valid_streak_ = ok ? seek_valid_streak_ + corr_period_ * simcfg_.dt : 0.0;
      }
      if (seek_valid_streak_ >= 0.2) {
        u_ref_.setZero();
        advance_step();
      } else {
        // scan slowly until the corner pair answers
        u_ref_ = Eigen::Vector2d(0.0, seek_valid_streak_ > 0.0 ? 0.0 : 0.3);
        dwell_t_ += simcfg_.dt;
        if (dwell_t_ > 30.0) {
          throw MissionError("cannot acquire the registration corner: front/right sonars "
                             "never both returned valid ranges");
        }
      }
      break;
    }
    case StepKind::Measure: {
      u_ref_.setZero();
      braked_ = true;
      const Eigen::Vector3d true_pose(base_.q[base_coord::kX], base_.q[base_coord::kY],
                                      base_.q[base_coord::kPhi]);
      if (tick_ % corr_period_ == 0) {
        const SonarReading f = suite_.measure(SonarSuite::kFront, room_, true_pose, t_, rng_sonar_);
        const SonarReading r = suite_.measure(SonarSuite::kRight, room_, true_pose, t_, rng_sonar_);
        const SonarReading s1 = suite_.measure(SonarSuite::kSide1, room_, true_pose, t_, rng_sonar_);
        const SonarReading s2 = suite_.measure(SonarSuite::kSide2, room_, true_pose, t_, rng_sonar_);
        if (f.status == SonarStatus::Valid && r.status == SonarStatus::Valid &&
            s1.status == SonarStatus::Valid && s2.status == SonarStatus::Valid) {
          measure_front_ += f.range;
          measure_right_ += r.range;
          measure_s1_ += s1.range;
          measure_s2_ += s2.range;
          ++measure_count_;
        }
      }
      dwell_t_ += simcfg_.dt;
      if (dwell_t_ >= st.dwell && measure_count_ >= 3) {
        const double n = static_cast<double>(measure_count_);
        avg_front_ = measure_front_ / n;
        avg_right_ = measure_right_ / n;
        avg_s1_ = measure_s1_ / n;
        avg_s2_ = measure_s2_ / n;
        advance_step();
      } else if (dwell_t_ > 10.0) {
        throw MissionError("orientation measurement starved of valid side-sonar pairs");
      }
      break;
    }
    case StepKind::Register: {
      u_ref_.setZero();
      braked_ = true;
      // side pair faces the wall x = 0; at the square heading -pi/2 the pair
      // reads equal ranges, so the measured skew is the yaw offset
      const double psi = estimate_yaw(avg_s1_, avg_s2_, suite_.side_baseline());
      const double phi_hat = wrap_angle(-kPi / 2.0 + psi);
      est_ = register_world_frame(avg_front_, avg_right_, phi_hat, suite_);
      registered_ = true;
      const Eigen::Vector3d true_pose(base_.q[base_coord::kX], base_.q[base_coord::kY],
                                      base_.q[base_coord::kPhi]);
      report_.registration_error_pos = (est_.head<2>() - true_pose.head<2>()).norm();
      report_.registration_error_yaw = std::abs(wrap_angle(est_.z() - true_pose.z()));
      advance_step();
      break;
    }
    case StepKind::BaseGoto: {
      if (goto_rt_.stage < 0) plan_goto(st);
      braked_ = false;
      goto_rt_.stage_t += simcfg_.dt;
      double v = 0.0, w = 0.0;
      switch (goto_rt_.stage) {
        case 0:
          w = goto_rt_.turn1.velocity(goto_rt_.stage_t);
          if (goto_rt_.stage_t >= goto_rt_.turn1.duration()) {
            goto_rt_.stage = 1;
            goto_rt_.stage_t = 0.0;
          }
          break;
        case 1:
          v = goto_rt_.drive.velocity(goto_rt_.stage_t);
          if (goto_rt_.stage_t >= goto_rt_.drive.duration()) {
            goto_rt_.stage = 2;
            goto_rt_.stage_t = 0.0;
          }
          break;
        case 2:
          w = goto_rt_.turn2.velocity(goto_rt_.stage_t);
          if (goto_rt_.stage_t >= goto_rt_.turn2.duration()) {
            goto_rt_.stage = 3;
            goto_rt_.stage_t = 0.0;
          }
          break;
        default:
          if (goto_rt_.stage_t >= st.settle) {
            u_ref_.setZero();
            advance_step();
            return;
          }
          break;
      }
      u_ref_ = Eigen::Vector2d(v, w);
      break;
    }
    case StepKind::ArmLegs: {
      u_ref_.setZero();
      braked_ = true;
      if (approach_pending_ && !jmove_.active) {
        const TipLeg& first = st.legs[legs_rt_.idx];
        const Transform want = world_to_base(est_, leg_tip_world(st, first, 0.0));
        const Eigen::Vector3d here = kin_.fk(q_ref_).p;
        if ((here - want.p).norm() > 0.005) {
          if (++legs_rt_.approach_tries > 5) {
            throw MissionError("arm cannot settle on the strip entry after repeated replans");
          }
          plan_joint_move_to(want, 1.0);
        } else {
          approach_pending_ = false;
          legs_rt_.approach_tries = 0;
        }
      }
      if (jmove_.active) break;  // joint move handled below
      approach_pending_ = false;

      if (legs_rt_.idx >= static_cast<int>(st.legs.size())) {
        advance_step();
        return;
      }
      TipLeg& leg = st.legs[legs_rt_.idx];
      if (legs_rt_.t == 0.0) {
        if (leg.strip_index >= 0 && leg.strip_index != legs_rt_.last_strip) {
          legs_rt_.strip_entry_idx = legs_rt_.idx;
          legs_rt_.last_strip = leg.strip_index;
          emit(MissionPhase::PaintCoreStrip, st.wall, st.post, leg.strip_index);
        }
      }
      legs_rt_.t += simcfg_.dt;
      const double tau = std::min(legs_rt_.t, leg.duration);
      const QuinticSegment prof = quintic_segment(0.0, 1.0, leg.duration);
      const double s01 = prof.position(tau);
      tip_target_base_ = world_to_base(est_, leg_tip_world(st, leg, s01));
      tracking_tip_ = true;
      spray_cmd_ = leg.spray_on;
      if (legs_rt_.t >= leg.duration) {
        ++legs_rt_.idx;
        legs_rt_.t = 0.0;
      }
      break;
    }
    case StepKind::Terminate: {
      u_ref_.setZero();
      braked_ = true;
      done_ = true;
      break;
    }
  }
}

void Executive::integrate() {
  const double dt = simcfg_.dt;
  // ---- arm reference ----
  // a pause freezes the arm too, except for the refill fold which is the
  // whole point of the empty-cup pause
  const bool jmove_runs =
      jmove_.active && (!paused_ || pause_reason_ == PauseReason::EmptyCup);
  Vector6d q_ref_new = q_ref_;
  if (jmove_runs) {
    jmove_.t += dt;
    for (int i = 0; i < 6; ++i) q_ref_new[i] = jmove_.seg[i].position(jmove_.t);
    if (jmove_.t >= jmove_.duration) jmove_.active = false;
  } else if (tracking_tip_ && !paused_) {
    const IkResult res = kin_.ik(tip_target_base_, q_ref_);
    q_ref_new = res.q;
  }
  Vector6d qd_ref_new = (q_ref_new - q_ref_) / dt;
  for (int i = 0; i < 6; ++i) qd_ref_new[i] = std::clamp(qd_ref_new[i], -4.0, 4.0);
  Vector6d qdd_ref_new = (qd_ref_new - qd_ref_) / dt;
  for (int i = 0; i < 6; ++i) qdd_ref_new[i] = std::clamp(qdd_ref_new[i], -40.0, 40.0);
  q_ref_ = q_ref_new;
  qd_ref_ = qd_ref_new;
  qdd_ref_ = qdd_ref_new;

  // ---- plants ----
  if (simcfg_.dynamic) {
    tau_cmd_ = computed_torque(adyn_, arm_, q_ref_, qd_ref_, qdd_ref_, simcfg_.gains);
    const ArmState next = plant_.step(arm_, tau_cmd_, t_, spray_cmd_, dt, simcfg_.integrator);
    report_.energy_J += std::abs(tau_cmd_.dot(arm_.qd)) * dt;
    arm_ = next;
  } else {
    arm_.q = q_ref_;
    arm_.qd = qd_ref_;
  }

  Eigen::Vector2d u_true = Eigen::Vector2d::Zero();
  if (!braked_) {
    if (simcfg_.dynamic) {
      const Eigen::Vector2d udot_ff = (u_ref_ - u_ref_prev_) / dt;
      const Eigen::Vector2d tau_w =
          base_wheel_torques(bdyn_, base_, u_ref_, udot_ff, simcfg_.gains.ku, params_);
      const Vector9d qdot = base_mobility_matrix(base_.q, params_) * base_.u;
      report_.energy_J +=
          (std::abs(tau_w[0] * qdot[base_coord::kWheel1]) +
           std::abs(tau_w[1] * qdot[base_coord::kWheel2])) *
          dt;
      base_ = bplant_.step(base_, tau_w, dt, simcfg_.integrator);
    } else {
      base_ = base_kinematic_step(base_, u_ref_, dt, params_);
    }
    u_true = base_.u;
  } else {
    base_.u.setZero();
  }
  u_ref_prev_ = u_ref_;

  // ---- odometry dead reckoning (wheel encoders see nothing when parked) ----
  if (registered_) {
    Eigen::Vector2d u_meas = u_true;
    if (u_true.norm() > 1e-9) {
      u_meas[0] += cfg_.odom_noise_pos / std::sqrt(dt) * rng_odom_.gaussian();
      u_meas[1] += cfg_.odom_noise_yaw / std::sqrt(dt) * rng_odom_.gaussian();
    }
    est_ = dead_reckon(est_, u_meas, dt);
  }
}

void Executive::truth_and_logs() {
  const ScriptStep& st = script_[si_ < script_.size() ? si_ : script_.size() - 1];
  const Eigen::Vector3d true_pose(base_.q[base_coord::kX], base_.q[base_coord::kY],
                                  base_.q[base_coord::kPhi]);

  // ---- paint deposition from the true tip pose ----
  const bool depositing = spray_cmd_ && paint_left_s_ > 0.0 && st.wall >= 0;
  if (spray_cmd_) {
    report_.spray_on_time += simcfg_.dt;
    if (paint_left_s_ > 0.0) paint_left_s_ -= simcfg_.dt;
  }
  if (depositing) {
    const Transform tip_base = kin_.fk(arm_.q);
    const Eigen::Matrix3d Rw = rot_z(true_pose.z());
    const Eigen::Vector3d tip_w =
        Rw * tip_base.p + Eigen::Vector3d(true_pose.x(), true_pose.y(), 0.0);
    const Eigen::Vector3d dir_w = Rw * (tip_base.R * Eigen::Vector3d::UnitZ());
    const Eigen::Vector3d aim3 = tip_w + params_.spray.standoff * dir_w;
    const double u = room_.wall_u(st.wall, aim3.head<2>());
    const Eigen::Vector2d aim(u, aim3.z());
    const double hw = params_.spray.pattern_width / 2.0;
    const double hh = params_.spray.pattern_height / 2.0;
    if (depositing_prev_) {
      if (st.outline) {
        grids_[st.wall].paint_sweep(prev_aim_, aim, hh, hw);
      } else {
        grids_[st.wall].paint_sweep(prev_aim_, aim, hw, hh);
      }
    }
    prev_aim_ = aim;
  }
  depositing_prev_ = depositing;

  // ---- tracking error during strokes ----
  if (tracking_tip_ && spray_cmd_ && simcfg_.dynamic) {
    const double err = (kin_.fk(arm_.q).p - tip_target_base_.p).norm();
    report_.max_tracking_error = std::max(report_.max_tracking_error, err);
  }

  // ---- localisation statistics ----
  if (registered_ && tick_ % trace_period_ == 0) {
    const double err = (est_.head<2>() - true_pose.head<2>()).norm();
    report_.max_localization_error = std::max(report_.max_localization_error, err);
    loc_err_sum_ += err;
    ++loc_err_count_;
  }

  // ---- rolling constraints hold by construction; measure anyway ----
  if (!braked_ && tick_ % trace_period_ == 0) {
    const Vector9d qdot = base_mobility_matrix(base_.q, params_) * base_.u;
    const double res = (base_constraint_matrix(base_.q, params_) * qdot).norm();
    report_.max_constraint_residual = std::max(report_.max_constraint_residual, res);
  }

  // ---- streams ----
  if (trace_out_.is_open() && tick_ % trace_period_ == 0) {
    char buf[512];
    const MissionPhase ph = paused_ ? MissionPhase::Paused : st.phase;
    std::snprintf(buf, sizeof(buf),
                  "{\"t\":%.3f,\"phase\":\"%s\",\"pose\":[%.6f,%.6f,%.6f],"
                  "\"est\":[%.6f,%.6f,%.6f],\"u\":[%.4f,%.4f],\"spray\":%d,\"paint\":%.4f}\n",
                  t_, phase_name(ph), true_pose.x(), true_pose.y(), true_pose.z(), est_.x(),
                  est_.y(), est_.z(), base_.u[0], base_.u[1], spray_cmd_ ? 1 : 0,
                  paint_left_s_ / cfg_.spray_capacity_s);
    trace_out_ << buf;
  }
  if (csv_out_.is_open() && tick_ % csv_period_ == 0) {
    const Transform tip_base = kin_.fk(arm_.q);
    const Eigen::Matrix3d Rw = rot_z(true_pose.z());
    const Eigen::Vector3d tip_w =
        Rw * tip_base.p + Eigen::Vector3d(true_pose.x(), true_pose.y(), 0.0);
    Vector6d tau = tau_cmd_;
    if (!simcfg_.dynamic) {
      tau = adyn_.newton_euler(arm_.q, arm_.qd, qdd_ref_) +
            (adyn_.rotor_inertia().array() * qdd_ref_.array()).matrix();
    }
    char buf[768];
    std::snprintf(buf, sizeof(buf),
                  "%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,"
                  "%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.6f,%.6f,%.6f,%d\n",
                  t_, arm_.q[0], arm_.q[1], arm_.q[2], arm_.q[3], arm_.q[4], arm_.q[5],
                  arm_.qd[0], arm_.qd[1], arm_.qd[2], arm_.qd[3], arm_.qd[4], arm_.qd[5], tau[0],
                  tau[1], tau[2], tau[3], tau[4], tau[5], tip_w.x(), tip_w.y(), tip_w.z(),
                  spray_cmd_ ? 1 : 0);
    csv_out_ << buf;
  }
}

MissionReport Executive::run() {
  build_plan();
  build_script();

  report_.seed = simcfg_.seed;
  report_.localization_enabled = opts_.corrections_enabled;
  report_.pure_paint_rate = plan_.pure_paint_rate;
  {
    // steady-state economics of the documented core cycle: four strokes,
    // three shifts, one hop to the next post
    const TrapezoidProfile hop{4.0 * 0.24, cfg_.timing.hop_vmax, cfg_.timing.hop_accel};
    const double cycle = 4.0 * cfg_.timing.stroke_duration + 3.0 * cfg_.timing.shift_duration +
                         hop.duration();
    report_.sustained_core_rate = 4.0 * 0.25 * 2.45 / cycle * 3600.0;
  }
  for (int w = 0; w < 4; ++w) {
    report_.wall_area += room_.wall_area(w);
    report_.opening_area += room_.opening_area(w);
  }
  report_.paintable_area = report_.wall_area - report_.opening_area;

  // initial state
  base_.q.setZero();
  base_.q[base_coord::kX] = room_.start_pose.x();
  base_.q[base_coord::kY] = room_.start_pose.y();
  base_.q[base_coord::kPhi] = room_.start_pose.z();
  base_.q[base_coord::kBeta1] = kPi;  // castors trailing
  base_.q[base_coord::kBeta2] = kPi;
  arm_.q = q_ref_;
  paint_left_s_ = cfg_.spray_capacity_s;
  guard_ = ObstacleGuard(cfg_.stop_radius, cfg_.clear_hold_s);

  corr_period_ = std::max(1, static_cast<int>(std::lround(1.0 / (cfg_.correction_rate_hz * simcfg_.dt))));
  imu_period_ = std::max(1, static_cast<int>(std::lround(1.0 / (cfg_.imu_rate_hz * simcfg_.dt))));
  trace_period_ = std::max(1, static_cast<int>(std::lround(simcfg_.trace_interval / simcfg_.dt)));
  csv_period_ = std::max(1, static_cast<int>(std::lround(0.01 / simcfg_.dt)));

  if (opts_.emit_trace && !simcfg_.trace_path.empty()) {
    trace_out_.open(simcfg_.trace_path);
  }
  if (opts_.emit_trace && !simcfg_.joints_path.empty()) {
    csv_out_.open(simcfg_.joints_path);
    csv_out_ << "t,q1,q2,q3,q4,q5,q6,qd1,qd2,qd3,qd4,qd5,qd6,"
                "tau1,tau2,tau3,tau4,tau5,tau6,tip_x,tip_y,tip_z,spray\n";
  }

  while (t_ < simcfg_.duration_cap && !done_) {
    sensors();
    references();
    integrate();
    truth_and_logs();
    ++tick_;
    t_ += simcfg_.dt;
  }

  // close an open pause record at the cap
  if (paused_ && !report_.pauses.empty() && report_.pauses.back().t_end == 0.0) {
    report_.pauses.back().t_end = t_;
  }

  report_.completed = done_;
  report_.total_time = t_;
  double painted = 0.0, paintable = 0.0;
  for (int w = 0; w < 4; ++w) {
    painted += grids_[w].painted_area();
    paintable += grids_[w].paintable_area();
    report_.wall_covered_fraction[w] = grids_[w].covered_fraction();
  }
  report_.painted_area = painted;
  report_.covered_fraction = paintable > 0 ? painted / paintable : 0.0;
  report_.achieved_rate = report_.total_time > 0 ? painted / report_.total_time * 3600.0 : 0.0;
  report_.mean_localization_error =
      loc_err_count_ > 0 ? loc_err_sum_ / static_cast<double>(loc_err_count_) : 0.0;
  if (registered_) {
    const Eigen::Vector3d true_pose(base_.q[base_coord::kX], base_.q[base_coord::kY],
                                    base_.q[base_coord::kPhi]);
    report_.final_localization_error = (est_.head<2>() - true_pose.head<2>()).norm();
  }
  if (!done_) report_.notes = "duration cap reached before mission completion";

  if (opts_.emit_trace && !simcfg_.svg_path.empty()) {
    std::ofstream svg(simcfg_.svg_path);
    svg << coverage_to_svg(grids_, plan_.walls);
  }
  if (opts_.emit_trace && !simcfg_.report_path.empty()) {
    std::ofstream rj(simcfg_.report_path);
    rj << report_to_json(report_);
  }
  return report_;
}

}  // namespace

MissionReport run_mission(const RobotParams& params, const RoomModel& room, const SimConfig& sim,
                          const MissionConfig& cfg, const MissionOptions& opts) {
  Executive exec(params, room, sim, cfg, opts);
  return exec.run();
}

}  // namespace robopainter
