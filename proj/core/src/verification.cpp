#include "robopainter/verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "robopainter/coverage.hpp"
#include "robopainter/dynamics.hpp"
#include "robopainter/error.hpp"
#include "robopainter/kinematics.hpp"
#include "robopainter/mission.hpp"
#include "robopainter/params.hpp"
#include "robopainter/rng.hpp"
#include "robopainter/room.hpp"
#include "robopainter/sim.hpp"
#include "robopainter/trajectory.hpp"

namespace robopainter {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  return buf;
}

CriterionResult finish(int index, const char* name, bool pass, std::string detail,
                       const Timer& t) {
  CriterionResult r;
  r.index = index;
  r.name = name;
  r.pass = pass;
  r.detail = std::move(detail);
  r.runtime_s = t.seconds();
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MissionReport run_capped(const RobotParams& params, const RoomModel& room, std::uint64_t seed,
                         double cap, bool corrections, MissionConfig cfg = {},
                         const std::string& trace_path = "") {
  SimConfig sim;
  sim.dynamic = false;
  sim.seed = seed;
  sim.duration_cap = cap;
  sim.trace_path = trace_path;
  MissionOptions opts;
  opts.corrections_enabled = corrections;
  opts.emit_trace = !trace_path.empty();
  return run_mission(params, room, sim, cfg, opts);
}

// JSONL trace rows relevant to the spray-discipline checks
struct TraceRow {
  double t = 0.0;
  std::string phase;
  int spray = 0;
};

std::vector<TraceRow> parse_trace(const std::string& path) {
  std::vector<TraceRow> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    TraceRow r;
    const auto tpos = line.find("\"t\":");
    const auto ppos = line.find("\"phase\":\"");
    const auto spos = line.find("\"spray\":");
    if (tpos == std::string::npos || ppos == std::string::npos || spos == std::string::npos) {
      continue;
    }
    r.t = std::atof(line.c_str() + tpos + 4);
    const auto pstart = ppos + 9;
    r.phase = line.substr(pstart, line.find('"', pstart) - pstart);
    r.spray = std::atoi(line.c_str() + spos + 8);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

// 1 -------------------------------------------------------------------------

CriterionResult check_parameter_fidelity(const VerifyPaths& p) {
  Timer t;
  const std::string disk = read_file(p.params_path);
  const RobotParams params = load_robot_params(p.params_path);
  const std::string s1 = serialize_robot_params(params);
  const RobotParams again = parse_robot_params(s1);
  const std::string s2 = serialize_robot_params(again);

  const bool roundtrip = (s1 == s2) && (s1 == disk);

  const auto sym = symbol_table(params);
  struct Expect {
    const char* key;
    double value;
  };
  const Expect expect[] = {{"RL1", 1.094}, {"D1", 0.0784},  {"RL2", 0.0644}, {"D3", 0.700},
                           {"RL4", 0.2024}, {"D4", 0.590},  {"RL5", 0.083},  {"RL7", 0.3075}};
  bool spot_ok = true;
  std::string bad;
  for (const auto& e : expect) {
    const auto it = sym.find(e.key);
    if (it == sym.end() || std::abs(it->second - e.value) > 1e-12) {
      spot_ok = false;
      bad = e.key;
    }
  }
  const double mass = total_mass(params);
  const bool mass_ok = std::abs(mass - 20.668) < 1e-9 && mass <= 21.5;

  const bool pass = roundtrip && spot_ok && mass_ok;
  std::string detail = strf("round-trip %s; mass sum %.4f kg (want 20.668, cap 21.5)%s",
                            roundtrip ? "bit-exact" : "MISMATCH", mass,
                            spot_ok ? "" : (" ; bad symbol " + bad).c_str());
  return finish(1, "parameter-fidelity", pass, detail, t);
}

// 2 -------------------------------------------------------------------------

CriterionResult check_reachability(const VerifyPaths& p) {
  Timer t;
  const RobotParams params = load_robot_params(p.params_path);
  const ArmKinematics kin(params);

  // planar elbow reach: shoulder-to-wrist distance projected into the plane
  // of the two links (perpendicular to the elbow axis — the constant lateral
  // elbow offset lies along that axis and does not add reach)
  const auto planar_span = [&kin](double q3) {
    Vector6d q = Vector6d::Zero();
    q[2] = q3;
    const auto fr = kin.frames(q);
    const Eigen::Vector3d v = fr[4].p - fr[2].p;
    const Eigen::Vector3d axis = fr[2].R.col(2);
    return (v - axis * axis.dot(v)).norm();
  };
  double reach = 0.0;
  for (double q3 = -kPi; q3 <= kPi; q3 += 1e-3) {
    reach = std::max(reach, planar_span(q3));
  }
  reach = std::max(reach, planar_span(0.0));  // the exact maximiser
  const bool reach_ok = std::abs(reach - 1.29) <= 1e-6;

  // highest nozzle point over the joints that move the tip vertically
  double zmax = -1e9;
  double b2 = 0, b3 = 0, b5 = 0;
  Vector6d q = Vector6d::Zero();
  for (double q2 = -kPi; q2 <= kPi; q2 += 0.05) {
    for (double q3 = -kPi; q3 <= kPi; q3 += 0.05) {
      for (double q5 = -kPi; q5 <= kPi; q5 += 0.05) {
        q[1] = q2;
        q[2] = q3;
        q[4] = q5;
        const double z = kin.fk(q).p.z();
        if (z > zmax) {
          zmax = z;
          b2 = q2;
          b3 = q3;
          b5 = q5;
        }
      }
    }
  }
  for (double q2 = b2 - 0.05; q2 <= b2 + 0.05; q2 += 0.002) {
    for (double q3 = b3 - 0.05; q3 <= b3 + 0.05; q3 += 0.002) {
      for (double q5 = b5 - 0.05; q5 <= b5 + 0.05; q5 += 0.002) {
        q[1] = q2;
        q[2] = q3;
        q[4] = q5;
        zmax = std::max(zmax, kin.fk(q).p.z());
      }
    }
  }
  const bool z_ok = std::abs(zmax - 2.70) <= 0.05;

  const bool pass = reach_ok && z_ok;
  return finish(2, "reach-envelope", pass,
                strf("planar reach %.9f m (want 1.29 +- 1e-6); max tip height %.4f m "
                     "(want 2.70 +- 0.05)",
                     reach, zmax),
                t);
}

// 3 -------------------------------------------------------------------------

CriterionResult check_dynamics_consistency(const VerifyPaths& p) {
  Timer t;
  const RobotParams params = load_robot_params(p.params_path);
  const ArmDynamics dyn(params);
  const BaseDynamics bdyn(params);
  Rng rng(20240817);

  double worst_route = 0.0, worst_skew = 0.0, worst_grad = 0.0, worst_js = 0.0;
  double min_eig_arm = 1e300, min_eig_base = 1e300;
  const double h = 1e-6;
  const int n_states = 1000;

  for (int k = 0; k < n_states; ++k) {
    Vector6d q, qd, qdd;
    for (int i = 0; i < 6; ++i) {
      q[i] = rng.uniform(-kPi, kPi);
      qd[i] = rng.uniform(-2.0, 2.0);
      qdd[i] = rng.uniform(-5.0, 5.0);
    }
    // two independent torque routes
    const Vector6d tau_energy =
        dyn.inverse_dynamics(q, qd, qdd, Vector6d::Zero(), Vector6d::Zero(), false);
    const Vector6d tau_force = dyn.newton_euler(q, qd, qdd);
    worst_route = std::max(worst_route, (tau_energy - tau_force).norm() /
                                            std::max(1.0, tau_force.norm()));

    // structure of the inertia/Coriolis pair
    const Matrix6d mp = dyn.mass_matrix(q + h * qd);
    const Matrix6d mm = dyn.mass_matrix(q - h * qd);
    const Matrix6d mdot = (mp - mm) / (2.0 * h);
    const Matrix6d s = mdot - 2.0 * dyn.coriolis_matrix(q, qd);
    worst_skew = std::max(worst_skew, (s + s.transpose()).cwiseAbs().maxCoeff());

    // gravity load is the gradient of the potential
    const Vector6d g = dyn.gravity_torque(q);
    for (int i = 0; i < 6; ++i) {
      Vector6d qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const double fd = (dyn.potential_energy(qp) - dyn.potential_energy(qm)) / (2.0 * h);
      worst_grad = std::max(worst_grad, std::abs(g[i] - fd));
    }

    const Eigen::SelfAdjointEigenSolver<Matrix6d> es(dyn.mass_matrix(q));
    min_eig_arm = std::min(min_eig_arm, es.eigenvalues().minCoeff());

    // base: wheel/castor constraints annihilate the mobility basis
    Vector9d qb;
    qb << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-kPi, kPi),
        rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi),
        rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi);
    const auto J = base_constraint_matrix(qb, params);
    const auto S = base_mobility_matrix(qb, params);
    worst_js = std::max(worst_js, (J * S).cwiseAbs().maxCoeff());

    const Eigen::Vector2d u(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const auto red = bdyn.reduce(qb, u);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eb(red.M);
    min_eig_base = std::min(min_eig_base, eb.eigenvalues().minCoeff());
  }

  const bool pass = worst_route < 1e-8 && worst_skew < 1e-6 && worst_grad < 1e-6 &&
                    worst_js < 1e-12 && min_eig_arm > 0.0 && min_eig_base > 0.0;
  return finish(3, "dynamics-consistency", pass,
                strf("route rel %.2e (<1e-8); skew %.2e (<1e-6); grad %.2e (<1e-6); "
                     "J*S %.2e (<1e-12); min eig arm %.2e base %.2e (>0)",
                     worst_route, worst_skew, worst_grad, worst_js, min_eig_arm, min_eig_base),
                t);
}

// 4 -------------------------------------------------------------------------

namespace {

double free_swing_drift(const ArmDynamics& dyn, double dt, double horizon) {
  const ArmPlant plant(dyn, nullptr, FrictionParams{0.0, 0.0});
  ArmState s;
  s.q << 0.3, -0.7, 1.1, 0.4, -0.8, 0.2;
  s.qd << 0.5, -0.4, 0.8, -0.3, 0.6, -0.2;
  const Vector6d ia = dyn.rotor_inertia();
  const auto energy = [&](const ArmState& st) {
    return dyn.kinetic_energy(st.q, st.qd) + 0.5 * st.qd.dot(ia.cwiseProduct(st.qd)) +
           dyn.potential_energy(st.q);
  };
  const double e0 = energy(s);
  double drift = 0.0;
  const int n = static_cast<int>(std::lround(horizon / dt));
  for (int k = 0; k < n; ++k) {
    s = plant.step(s, Vector6d::Zero(), k * dt, false, dt, Integrator::RK4);
    drift = std::max(drift, std::abs(energy(s) - e0) / std::abs(e0));
  }
  return drift;
}

}  // namespace

CriterionResult check_energy_conservation(const VerifyPaths& p) {
  Timer t;
  const RobotParams params = load_robot_params(p.params_path);
  const ArmDynamics dyn(params);

  const double d1 = free_swing_drift(dyn, 1e-3, 5.0);
  const double d8 = free_swing_drift(dyn, 8e-3, 5.0);
  const double d4 = free_swing_drift(dyn, 4e-3, 5.0);
  const double d2 = free_swing_drift(dyn, 2e-3, 5.0);
  const double order1 = std::log2(d8 / d4);
  const double order2 = std::log2(d4 / d2);

  const bool pass = d1 < 1e-4 && order1 > 3.2 && order2 > 3.2;
  return finish(4, "energy-conservation", pass,
                strf("drift %.2e at dt=1e-3 over 5 s (<1e-4); convergence order %.2f / %.2f "
                     "under dt halving (>3.2)",
                     d1, order1, order2),
                t);
}

// 5 -------------------------------------------------------------------------

CriterionResult check_strip_economics(const VerifyPaths& p) {
  Timer t;
  const RobotParams params = load_robot_params(p.params_path);
  const PlanTiming timing;
  const WallPlan wall = plan_wall(0, 4.0, 2.7, {}, params.spray, timing);

  // spray-on time of every core strip
  double worst_strip_dt = 0.0;
  int n_core = 0;
  for (const auto& s : wall.strips) {
    if (s.section != StripSection::Core) continue;
    ++n_core;
    double len = 0.0;
    for (const auto& r : s.runs) len += r.second - r.first;
    worst_strip_dt = std::max(worst_strip_dt, std::abs(len / timing.pass_speed - 10.0));
  }
  const double pure = 0.25 * 2.45 / timing.stroke_duration * 3600.0;
  const bool pure_ok = std::abs(pure - 220.5) < 1e-9;

  const RoomModel room = load_room(p.rooms_dir + "/empty4x4.json");
  const MissionReport rep = run_capped(params, room, 1, 3600.0, true);

  const double area_residual =
      std::abs(rep.achieved_rate * rep.total_time / 3600.0 - rep.painted_area);

  const bool pass = worst_strip_dt < 1e-9 && pure_ok && rep.completed &&
                    rep.sustained_core_rate >= 200.0 && area_residual < 1e-9;
  return finish(
      5, "strip-economics", pass,
      strf("strip spray-on 10 s +- %.1e; pure rate %.1f m2/h; sustained core-cycle rate "
           "%.1f m2/h (>=200); whole-mission %.1f m2/h in %.0f s, covered %.4f",
           worst_strip_dt, pure, rep.sustained_core_rate, rep.achieved_rate, rep.total_time,
           rep.covered_fraction),
      t);
}

// 6 -------------------------------------------------------------------------

CriterionResult check_planner(const VerifyPaths& p) {
  Timer t;
  const RobotParams params = load_robot_params(p.params_path);
  const PlanTiming timing;

  const std::vector<PaintStrip> strips = plan_wall_strips(4.0, 2.7, {});
  int n_core = 0;
  for (const auto& s : strips)
    if (s.section == StripSection::Core) ++n_core;
  const std::vector<BasePost> posts =
      plan_base_posts(strips, params.spray.standoff, timing.base_standoff);
  double worst_offset = 0.0;
  for (const auto& post : posts) {
    for (int i : post.strip_indices) {
      worst_offset = std::max(worst_offset, std::abs(strips[static_cast<size_t>(i)].u - post.u));
    }
  }

  // raster of the nominal plan
  const WallPlan wall = plan_wall(0, 4.0, 2.7, {}, params.spray, timing);
  CoverageGrid grid(4.0, 2.7, {});
  rasterize_wall_plan(grid, wall, params.spray);

  // a door: planned runs stop exactly at its lintel, and the raster's
  // bookkeeping removes exactly the door cells from the paintable set
  const OpeningRect door{1.9, 2.3, 0.0, 2.1};
  const WallPlan wall_door = plan_wall(0, 4.0, 2.7, {door}, params.spray, timing);
  bool door_runs_ok = true;
  for (const auto& s : wall_door.strips) {
    if (s.section != StripSection::Core) continue;
    if (s.u <= door.u0 || s.u >= door.u1) continue;
    door_runs_ok = door_runs_ok && s.runs.size() == 1 &&
                   std::abs(s.runs[0].first - 2.1) < 1e-12 &&
                   std::abs(s.runs[0].second - 2.45) < 1e-12;
  }
  CoverageGrid grid_door(4.0, 2.7, {door});
  rasterize_wall_plan(grid_door, wall_door, params.spray);
  const double door_area = (door.u1 - door.u0) * (door.z1 - door.z0);
  const bool exact_exclusion =
      std::abs(grid_door.paintable_area() - (4.0 * 2.7 - door_area)) < 1e-9;

  const bool pass = n_core == 17 && posts.size() == 5 && worst_offset <= 0.5 + 1e-9 &&
                    grid.covered_fraction() >= 0.995 && door_runs_ok && exact_exclusion &&
                    grid_door.covered_fraction() >= 0.995;
  return finish(6, "coverage-planner", pass,
                strf("%d core strips (want 17); %zu posts (want 5); max offset %.3f m "
                     "(<=0.5); coverage %.4f plain / %.4f with door (>=0.995); door runs "
                     "%s; exclusion %s",
                     n_core, posts.size(), worst_offset, grid.covered_fraction(),
                     grid_door.covered_fraction(), door_runs_ok ? "exact" : "WRONG",
                     exact_exclusion ? "exact" : "WRONG"),
                t);
}

// 7 -------------------------------------------------------------------------

CriterionResult check_localization(const VerifyPaths& p) {
  Timer t;
  const RobotParams params = load_robot_params(p.params_path);
  const RoomModel room = load_room(p.rooms_dir + "/room2p5.json");

  double worst_reg_pos = 0.0, worst_reg_yaw = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MissionReport r = run_capped(params, room, seed, 12.0, true);
    worst_reg_pos = std::max(worst_reg_pos, r.registration_error_pos);
    worst_reg_yaw = std::max(worst_reg_yaw, r.registration_error_yaw);
  }

  const MissionReport on = run_capped(params, room, 3, 3600.0, true);
  const MissionReport off_short = run_capped(params, room, 3, 80.0, false);
  const MissionReport off_long = run_capped(params, room, 3, 240.0, false);

  const bool reg_ok = worst_reg_pos <= 0.02 && worst_reg_yaw <= 0.05;
  const bool mission_ok = on.completed && on.max_localization_error <= 0.05;
  const bool drift_ok = off_long.max_localization_error > 0.05 &&
                        off_long.max_localization_error > 1.3 * off_short.max_localization_error;

  const bool pass = reg_ok && mission_ok && drift_ok;
  return finish(7, "localization", pass,
                strf("registration worst %.4f m / %.4f rad over 20 seeds (<=0.02/0.05); "
                     "corrected mission max %.4f m (<=0.05); uncorrected max %.3f m @80 s -> "
                     "%.3f m @240 s (growing, >0.05)",
                     worst_reg_pos, worst_reg_yaw, on.max_localization_error,
                     off_short.max_localization_error, off_long.max_localization_error),
                t);
}

// 8 -------------------------------------------------------------------------

CriterionResult check_fsm_safety(const VerifyPaths& p) {
  Timer t;
  const RobotParams params = load_robot_params(p.params_path);
  const RoomModel room = load_room(p.rooms_dir + "/room2p5.json");

  // (a) nominal run against the frozen phase trace
  const std::string trace_path = "fsm_nominal_trace.jsonl.tmp";
  const MissionReport nominal = run_capped(params, room, 1, 3600.0, true, {}, trace_path);
  const std::string trace = phase_trace_text(nominal);
  bool golden_ok = true;
  std::string golden_note = "golden compare skipped (no reference directory)";
  if (!p.golden_dir.empty()) {
    const std::string want = read_file(p.golden_dir + "/fsm_phase_trace.txt");
    golden_ok = !want.empty() && want == trace;
    golden_note = golden_ok ? "phase trace matches frozen reference"
                            : "phase trace DIFFERS from frozen reference";
  }

  // spray discipline, sampled from the run's own telemetry
  bool spray_ok = true;
  for (const auto& row : parse_trace(trace_path)) {
    if (row.spray && row.phase != "PaintCoreStrip" && row.phase != "PaintOutline") {
      spray_ok = false;
    }
  }
  std::remove(trace_path.c_str());

  // (b) a transient intruder: pause latency and spray cut
  const RoomModel obst = load_room(p.rooms_dir + "/obstacle2p5.json");
  double appear = 1e300;
  for (const auto& o : obst.obstacles) appear = std::min(appear, o.appear);
  const std::string trace2 = "fsm_obstacle_trace.jsonl.tmp";
  const MissionReport guard = run_capped(params, obst, 1, 140.0, true, {}, trace2);
  bool pause_ok = false, latency_ok = false, resumed_ok = false, spray_pause_ok = true;
  double latency = -1.0;
  for (const auto& rec : guard.pauses) {
    if (rec.reason != PauseReason::Obstacle) continue;
    pause_ok = true;
    latency = rec.t_start - appear;
    latency_ok = latency >= 0.0 && latency <= 0.1;
    for (const auto& row : parse_trace(trace2)) {
      if (row.t >= rec.t_start && row.t < rec.t_end && row.spray) spray_pause_ok = false;
    }
    for (const auto& e : guard.phase_trace) {
      if (e.t > rec.t_end && e.phase == MissionPhase::PaintCoreStrip) resumed_ok = true;
    }
    break;
  }
  std::remove(trace2.c_str());

  // (c) cup runs dry: Paused(EmptyCup), refill choreography, then back to work
  MissionConfig low_cup;
  low_cup.spray_capacity_s = 120.0;
  const MissionReport cup = run_capped(params, room, 1, 320.0, true, low_cup);
  bool cup_ok = false, refill_ok = cup.refills >= 1, cup_resumed = false;
  for (const auto& rec : cup.pauses) {
    if (rec.reason != PauseReason::EmptyCup) continue;
    cup_ok = rec.t_end - rec.t_start >= low_cup.refill_delay_s;
    for (const auto& e : cup.phase_trace) {
      if (e.t > rec.t_end &&
          (e.phase == MissionPhase::PaintCoreStrip || e.phase == MissionPhase::PaintOutline)) {
        cup_resumed = true;
      }
    }
    break;
  }

  const bool pass = nominal.completed && golden_ok && spray_ok && pause_ok && latency_ok &&
                    spray_pause_ok && resumed_ok && cup_ok && refill_ok && cup_resumed;
  return finish(8, "fsm-safety", pass,
                strf("%s; spray confined to painting phases %s; obstacle pause latency %.3f s "
                     "(<=0.1), spray cut %s, resumed %s; empty cup -> pause %s, refills %d, "
                     "resumed %s",
                     golden_note.c_str(), spray_ok ? "yes" : "NO", latency,
                     spray_pause_ok ? "yes" : "NO", resumed_ok ? "yes" : "NO",
                     cup_ok ? "yes" : "NO", cup.refills, cup_resumed ? "yes" : "NO"),
                t);
}

std::vector<CriterionResult> run_acceptance(const VerifyPaths& p) {
  using Check = CriterionResult (*)(const VerifyPaths&);
  const Check checks[] = {check_parameter_fidelity, check_reachability,
                          check_dynamics_consistency, check_energy_conservation,
                          check_strip_economics,     check_planner,
                          check_localization,        check_fsm_safety};
  std::vector<CriterionResult> out;
  int index = 1;
  for (const Check c : checks) {
    try {
      out.push_back(c(p));
    } catch (const std::exception& e) {
      CriterionResult r;
      r.index = index;
      r.name = "criterion-" + std::to_string(index);
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
      out.push_back(r);
    }
    index++;
  }
  return out;
}

}  // namespace robopainter
