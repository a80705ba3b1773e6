// Command-line front end: plan walls, run missions, validate parameter files,
// and run the release verification suite.
//
// Exit codes: 0 success, 1 bad arguments, 2 unreadable/invalid inputs,
// 3 mission or verification failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "robopainter/coverage.hpp"
#include "robopainter/error.hpp"
#include "robopainter/mission.hpp"
#include "robopainter/params.hpp"
#include "robopainter/room.hpp"
#include "robopainter/sim.hpp"
#include "robopainter/trajectory.hpp"
#include "robopainter/verification.hpp"

namespace {

using namespace robopainter;

constexpr int kExitOk = 0;
constexpr int kExitArgs = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMission = 3;

SimConfig load_sim_config(const std::string& path) {
  SimConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sim config '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in);
  cfg.dt = j.value("dt", cfg.dt);
  cfg.duration_cap = j.value("duration_cap", cfg.duration_cap);
  cfg.dynamic = j.value("dynamic", cfg.dynamic);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.trace_interval = j.value("trace_interval", cfg.trace_interval);
  if (j.contains("integrator")) {
    const std::string name = j["integrator"].get<std::string>();
    if (name == "rk4") {
      cfg.integrator = Integrator::RK4;
    } else if (name == "semi_implicit_euler") {
      cfg.integrator = Integrator::SemiImplicitEuler;
    } else {
      throw std::runtime_error("unknown integrator '" + name + "'");
    }
  }
  if (j.contains("gains")) {
    cfg.gains.kp = j["gains"].value("kp", cfg.gains.kp);
    cfg.gains.kd = j["gains"].value("kd", cfg.gains.kd);
    cfg.gains.ku = j["gains"].value("ku", cfg.gains.ku);
  }
  if (cfg.dt <= 0.0) throw std::runtime_error("dt must be positive");
  if (cfg.gains.kp < 0.0 || cfg.gains.kd < 0.0 || cfg.gains.ku < 0.0) {
    throw std::runtime_error("gains must be non-negative");
  }
  return cfg;
}

int cmd_simulate(const std::string& robot, const std::string& room_path,
                 const std::string& config, std::uint64_t seed, bool seed_given,
                 const std::string& out_dir, bool kinematic, double cap, bool cap_given) {
  RobotParams params;
  RoomModel room;
  SimConfig sim;
  try {
    params = load_robot_params(robot);
    room = load_room(room_path);
    sim = load_sim_config(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (seed_given) sim.seed = seed;
  if (kinematic) sim.dynamic = false;
  if (cap_given) sim.duration_cap = cap;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  sim.trace_path = out_dir + "/trace.jsonl";
  sim.joints_path = out_dir + "/joints.csv";
  sim.svg_path = out_dir + "/coverage.svg";
  sim.report_path = out_dir + "/report.json";

  MissionConfig mission_cfg;
  try {
    const MissionReport rep = run_mission(params, room, sim, mission_cfg);
    std::printf("mission %s: painted %.3f m2 of %.3f m2 (%.2f%%), %.1f s, %.1f m2/h\n",
                rep.completed ? "complete" : "INCOMPLETE", rep.painted_area, rep.paintable_area,
                rep.covered_fraction * 100.0, rep.total_time, rep.achieved_rate);
    std::printf("outputs: %s/{trace.jsonl,joints.csv,coverage.svg,report.json}\n",
                out_dir.c_str());
    if (!rep.completed) {
      std::cerr << "mission did not finish: " << rep.notes << "\n";
      return kExitMission;
    }
  } catch (const std::exception& e) {
    std::cerr << "mission failed: " << e.what() << "\n";
    return kExitMission;
  }
  return kExitOk;
}

int cmd_plan(const std::string& robot, const std::string& room_path, const std::string& out_dir) {
  RobotParams params;
  RoomModel room;
  try {
    params = load_robot_params(robot);
    room = load_room(room_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  PaintPlan plan;
  plan.timing = PlanTiming{};
  for (int w = 0; w < 4; ++w) {
    plan.walls.push_back(plan_wall(w, room.wall_length(w), room.height, room.opening_rects(w),
                                   params.spray, plan.timing));
    plan.total_paintable_area += plan.walls.back().paintable_area;
    plan.total_planned_spray_time += plan.walls.back().planned_spray_time;
  }
  plan.pure_paint_rate = 0.25 * 2.45 / plan.timing.stroke_duration * 3600.0;

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream pj(out_dir + "/plan.json");
  pj << plan_to_json(plan);
  std::ofstream ps(out_dir + "/plan.svg");
  ps << plan_to_svg(plan);
  for (const auto& wall : plan.walls) {
    int n_core = 0;
    for (const auto& s : wall.strips)
      if (s.section == StripSection::Core) ++n_core;
    std::printf("wall %d: %.2f m, %d core strips, %zu posts, %.2f m2 paintable\n", wall.wall,
                wall.length, n_core, wall.posts.size(), wall.paintable_area);
  }
  std::printf("plan written to %s/{plan.json,plan.svg}\n", out_dir.c_str());
  return kExitOk;
}

int cmd_verify(const std::string& robot, const std::string& rooms_dir,
               const std::string& golden_dir, bool write_golden) {
  VerifyPaths paths;
  paths.params_path = robot;
  paths.rooms_dir = rooms_dir;
  paths.golden_dir = write_golden ? "" : golden_dir;

  if (write_golden) {
    try {
      const RobotParams params = load_robot_params(robot);
      const RoomModel room = load_room(rooms_dir + "/room2p5.json");
      SimConfig sim;
      sim.dynamic = false;
      sim.seed = 1;
      MissionOptions opts;
      opts.emit_trace = false;
      const MissionReport rep = run_mission(params, room, sim, MissionConfig{}, opts);
      std::ofstream out(golden_dir + "/fsm_phase_trace.txt");
      out << phase_trace_text(rep);
      std::printf("wrote %s/fsm_phase_trace.txt (%zu events)\n", golden_dir.c_str(),
                  rep.phase_trace.size());
      return kExitOk;
    } catch (const std::exception& e) {
      std::cerr << "golden generation failed: " << e.what() << "\n";
      return kExitMission;
    }
  }

  const std::vector<CriterionResult> results = run_acceptance(paths);
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %d %-22s %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", r.index, r.name.c_str(),
                r.detail.c_str(), r.runtime_s);
    all = all && r.pass;
  }
  return all ? kExitOk : kExitMission;
}

int cmd_params(const std::string& file, bool do_print) {
  try {
    const RobotParams params = load_robot_params(file);
    const ValidationReport rep = validate_params(params);
    if (do_print) {
      for (const auto& [key, value] : symbol_table(params)) {
        std::printf("%-8s %.10g\n", key.c_str(), value);
      }
    }
    if (!rep.issues.empty()) std::fputs(rep.to_string().c_str(), stderr);
    if (!rep.ok()) return kExitConfig;
    std::printf("%s: valid (total mass %.3f kg)\n", file.c_str(), total_mass(params));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robopainter: wall-painting robot simulator"};
  app.require_subcommand(1);

  std::string robot = "data/robopainter.params.json";
  std::string room_path, config, out_dir = ".";
  std::uint64_t seed = 1;
  bool kinematic = false;
  double cap = 3600.0;

  auto* sim_cmd = app.add_subcommand("simulate", "run a full painting mission");
  sim_cmd->add_option("--robot", robot, "robot parameter file");
  sim_cmd->add_option("--room", room_path, "room description file")->required();
  sim_cmd->add_option("--config", config, "simulation config JSON");
  auto* seed_opt = sim_cmd->add_option("--seed", seed, "noise seed");
  sim_cmd->add_option("--out", out_dir, "output directory");
  sim_cmd->add_flag("--kinematic", kinematic, "skip the dynamics-in-the-loop plant");
  auto* cap_opt = sim_cmd->add_option("--duration-cap", cap, "simulated-time cap, s");

  auto* plan_cmd = app.add_subcommand("plan", "plan strips and posts, emit JSON/SVG");
  plan_cmd->add_option("--robot", robot, "robot parameter file");
  plan_cmd->add_option("--room", room_path, "room description file")->required();
  plan_cmd->add_option("--out", out_dir, "output directory");

  std::string rooms_dir = "data/rooms", golden_dir = "data/golden";
  bool write_golden = false;
  auto* verify_cmd = app.add_subcommand("verify", "run the release verification suite");
  verify_cmd->add_option("--robot", robot, "robot parameter file");
  verify_cmd->add_option("--rooms-dir", rooms_dir, "directory with room descriptions");
  verify_cmd->add_option("--golden-dir", golden_dir, "directory with frozen reference traces");
  verify_cmd->add_flag("--write-golden", write_golden, "regenerate the frozen phase trace");

  std::string params_file;
  bool do_print = false;
  auto* params_cmd = app.add_subcommand("params", "validate or print a parameter file");
  params_cmd->add_option("file", params_file, "parameter file")->required();
  params_cmd->add_flag("--print", do_print, "print the symbol table");
  params_cmd->add_flag("--validate", "validate only (default behaviour)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitArgs;
  }

  if (sim_cmd->parsed()) {
    return cmd_simulate(robot, room_path, config, seed, seed_opt->count() > 0, out_dir, kinematic,
                        cap, cap_opt->count() > 0);
  }
  if (plan_cmd->parsed()) return cmd_plan(robot, room_path, out_dir);
  if (verify_cmd->parsed()) return cmd_verify(robot, rooms_dir, golden_dir, write_golden);
  if (params_cmd->parsed()) return cmd_params(params_file, do_print);
  return kExitArgs;
}
