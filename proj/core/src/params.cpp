#include "robopainter/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "robopainter/error.hpp"

namespace robopainter {

using nlohmann::json;

namespace {

const json& need(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParamsError(ParamsError::Kind::MissingKey, "missing key '" + ctx + key + "'");
  return *it;
}

double need_num(const json& j, const char* key, const std::string& ctx) {
  const json& v = need(j, key, ctx);
  if (!v.is_number())
    throw ParamsError(ParamsError::Kind::Parse, "'" + ctx + key + "' is not a number");
  return v.get<double>();
}

double length_factor(const json& units) {
  const std::string u = need(units, "length", "units.").get<std::string>();
  if (u == "mm") return 1e-3;
  if (u == "m") return 1.0;
  throw ParamsError(ParamsError::Kind::UnitViolation, "unsupported length unit '" + u + "'");
}

void check_unit(const json& units, const char* key, const char* expect) {
  auto it = units.find(key);
  if (it == units.end()) return;  // optional declarations
  if (it->get<std::string>() != expect)
    throw ParamsError(ParamsError::Kind::UnitViolation,
                      std::string("unsupported ") + key + " unit '" + it->get<std::string>() + "'");
}

LinkInertial parse_link(const json& j, double lf, const std::string& ctx) {
  LinkInertial out;
  out.mass = need_num(j, "mass", ctx);
  const json& cg = need(j, "cg", ctx);
  if (!cg.is_array() || cg.size() != 3)
    throw ParamsError(ParamsError::Kind::Parse, "'" + ctx + "cg' must be a 3-array");
  for (int i = 0; i < 3; ++i) out.cg[i] = cg[i].get<double>() * lf;
  const json& in = need(j, "inertia", ctx);
  const std::string ictx = ctx + "inertia.";
  const double xx = need_num(in, "xx", ictx), yy = need_num(in, "yy", ictx),
               zz = need_num(in, "zz", ictx), xy = need_num(in, "xy", ictx),
               xz = need_num(in, "xz", ictx), yz = need_num(in, "yz", ictx);
  out.inertia << xx, xy, xz,
                 xy, yy, yz,
                 xz, yz, zz;
  return out;
}

MotorParams parse_motor(const json& j, const std::string& ctx) {
  MotorParams m;
  m.rotor_inertia = need_num(j, "ia", ctx);
  m.torque_constant = need_num(j, "kt", ctx);
  return m;
}

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& i : issues)
    os << (i.severity == ValidationIssue::Severity::Error ? "error: " : "warning: ") << i.what
       << "\n";
  return os.str();
}

RobotParams parse_robot_params(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParamsError(ParamsError::Kind::Parse, std::string("params parse: ") + e.what());
  }

  RobotParams p;
  p.source_text = json_text;

  const json& units = need(doc, "units", "");
  const double lf = length_factor(units);
  check_unit(units, "mass", "kg");
  check_unit(units, "inertia", "kg.m^2");
  check_unit(units, "angle", "rad");
  check_unit(units, "torque_constant", "N.m/A");
  check_unit(units, "rotor_inertia", "kg.m^2");

  const json& g = need(doc, "geometry", "");
  auto& gp = p.geometry;
  gp.rl1 = need_num(g, "RL1", "geometry.") * lf;
  gp.d1 = need_num(g, "D1", "geometry.") * lf;
  gp.rl2 = need_num(g, "RL2", "geometry.") * lf;
  gp.d3 = need_num(g, "D3", "geometry.") * lf;
  gp.rl4 = need_num(g, "RL4", "geometry.") * lf;
  gp.d4 = need_num(g, "D4", "geometry.") * lf;
  gp.rl5 = need_num(g, "RL5", "geometry.") * lf;
  gp.rl7 = need_num(g, "RL7", "geometry.") * lf;
  gp.castor_mount_x = need_num(g, "a", "geometry.") * lf;
  gp.half_track = need_num(g, "b", "geometry.") * lf;
  gp.castor_wheel_radius = need_num(g, "r_c", "geometry.") * lf;
  gp.drive_wheel_radius = need_num(g, "r_f", "geometry.") * lf;
  gp.castor_mount_y = need_num(g, "p", "geometry.") * lf;
  gp.castor_trail = need_num(g, "d", "geometry.") * lf;

  const json& table = need(g, "kk_table", "geometry.");
  if (!table.is_array() || table.size() < 6)
    throw ParamsError(ParamsError::Kind::Parse, "geometry.kk_table must list at least 6 rows");
  for (const auto& row : table) {
    KKRow r;
    r.joint = static_cast<int>(need_num(row, "joint", "kk_table."));
    r.alpha = need_num(row, "alpha", "kk_table.");
    r.d = need_num(row, "d", "kk_table.") * lf;
    r.theta_offset = need_num(row, "theta_offset", "kk_table.");
    r.r = need_num(row, "r", "kk_table.") * lf;
    gp.kk_table.push_back(r);
  }

  const json& links = need(doc, "links", "");
  static const char* link_names[6] = {"link1", "link2", "link3", "link4", "link5", "link6"};
  for (int i = 0; i < 6; ++i)
    p.arm_links[i] = parse_link(need(links, link_names[i], "links."), lf,
                                std::string("links.") + link_names[i] + ".");
  p.base_body = parse_link(need(links, "base", "links."), lf, "links.base.");
  p.castor_hub = parse_link(need(links, "hub", "links."), lf, "links.hub.");
  p.castor_wheel = parse_link(need(links, "castor_wheel", "links."), lf, "links.castor_wheel.");
  p.drive_wheel = parse_link(need(links, "fixed_wheel", "links."), lf, "links.fixed_wheel.");

  const json& motors = need(doc, "motors", "");
  const json& arm = need(motors, "arm", "motors.");
  if (!arm.is_array() || arm.size() != 6)
    throw ParamsError(ParamsError::Kind::Parse, "motors.arm must list exactly 6 motors");
  for (int i = 0; i < 6; ++i) p.arm_motors[i] = parse_motor(arm[i], "motors.arm.");
  const json& wheels = need(motors, "wheels", "motors.");
  if (!wheels.is_array() || wheels.size() != 2)
    throw ParamsError(ParamsError::Kind::Parse, "motors.wheels must list exactly 2 motors");
  for (int i = 0; i < 2; ++i) p.wheel_motors[i] = parse_motor(wheels[i], "motors.wheels.");

  const json& spray = need(doc, "spray", "");
  p.spray.pattern_width = need_num(spray, "pattern_width", "spray.") * lf;
  p.spray.pattern_height = need_num(spray, "pattern_height", "spray.") * lf;
  p.spray.standoff = need_num(spray, "standoff", "spray.") * lf;
  p.spray.standoff_min = need_num(spray, "standoff_min", "spray.") * lf;
  p.spray.standoff_max = need_num(spray, "standoff_max", "spray.") * lf;

  const json& dyn = need(doc, "dynamics", "");
  p.friction.viscous = need_num(dyn, "friction_viscous", "dynamics.");
  p.friction.coulomb = need_num(dyn, "friction_coulomb", "dynamics.");
  p.spray.reaction_force = need_num(dyn, "spray_reaction_force", "dynamics.");
  const json& band = need(dyn, "spray_vibration_band", "dynamics.");
  if (!band.is_array() || band.size() != 2)
    throw ParamsError(ParamsError::Kind::Parse, "dynamics.spray_vibration_band must be [lo, hi]");
  p.spray.vibration_band_lo = band[0].get<double>();
  p.spray.vibration_band_hi = band[1].get<double>();

  ValidationReport report = validate_params(p);
  if (!report.ok())
    throw ParamsError(ParamsError::Kind::InvariantViolation,
                      "parameter validation failed:\n" + report.to_string());
  return p;
}

RobotParams load_robot_params(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ParamsError(ParamsError::Kind::Parse, "cannot open params file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_robot_params(buf.str());
}

namespace {

json link_to_json(const LinkInertial& l) {
  json j;
  j["mass"] = l.mass;
  j["cg"] = {l.cg[0], l.cg[1], l.cg[2]};
  j["inertia"] = {{"xx", l.inertia(0, 0)}, {"yy", l.inertia(1, 1)}, {"zz", l.inertia(2, 2)},
                  {"xy", l.inertia(0, 1)}, {"xz", l.inertia(0, 2)}, {"yz", l.inertia(1, 2)}};
  return j;
}

}  // namespace

std::string serialize_robot_params(const RobotParams& p) {
  if (!p.source_text.empty()) {
    // canonical re-emission of the loaded document; values survive untouched
    return json::parse(p.source_text).dump(2) + "\n";
  }
  json doc;
  doc["units"] = {{"length", "m"},         {"mass", "kg"},
                  {"inertia", "kg.m^2"},   {"angle", "rad"},
                  {"torque_constant", "N.m/A"}, {"rotor_inertia", "kg.m^2"}};
  json g;
  const auto& gp = p.geometry;
  g["RL1"] = gp.rl1; g["D1"] = gp.d1; g["RL2"] = gp.rl2; g["D3"] = gp.d3;
  g["RL4"] = gp.rl4; g["D4"] = gp.d4; g["RL5"] = gp.rl5; g["RL7"] = gp.rl7;
  g["a"] = gp.castor_mount_x; g["b"] = gp.half_track;
  g["r_c"] = gp.castor_wheel_radius; g["r_f"] = gp.drive_wheel_radius;
  g["p"] = gp.castor_mount_y; g["d"] = gp.castor_trail;
  json table = json::array();
  for (const auto& r : gp.kk_table)
    table.push_back({{"joint", r.joint}, {"alpha", r.alpha}, {"d", r.d},
                     {"theta_offset", r.theta_offset}, {"r", r.r}});
  g["kk_table"] = table;
  doc["geometry"] = g;
  json links;
  static const char* link_names[6] = {"link1", "link2", "link3", "link4", "link5", "link6"};
  for (int i = 0; i < 6; ++i) links[link_names[i]] = link_to_json(p.arm_links[i]);
  links["base"] = link_to_json(p.base_body);
  links["hub"] = link_to_json(p.castor_hub);
  links["castor_wheel"] = link_to_json(p.castor_wheel);
  links["fixed_wheel"] = link_to_json(p.drive_wheel);
  doc["links"] = links;
  json arm = json::array();
  for (const auto& m : p.arm_motors)
    arm.push_back({{"ia", m.rotor_inertia}, {"kt", m.torque_constant}});
  json wheels = json::array();
  for (const auto& m : p.wheel_motors)
    wheels.push_back({{"ia", m.rotor_inertia}, {"kt", m.torque_constant}});
  doc["motors"] = {{"arm", arm}, {"wheels", wheels}};
  doc["spray"] = {{"pattern_width", p.spray.pattern_width},
                  {"pattern_height", p.spray.pattern_height},
                  {"standoff", p.spray.standoff},
                  {"standoff_min", p.spray.standoff_min},
                  {"standoff_max", p.spray.standoff_max}};
  doc["dynamics"] = {{"friction_viscous", p.friction.viscous},
                     {"friction_coulomb", p.friction.coulomb},
                     {"spray_reaction_force", p.spray.reaction_force},
                     {"spray_vibration_band", {p.spray.vibration_band_lo, p.spray.vibration_band_hi}}};
  return doc.dump(2) + "\n";
}

double total_mass(const RobotParams& p) {
  double m = p.base_body.mass + 2.0 * (p.castor_hub.mass + p.castor_wheel.mass + p.drive_wheel.mass);
  for (const auto& l : p.arm_links) m += l.mass;
  return m;
}

namespace {

void check_inertia(const LinkInertial& l, const std::string& name, ValidationReport& rep) {
  using Sev = ValidationIssue::Severity;
  if (l.mass <= 0.0)
    rep.issues.push_back({Sev::Error, name + ": mass must be positive"});
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(l.inertia);
  const double scale = std::max(1e-12, l.inertia.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-9 * scale)
    rep.issues.push_back({Sev::Error, name + ": inertia tensor not positive semidefinite"});
  // principal moments obey Ix + Iy >= Iz up to print rounding; 5% slack
  const Eigen::Vector3d ev = es.eigenvalues();
  for (int i = 0; i < 3; ++i) {
    const double sum = ev[(i + 1) % 3] + ev[(i + 2) % 3];
    if (sum < ev[i] * (1.0 - 0.05))
      rep.issues.push_back({Sev::Warning, name + ": inertia triangle inequality violated beyond 5%"});
  }
}

}  // namespace

ValidationReport validate_params(const RobotParams& p) {
  using Sev = ValidationIssue::Severity;
  ValidationReport rep;
  const auto& g = p.geometry;

  auto positive = [&](double v, const char* name) {
    if (v <= 0.0)
      rep.issues.push_back({Sev::Error, std::string("geometry.") + name + " must be positive"});
  };
  positive(g.rl1, "RL1");
  positive(g.d1, "D1");
  positive(g.rl2, "RL2");
  positive(g.d3, "D3");
  positive(g.rl4, "RL4");
  positive(g.d4, "D4");
  positive(g.rl5, "RL5");
  positive(g.rl7, "RL7");
  positive(g.castor_mount_x, "a");
  positive(g.half_track, "b");
  positive(g.castor_wheel_radius, "r_c");
  positive(g.drive_wheel_radius, "r_f");
  positive(g.castor_mount_y, "p");
  if (g.castor_trail <= 0.0)
    rep.issues.push_back({Sev::Error, "geometry.d (castor trail) must be positive: zero trail is a steering singularity"});

  // advertised planar reach is the elbow pair
  if (std::abs(g.d3 + g.d4 - 1.290) > 1e-6)
    rep.issues.push_back({Sev::Error, "geometry: D3 + D4 must equal the 1.290 m planar reach"});

  // joint-frame table must be the 6 driven rows in order, optionally a fixed
  // tool row, and agree with the named lengths
  int driven = 0;
  bool tool_seen = false;
  for (const auto& r : g.kk_table) {
    if (r.joint == 0) {
      tool_seen = true;
      continue;
    }
    ++driven;
    if (tool_seen || r.joint != driven) {
      rep.issues.push_back({Sev::Error, "geometry.kk_table rows must be joints 1..6 in order"});
      break;
    }
  }
  if (driven != 6)
    rep.issues.push_back({Sev::Error, "geometry.kk_table must contain 6 driven rows"});
  if (driven == 6 && !tool_seen)
    rep.issues.push_back({Sev::Warning, "geometry.kk_table has no fixed tool row"});
  if (driven == 6) {
    auto row = [&](int j) -> const KKRow& { return g.kk_table[static_cast<size_t>(j - 1)]; };
    const double tol = 1e-12;
    bool consistent = std::abs(row(1).r - g.rl1) < tol && std::abs(row(2).d - g.d1) < tol &&
                      std::abs(row(2).r - g.rl2) < tol && std::abs(row(3).d - g.d3) < tol &&
                      std::abs(row(3).r - g.rl4) < tol && std::abs(row(4).d - g.d4) < tol &&
                      std::abs(row(5).r - g.rl5) < tol;
    if (!consistent)
      rep.issues.push_back({Sev::Error, "geometry.kk_table lengths disagree with named geometry values"});
  }

  static const char* link_names[6] = {"link1", "link2", "link3", "link4", "link5", "link6"};
  for (int i = 0; i < 6; ++i) check_inertia(p.arm_links[i], link_names[i], rep);
  check_inertia(p.base_body, "base", rep);
  check_inertia(p.castor_hub, "hub", rep);
  check_inertia(p.castor_wheel, "castor_wheel", rep);
  check_inertia(p.drive_wheel, "fixed_wheel", rep);

  for (int i = 0; i < 6; ++i) {
    if (p.arm_motors[i].rotor_inertia <= 0.0 || p.arm_motors[i].torque_constant <= 0.0)
      rep.issues.push_back({Sev::Error, "motors.arm entries must be positive"});
  }
  for (int i = 0; i < 2; ++i) {
    if (p.wheel_motors[i].rotor_inertia <= 0.0 || p.wheel_motors[i].torque_constant <= 0.0)
      rep.issues.push_back({Sev::Error, "motors.wheels entries must be positive"});
  }

  if (total_mass(p) > 21.5)
    rep.issues.push_back({Sev::Error, "total mass exceeds the 21.5 kg budget"});

  if (p.spray.pattern_width <= 0 || p.spray.pattern_height <= 0)
    rep.issues.push_back({Sev::Error, "spray pattern dimensions must be positive"});
  if (p.spray.standoff < p.spray.standoff_min || p.spray.standoff > p.spray.standoff_max)
    rep.issues.push_back({Sev::Error, "spray.standoff outside [standoff_min, standoff_max]"});
  if (p.spray.vibration_band_lo <= 0 || p.spray.vibration_band_hi <= p.spray.vibration_band_lo)
    rep.issues.push_back({Sev::Error, "dynamics.spray_vibration_band must be an increasing positive pair"});
  if (p.friction.viscous < 0 || p.friction.coulomb < 0)
    rep.issues.push_back({Sev::Error, "friction coefficients must be non-negative"});

  return rep;
}

std::map<std::string, double> symbol_table(const RobotParams& p) {
  std::map<std::string, double> t;
  const auto& g = p.geometry;
  t["RL1"] = g.rl1; t["D1"] = g.d1; t["RL2"] = g.rl2; t["D3"] = g.d3;
  t["RL4"] = g.rl4; t["D4"] = g.d4; t["RL5"] = g.rl5; t["RL7"] = g.rl7;
  t["a"] = g.castor_mount_x; t["b"] = g.half_track;
  t["r_c"] = g.castor_wheel_radius; t["r_f"] = g.drive_wheel_radius;
  t["p"] = g.castor_mount_y; t["d"] = g.castor_trail;

  auto body = [&](const LinkInertial& l, const std::string& suffix) {
    t["M" + suffix] = l.mass;
    t["X" + suffix] = l.cg[0];
    t["Y" + suffix] = l.cg[1];
    t["Z" + suffix] = l.cg[2];
    t["XX" + suffix] = l.inertia(0, 0);
    t["YY" + suffix] = l.inertia(1, 1);
    t["ZZ" + suffix] = l.inertia(2, 2);
    t["XY" + suffix] = l.inertia(0, 1);
    t["XZ" + suffix] = l.inertia(0, 2);
    t["YZ" + suffix] = l.inertia(1, 2);
  };
  for (int i = 0; i < 6; ++i) body(p.arm_links[i], std::to_string(i + 1));
  body(p.base_body, "b");
  body(p.castor_hub, "o");
  body(p.castor_wheel, "c");
  body(p.drive_wheel, "f");

  for (int i = 0; i < 6; ++i) {
    t["Ia" + std::to_string(i + 1)] = p.arm_motors[i].rotor_inertia;
    t["Kt" + std::to_string(i + 1)] = p.arm_motors[i].torque_constant;
  }
  t["Ia1f"] = p.wheel_motors[0].rotor_inertia;
  t["Kt1f"] = p.wheel_motors[0].torque_constant;
  t["Ia2f"] = p.wheel_motors[1].rotor_inertia;
  t["Kt2f"] = p.wheel_motors[1].torque_constant;
  return t;
}

}  // namespace robopainter
