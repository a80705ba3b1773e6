#include "robopainter/room.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "robopainter/error.hpp"

namespace robopainter {

namespace {
constexpr double kEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

Eigen::Vector2d RoomModel::wall_origin(int wall) const {
  switch (wall & 3) {
    case 0: return {0.0, 0.0};
    case 1: return {lx, 0.0};
    case 2: return {lx, ly};
    default: return {0.0, ly};
  }
}

Eigen::Vector2d RoomModel::wall_tangent(int wall) const {
  switch (wall & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

Eigen::Vector2d RoomModel::wall_inward_normal(int wall) const {
  switch (wall & 3) {
    case 0: return {0.0, 1.0};
    case 1: return {-1.0, 0.0};
    case 2: return {0.0, -1.0};
    default: return {1.0, 0.0};
  }
}

double RoomModel::wall_heading(int wall) const {
  switch (wall & 3) {
    case 0: return 0.0;
    case 1: return kPi / 2;
    case 2: return kPi;
    default: return -kPi / 2;
  }
}

Eigen::Vector2d RoomModel::world_from_wall(int wall, double u, double inset) const {
  return wall_origin(wall) + u * wall_tangent(wall) + inset * wall_inward_normal(wall);
}

double RoomModel::wall_u(int wall, const Eigen::Vector2d& p) const {
  return wall_tangent(wall).dot(p - wall_origin(wall));
}

std::vector<OpeningRect> RoomModel::opening_rects(int wall) const {
  std::vector<OpeningRect> out;
  for (const auto& o : walls[wall & 3].openings) {
    out.push_back({o.u0, o.u1, o.z0, o.z1});
  }
  return out;
}

double RoomModel::wall_area(int wall) const { return wall_length(wall) * height; }

double RoomModel::opening_area(int wall) const {
  double a = 0.0;
  const double len = wall_length(wall);
  for (const auto& o : walls[wall & 3].openings) {
    const double w = std::max(0.0, std::min(o.u1, len) - std::max(o.u0, 0.0));
    const double h = std::max(0.0, std::min(o.z1, height) - std::max(o.z0, 0.0));
    a += w * h;
  }
  return a;
}

double RoomModel::paintable_area() const {
  double a = 0.0;
  for (int w = 0; w < 4; ++w) a += wall_area(w) - opening_area(w);
  return a;
}

double RoomModel::raycast(const Eigen::Vector2d& origin, const Eigen::Vector2d& dir,
                          double z_plane, double t) const {
  double best = kInf;
  // walls (a ray through an opening escapes the room: no echo)
  for (int w = 0; w < 4; ++w) {
    const Eigen::Vector2d n = wall_inward_normal(w);
    const Eigen::Vector2d p0 = wall_origin(w);
    const double denom = n.dot(dir);
    if (denom > -kEps) continue;  // travelling away from or parallel to the wall
    const double s = n.dot(p0 - origin) / denom;
    if (s < kEps) continue;
    const Eigen::Vector2d hit = origin + s * dir;
    const double u = wall_u(w, hit);
    if (u < -kEps || u > wall_length(w) + kEps) continue;
    if (s < best) {
      bool through = false;
      for (const auto& o : walls[w].openings) {
        if (u > o.u0 + kEps && u < o.u1 - kEps && z_plane > o.z0 + kEps && z_plane < o.z1 - kEps) {
          through = true;
          break;
        }
      }
      best = through ? kInf : s;
      if (through) {
        // the ray leaves the room through the hole; nothing behind can echo
        return kInf;
      }
    }
  }
  // obstacle discs active at sim time t
  for (const auto& ob : obstacles) {
    if (t < ob.appear || t >= ob.vanish) continue;
    const Eigen::Vector2d rel = origin - ob.center;
    const double b = rel.dot(dir);
    const double c = rel.squaredNorm() - ob.radius * ob.radius;
    const double disc = b * b - c;
    if (disc < 0.0) continue;
    const double root = std::sqrt(disc);
    double s = -b - root;
    if (s < kEps) s = -b + root;  // origin inside the disc
    if (s > kEps && s < best) best = s;
  }
  return best;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw RoomError(what);
}

}  // namespace

RoomModel parse_room(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw RoomError(std::string("room description is not valid JSON: ") + e.what());
  }
  RoomModel room;
  try {
    require(j.contains("footprint") && j["footprint"].is_array() && j["footprint"].size() == 2,
            "missing or malformed 'footprint' [Lx, Ly]");
    room.lx = j["footprint"][0].get<double>();
    room.ly = j["footprint"][1].get<double>();
    require(room.lx > 0.5 && room.ly > 0.5, "footprint must exceed 0.5 m on each side");
    require(j.contains("height"), "missing 'height'");
    room.height = j["height"].get<double>();
    require(room.height > 0.0, "height must be positive");

    if (j.contains("walls")) {
      require(j["walls"].is_array() && j["walls"].size() == 4, "'walls' must list all 4 walls");
      for (int w = 0; w < 4; ++w) {
        const auto& jw = j["walls"][w];
        if (!jw.contains("openings")) continue;
        for (const auto& jo : jw["openings"]) {
          RoomOpening o;
          o.u0 = jo.at("u0").get<double>();
          o.u1 = jo.at("u1").get<double>();
          o.z0 = jo.at("z0").get<double>();
          o.z1 = jo.at("z1").get<double>();
          require(o.u0 < o.u1 && o.z0 < o.z1, "opening extents must be ordered");
          require(o.u0 >= -kEps && o.u1 <= room.wall_length(w) + kEps,
                  "opening exceeds wall length on wall " + std::to_string(w));
          require(o.z0 >= -kEps && o.z1 <= room.height + kEps,
                  "opening exceeds wall height on wall " + std::to_string(w));
          room.walls[w].openings.push_back(o);
        }
      }
    }
    if (j.contains("obstacles")) {
      for (const auto& jo : j["obstacles"]) {
        RoomObstacle ob;
        require(jo.contains("center") && jo["center"].is_array() && jo["center"].size() == 2,
                "obstacle needs 'center' [x, y]");
        ob.center.x() = jo["center"][0].get<double>();
        ob.center.y() = jo["center"][1].get<double>();
        ob.radius = jo.value("radius", 0.2);
        require(ob.radius > 0.0, "obstacle radius must be positive");
        ob.appear = jo.value("appear", 0.0);
        ob.vanish = jo.value("vanish", kInf);
        room.obstacles.push_back(ob);
      }
    }
    if (j.contains("start_pose")) {
      require(j["start_pose"].is_array() && j["start_pose"].size() == 3,
              "'start_pose' must be [x, y, yaw]");
      for (int i = 0; i < 3; ++i) room.start_pose[i] = j["start_pose"][i].get<double>();
      require(room.start_pose.x() > 0 && room.start_pose.x() < room.lx &&
                  room.start_pose.y() > 0 && room.start_pose.y() < room.ly,
              "start pose lies outside the room");
    }
  } catch (const nlohmann::json::exception& e) {
    throw RoomError(std::string("room description malformed: ") + e.what());
  }
  return room;
}

RoomModel load_room(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RoomError("cannot open room file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_room(ss.str());
}

}  // namespace robopainter
