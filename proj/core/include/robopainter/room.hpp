#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robopainter/geometry.hpp"
#include "robopainter/trajectory.hpp"

namespace robopainter {

struct RoomOpening {
  double u0 = 0, u1 = 0;  // along the wall, from the wall's start corner
  double z0 = 0, z1 = 0;
};

struct RoomObstacle {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.2;
  double appear = 0.0;                      // sim time the disc becomes present
  double vanish = std::numeric_limits<double>::infinity();
};

struct RoomWall {
  std::vector<RoomOpening> openings;
};

// Rectangular room [0, Lx] x [0, Ly], walls indexed counter-clockwise:
//   0: y = 0   (start corner (0,0),  tangent +x, inward normal +y)
//   1: x = Lx  (start corner (Lx,0), tangent +y, inward normal -x)
//   2: y = Ly  (start corner (Lx,Ly), tangent -x, inward normal -y)
//   3: x = 0   (start corner (0,Ly), tangent -y, inward normal +x)
class RoomModel {
 public:
  double lx = 4.0, ly = 4.0, height = 2.7;
  std::array<RoomWall, 4> walls;
  std::vector<RoomObstacle> obstacles;
  Eigen::Vector3d start_pose{1.2, 1.5, -kPi / 2};  // (x, y, yaw)

  static constexpr double kPi = 3.14159265358979323846;

  double wall_length(int wall) const { return (wall % 2 == 0) ? lx : ly; }
  Eigen::Vector2d wall_origin(int wall) const;
  Eigen::Vector2d wall_tangent(int wall) const;
  Eigen::Vector2d wall_inward_normal(int wall) const;
  double wall_heading(int wall) const;  // heading of the tangent

  // world point of a wall-plane coordinate at distance d inside the room
  Eigen::Vector2d world_from_wall(int wall, double u, double inset) const;
  // wall coordinate u of a world point projected on the wall
  double wall_u(int wall, const Eigen::Vector2d& p) const;

  std::vector<OpeningRect> opening_rects(int wall) const;

  double wall_area(int wall) const;
  double opening_area(int wall) const;
  double paintable_area() const;  // all four walls minus openings

  // Distance from `origin` along unit `dir` to the first solid surface in the
  // sonar scan plane (height `z_plane`). Openings whose z-range spans the
  // plane are holes: a ray through one escapes and reports +infinity.
  // Obstacles are vertical discs present during [appear, vanish).
  double raycast(const Eigen::Vector2d& origin, const Eigen::Vector2d& dir, double z_plane,
                 double t) const;
};

// Parse the room description (see data/rooms/*.json):
// { "footprint": [Lx, Ly], "height": H,
//   "walls": [ { "openings": [ {"u0":..,"u1":..,"z0":..,"z1":..}, ...] }, x4 ],
//   "obstacles": [ {"center":[x,y], "radius":r, "appear":t0, "vanish":t1}, ...],
//   "start_pose": [x, y, yaw] }
// Throws RoomError on malformed input or out-of-bounds openings.
RoomModel parse_room(const std::string& json_text);
RoomModel load_room(const std::string& path);

}  // namespace robopainter
