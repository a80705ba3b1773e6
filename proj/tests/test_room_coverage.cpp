#include <doctest.h>

#include <cmath>
#include <limits>

#include "robopainter/coverage.hpp"
#include "robopainter/error.hpp"
#include "robopainter/room.hpp"
#include "test_support.hpp"

using namespace robopainter;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

RoomModel square4() {
  return parse_room(R"({"footprint":[4,4],"height":2.7,
    "walls":[{"openings":[]},{"openings":[]},{"openings":[]},{"openings":[]}],
    "obstacles":[],"start_pose":[1.2,1.5,-1.5707963267948966]})");
}
}  // namespace

TEST_SUITE("room_coverage") {

TEST_CASE("room files parse with the expected geometry") {
  const RoomModel r = load_room(testsupport::room_path("room2p5.json"));
  CHECK(r.lx == 2.5);
  CHECK(r.ly == 2.5);
  CHECK(r.height == 2.7);
  CHECK(r.walls.size() == 4);
  CHECK(std::abs(r.start_pose[2] + kPi / 2) < 1e-9);
}

TEST_CASE("malformed room descriptions are rejected") {
  CHECK_THROWS_AS(parse_room("{"), RoomError);
  CHECK_THROWS_AS(parse_room("{}"), RoomError);
  // wrong wall count
  CHECK_THROWS_AS(parse_room(R"({"footprint":[4,4],"height":2.7,
    "walls":[{"openings":[]}],"obstacles":[],"start_pose":[1,1,0]})"),
                  RoomError);
  // opening beyond the wall
  CHECK_THROWS_AS(parse_room(R"({"footprint":[4,4],"height":2.7,
    "walls":[{"openings":[{"u0":3.5,"u1":4.5,"z0":0,"z1":2.0}]},
             {"openings":[]},{"openings":[]},{"openings":[]}],
    "obstacles":[],"start_pose":[1,1,0]})"),
                  RoomError);
  // start pose outside the footprint
  CHECK_THROWS_AS(parse_room(R"({"footprint":[4,4],"height":2.7,
    "walls":[{"openings":[]},{"openings":[]},{"openings":[]},{"openings":[]}],
    "obstacles":[],"start_pose":[5,1,0]})"),
                  RoomError);
}

TEST_CASE("wall frames run counter-clockwise with inward normals") {
  const RoomModel r = square4();
  CHECK((r.wall_origin(0) - Eigen::Vector2d(0, 0)).norm() < 1e-15);
  CHECK((r.wall_tangent(0) - Eigen::Vector2d(1, 0)).norm() < 1e-15);
  CHECK((r.wall_inward_normal(0) - Eigen::Vector2d(0, 1)).norm() < 1e-15);
  CHECK((r.wall_origin(2) - Eigen::Vector2d(4, 4)).norm() < 1e-15);
  CHECK((r.wall_tangent(2) - Eigen::Vector2d(-1, 0)).norm() < 1e-15);
  CHECK((r.wall_inward_normal(2) - Eigen::Vector2d(0, -1)).norm() < 1e-15);

  for (int w = 0; w < 4; ++w) {
    const double u = 1.3, inset = 0.6;
    const Eigen::Vector2d p = r.world_from_wall(w, u, inset);
    CHECK(std::abs(r.wall_u(w, p) - u) < 1e-12);
    // inset distance recovered along the inward normal
    const Eigen::Vector2d foot = r.world_from_wall(w, u, 0.0);
    CHECK(std::abs((p - foot).dot(r.wall_inward_normal(w)) - inset) < 1e-12);
  }
}

TEST_CASE("raycast returns exact wall distances") {
  const RoomModel r = square4();
  const Eigen::Vector2d c(2.0, 2.0);
  CHECK(std::abs(r.raycast(c, Eigen::Vector2d(0, -1), 0.25, 0.0) - 2.0) < 1e-12);
  CHECK(std::abs(r.raycast(c, Eigen::Vector2d(1, 0), 0.25, 0.0) - 2.0) < 1e-12);
  CHECK(std::abs(r.raycast(c, Eigen::Vector2d(0, 1), 0.25, 0.0) - 2.0) < 1e-12);
  const Eigen::Vector2d diag = Eigen::Vector2d(1, -1).normalized();
  CHECK(std::abs(r.raycast(c, diag, 0.25, 0.0) - 2.0 * std::sqrt(2.0)) < 1e-12);
  // off-centre
  CHECK(std::abs(r.raycast(Eigen::Vector2d(0.5, 1.0), Eigen::Vector2d(-1, 0), 0.25, 0.0) - 0.5) <
        1e-12);
}

TEST_CASE("openings spanning the scan plane are holes; higher ones are not") {
  const RoomModel r = load_room(testsupport::room_path("door4x4.json"));
  // the doorway on wall 0 reaches the floor: a ray through it escapes
  const RoomOpening& door = r.walls[0].openings[0];
  const double ucentre = 0.5 * (door.u0 + door.u1);
  const Eigen::Vector2d from(ucentre, 1.0);
  CHECK(r.raycast(from, Eigen::Vector2d(0, -1), 0.25, 0.0) == kInf);
  // the window on wall 2 starts at z = 0.9: solid at the 0.25 m scan plane
  const RoomOpening& win = r.walls[2].openings[0];
  const double wcentre = 0.5 * (win.u0 + win.u1);
  const Eigen::Vector2d wfrom(r.lx - wcentre, 3.0);
  CHECK(std::abs(r.raycast(wfrom, Eigen::Vector2d(0, 1), 0.25, 0.0) - (r.ly - 3.0)) < 1e-12);
  // beside the door the wall is solid
  CHECK(std::abs(r.raycast(Eigen::Vector2d(0.5, 1.0), Eigen::Vector2d(0, -1), 0.25, 0.0) - 1.0) <
        1e-12);
}

TEST_CASE("obstacles block rays only while present") {
  RoomModel r = square4();
  RoomObstacle ob;
  ob.center = Eigen::Vector2d(2.0, 1.0);
  ob.radius = 0.25;
  ob.appear = 10.0;
  ob.vanish = 20.0;
  r.obstacles.push_back(ob);

  const Eigen::Vector2d from(2.0, 3.0);
  const Eigen::Vector2d dir(0, -1);
  CHECK(std::abs(r.raycast(from, dir, 0.25, 5.0) - 3.0) < 1e-12);            // not yet there
  CHECK(std::abs(r.raycast(from, dir, 0.25, 15.0) - (2.0 - 0.25)) < 1e-12);  // disc edge
  CHECK(std::abs(r.raycast(from, dir, 0.25, 25.0) - 3.0) < 1e-12);           // gone again
  // a ray that misses the disc laterally sees the wall throughout
  CHECK(std::abs(r.raycast(Eigen::Vector2d(2.6, 3.0), dir, 0.25, 15.0) - 3.0) < 1e-12);
}

TEST_CASE("paintable area excludes openings exactly") {
  const RoomModel r = load_room(testsupport::room_path("door4x4.json"));
  double expected = 0.0;
  for (int w = 0; w < 4; ++w) expected += r.wall_area(w) - r.opening_area(w);
  CHECK(std::abs(r.paintable_area() - expected) < 1e-12);
  CHECK(r.opening_area(0) > 0.0);
  CHECK(r.opening_area(2) > 0.0);
  CHECK(r.opening_area(1) == 0.0);
}

TEST_CASE("coverage grid counts painted and opening cells exactly") {
  CoverageGrid g(1.0, 1.0, {{0.2, 0.4, 0.2, 0.4}});
  CHECK(std::abs(g.paintable_area() - 0.96) < 1e-12);
  CHECK(g.painted_area() == 0.0);
  g.paint_rect(0.0, 1.0, 0.0, 1.0);
  CHECK(std::abs(g.painted_area() - 0.96) < 1e-12);  // opening cells never count
  CHECK(std::abs(g.covered_fraction() - 1.0) < 1e-12);
}

TEST_CASE("partial painting reports the exact covered fraction") {
  CoverageGrid g(2.0, 1.0, {});
  g.paint_rect(0.0, 1.0, 0.0, 1.0);  // half of it
  CHECK(std::abs(g.painted_area() - 1.0) < 1e-12);
  CHECK(std::abs(g.covered_fraction() - 0.5) < 1e-12);
  // painting the same region again changes nothing
  g.paint_rect(0.2, 0.8, 0.2, 0.8);
  CHECK(std::abs(g.painted_area() - 1.0) < 1e-12);
}

TEST_CASE("sweep deposition covers the capsule footprint of the pass") {
  CoverageGrid g(1.0, 1.0, {});
  // vertical pass through the middle with a 0.125 m half-width pattern
  g.paint_sweep(Eigen::Vector2d(0.5, 0.0), Eigen::Vector2d(0.5, 1.0), 0.125, 0.025);
  const double painted = g.painted_area();
  CHECK(painted > 0.24);  // 0.25 wide strip across full height, minus end rounding
  CHECK(painted <= 0.25 + 0.03);
  // degenerate sweep: a dab the size of the pattern; cells are marked when
  // their centres touch the footprint, so edges aligned with the 1 cm grid
  // can pick up one extra row/column per side
  CoverageGrid g2(1.0, 1.0, {});
  g2.paint_sweep(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.5, 0.5), 0.125, 0.025);
  CHECK(g2.painted_area() > 0.25 * 0.05 - 0.003);
  CHECK(g2.painted_area() < 0.25 * 0.05 + 0.004);
}

TEST_CASE("rasterized wall plan covers an unbroken wall nearly completely") {
  const RobotParams& p = testsupport::params();
  const PlanTiming timing;
  const WallPlan plan = plan_wall(0, 4.0, 2.7, {}, p.spray, timing);
  CoverageGrid grid(4.0, 2.7, {});
  rasterize_wall_plan(grid, plan, p.spray);
  CHECK(grid.covered_fraction() >= 0.999);
}

TEST_CASE("rasterized plan respects door openings") {
  const RoomModel r = load_room(testsupport::room_path("door4x4.json"));
  const RobotParams& p = testsupport::params();
  const PlanTiming timing;
  const auto rects = r.opening_rects(0);
  const WallPlan plan = plan_wall(0, r.wall_length(0), r.height, rects, p.spray, timing);
  CoverageGrid grid(r.wall_length(0), r.height, rects);
  rasterize_wall_plan(grid, plan, p.spray);
  CHECK(grid.covered_fraction() >= 0.995);
}

TEST_CASE("coverage drawing emits svg") {
  const RobotParams& p = testsupport::params();
  const PlanTiming timing;
  std::vector<CoverageGrid> grids;
  std::vector<WallPlan> plans;
  for (int w = 0; w < 4; ++w) {
    plans.push_back(plan_wall(w, 2.5, 2.7, {}, p.spray, timing));
    grids.emplace_back(2.5, 2.7, std::vector<OpeningRect>{});
    rasterize_wall_plan(grids.back(), plans.back(), p.spray);
  }
  const std::string svg = coverage_to_svg(grids, plans);
  CHECK(svg.find("<svg") != std::string::npos);
}

}  // TEST_SUITE
