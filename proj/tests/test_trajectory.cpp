#include <doctest.h>

#include <cmath>
#include <vector>

#include "robopainter/error.hpp"
#include "robopainter/trajectory.hpp"
#include "test_support.hpp"

using namespace robopainter;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<PaintStrip> core_only(const std::vector<PaintStrip>& strips) {
  std::vector<PaintStrip> core;
  for (const auto& s : strips)
    if (s.section == StripSection::Core) core.push_back(s);
  return core;
}
}  // namespace

TEST_SUITE("trajectory") {

TEST_CASE("quintic segment satisfies rest-to-rest boundary conditions") {
  const QuinticSegment seg = quintic_segment(-0.3, 1.1, 2.5);
  CHECK(std::abs(seg.position(0.0) - (-0.3)) < 1e-12);
  CHECK(std::abs(seg.position(2.5) - 1.1) < 1e-12);
  CHECK(std::abs(seg.velocity(0.0)) < 1e-12);
  CHECK(std::abs(seg.velocity(2.5)) < 1e-12);
  CHECK(std::abs(seg.acceleration(0.0)) < 1e-12);
  CHECK(std::abs(seg.acceleration(2.5)) < 1e-12);

  // peak speed 1.875 * span / T at midpoint
  const double peak = QuinticSegment::kPeakVelocityFactor * 1.4 / 2.5;
  CHECK(std::abs(seg.velocity(1.25) - peak) < 1e-12);
  double vmax = 0.0;
  for (double t = 0; t <= 2.5; t += 1e-3) vmax = std::max(vmax, std::abs(seg.velocity(t)));
  CHECK(vmax <= peak + 1e-9);

  const QuinticSample s = sample(seg, 0.7);
  CHECK(s.position == seg.position(0.7));
  CHECK(s.velocity == seg.velocity(0.7));
  CHECK(s.acceleration == seg.acceleration(0.7));
}

TEST_CASE("non-positive quintic duration is rejected") {
  CHECK_THROWS_AS(quintic_segment(0, 1, 0.0), PlanError);
  CHECK_THROWS_AS(quintic_segment(0, 1, -2.0), PlanError);
}

TEST_CASE("trapezoid profile hits the advertised hop timing") {
  const TrapezoidProfile hop{0.96, 0.5, 1.0};
  // ramp up 0.5 s + cruise (0.96 - 0.25)/0.5 + ramp down 0.5 s = 2.42 s
  CHECK(std::abs(hop.duration() - 2.42) < 1e-12);
  CHECK(std::abs(hop.position(hop.duration()) - 0.96) < 1e-12);
  CHECK(std::abs(hop.position(0.0)) < 1e-12);
  CHECK(std::abs(hop.velocity(hop.duration() / 2) - 0.5) < 1e-12);
  CHECK(std::abs(hop.velocity(0.0)) < 1e-12);
  CHECK(std::abs(hop.velocity(hop.duration())) < 1e-12);

  // short moves degrade to a triangle that never reaches vmax
  const TrapezoidProfile tri{0.16, 0.5, 1.0};
  CHECK(std::abs(tri.duration() - 0.8) < 1e-12);  // 2 sqrt(d/a)
  CHECK(std::abs(tri.velocity(0.4) - 0.4) < 1e-12);
  CHECK(std::abs(tri.position(tri.duration()) - 0.16) < 1e-12);

  // signed distances mirror cleanly
  const TrapezoidProfile back{-0.96, 0.5, 1.0};
  CHECK(std::abs(back.duration() - 2.42) < 1e-12);
  CHECK(std::abs(back.position(back.duration()) + 0.96) < 1e-12);
}

TEST_CASE("a 4 m wall splits into 17 overlapping core strips") {
  const auto strips = plan_wall_strips(4.0, 2.7, {});
  const auto core = core_only(strips);
  REQUIRE(core.size() == 17);
  for (std::size_t k = 0; k + 1 < core.size(); ++k) {
    CHECK(std::abs(core[k].u - (0.125 + 0.24 * static_cast<double>(k))) < 1e-12);
  }
  CHECK(std::abs(core.back().u - 3.875) < 1e-12);  // right-aligned remainder strip
  for (const auto& s : core) {
    CHECK(s.width == 0.25);
    CHECK(s.z_bottom == 0.0);
    CHECK(std::abs(s.z_top - 2.45) < 1e-12);
    CHECK(s.roll == 0.0);
    REQUIRE(s.runs.size() == 1);
    CHECK(s.runs[0].first == 0.0);
    CHECK(std::abs(s.runs[0].second - 2.45) < 1e-12);
  }
  // neighbouring strips overlap by 1 cm
  CHECK(std::abs((core[0].u + 0.125) - (core[1].u - 0.125) - 0.01) < 1e-12);

  // the rolled band above 2.45 m
  REQUIRE(strips.size() == 18);
  const PaintStrip& outline = strips.back();
  CHECK(outline.section == StripSection::Outline);
  CHECK(std::abs(outline.roll - kPi / 2) < 1e-12);
  CHECK(std::abs(outline.z_bottom - 2.45) < 1e-12);
  CHECK(std::abs(outline.z_top - 2.7) < 1e-12);
}

TEST_CASE("a 2.5 m wall splits into 11 core strips") {
  const auto core = core_only(plan_wall_strips(2.5, 2.7, {}));
  REQUIRE(core.size() == 11);
  CHECK(std::abs(core[9].u - (0.125 + 0.24 * 9)) < 1e-12);
  CHECK(std::abs(core.back().u - 2.375) < 1e-12);
}

TEST_CASE("strip limits reject unusable walls") {
  CHECK_THROWS_AS(plan_wall_strips(0.2, 2.7, {}), PlanError);   // narrower than one strip
  CHECK_THROWS_AS(plan_wall_strips(4.0, 2.95, {}), PlanError);  // beyond vertical reach
  CHECK_NOTHROW(plan_wall_strips(4.0, 2.7, {}));
  CHECK_NOTHROW(plan_wall_strips(0.25, 2.45, {}));
}

TEST_CASE("base posts group four strips each and stay within lateral reach") {
  const auto strips = plan_wall_strips(4.0, 2.7, {});
  const auto core = core_only(strips);
  const auto posts = plan_base_posts(core, 0.175, 0.60);
  REQUIRE(posts.size() == 5);
  const double expected_u[5] = {0.485, 1.445, 2.405, 3.365, 3.875};
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(posts[i].u - expected_u[i]) < 1e-12);
    CHECK(posts[i].distance == 0.60);
  }
  CHECK(posts[0].strip_indices.size() == 4);
  CHECK(posts[4].strip_indices.size() == 1);
  for (const auto& post : posts)
    for (int idx : post.strip_indices)
      CHECK(std::abs(core[static_cast<std::size_t>(idx)].u - post.u) <= 0.5 + 1e-12);
}

TEST_CASE("standoff outside the validated window is rejected") {
  const auto core = core_only(plan_wall_strips(4.0, 2.7, {}));
  CHECK_THROWS_AS(plan_base_posts(core, 0.05, 0.60), PlanError);
  CHECK_THROWS_AS(plan_base_posts(core, 0.30, 0.60), PlanError);
  CHECK_NOTHROW(plan_base_posts(core, 0.10, 0.60));
  CHECK_NOTHROW(plan_base_posts(core, 0.25, 0.60));
}

TEST_CASE("door openings clip strip runs to the remaining wall above") {
  // 0.4 m door from the floor to 2.1 m, centred on u = 2.1
  const std::vector<OpeningRect> door{{1.9, 2.3, 0.0, 2.1}};
  const auto core = core_only(plan_wall_strips(4.0, 2.7, door));
  // 17 regular columns plus one cut-in seam against the door's right edge
  // (the fan of the last full-height column left of the door already reaches
  // the left edge, so no seam is needed there)
  REQUIRE(core.size() == 18);
  int clipped = 0, seams = 0;
  for (const auto& s : core) {
    if (s.u > 1.9 && s.u < 2.3) {
      ++clipped;
      REQUIRE(s.runs.size() == 1);
      CHECK(std::abs(s.runs[0].first - 2.1) < 1e-12);
      CHECK(std::abs(s.runs[0].second - 2.45) < 1e-12);
    } else {
      REQUIRE(s.runs.size() == 1);
      CHECK(s.runs[0].first == 0.0);
      CHECK(std::abs(s.runs[0].second - 2.45) < 1e-12);
    }
    if (std::abs(s.u - (2.3 + 0.125)) < 1e-12) ++seams;
  }
  CHECK(clipped == 2);
  CHECK(seams == 1);
  // centres stay sorted so post grouping stays contiguous
  for (std::size_t i = 1; i < core.size(); ++i) CHECK(core[i - 1].u < core[i].u);
}

TEST_CASE("window openings split strip runs into two spray intervals") {
  const std::vector<OpeningRect> window{{1.0, 2.0, 0.9, 2.1}};
  const auto core = core_only(plan_wall_strips(4.0, 2.7, window));
  for (const auto& s : core) {
    if (s.u > 1.0 && s.u < 2.0) {
      REQUIRE(s.runs.size() == 2);
      CHECK(s.runs[0].first == 0.0);
      CHECK(std::abs(s.runs[0].second - 0.9) < 1e-12);
      CHECK(std::abs(s.runs[1].first - 2.1) < 1e-12);
      CHECK(std::abs(s.runs[1].second - 2.45) < 1e-12);
    }
  }
}

TEST_CASE("boustrophedon legs alternate direction with ten-second strokes") {
  const PlanTiming timing;
  const auto strips = plan_wall_strips(4.0, 2.7, {});
  const auto core = core_only(strips);
  const auto posts = plan_base_posts(core, 0.175, 0.60);
  const auto legs = plan_core_path(core, posts[0], 2.45, timing);

  REQUIRE(legs.size() == 7);  // 4 strokes + 3 shifts
  int strokes = 0;
  double t_cursor = 0.0;
  bool up = true;
  for (const auto& leg : legs) {
    CHECK(std::abs(leg.t0 - t_cursor) < 1e-12);
    t_cursor += leg.duration;
    if (leg.spray_on) {
      ++strokes;
      CHECK(std::abs(leg.duration - timing.stroke_duration) < 1e-12);
      CHECK(std::abs(leg.a[0] - leg.b[0]) < 1e-12);  // vertical
      if (up) {
        CHECK(leg.a[1] < leg.b[1]);
      } else {
        CHECK(leg.a[1] > leg.b[1]);
      }
      up = !up;
      CHECK(leg.strip_index >= 0);
    } else {
      CHECK(std::abs(leg.duration - timing.shift_duration) < 1e-12);
    }
  }
  CHECK(strokes == 4);
}

TEST_CASE("outline share keeps the nozzle within lateral reach of the post") {
  const PlanTiming timing;
  const auto strips = plan_wall_strips(4.0, 2.7, {});
  const PaintStrip& outline = strips.back();
  const auto core = core_only(strips);
  const auto posts = plan_base_posts(core, 0.175, 0.60);
  // share of the first post: from the wall corner to 0.48 m past the station
  const auto legs = plan_outline_path(outline, posts[0], 0.0, 0.965, 2.7, timing);
  REQUIRE(!legs.empty());
  for (const auto& leg : legs) {
    CHECK(std::abs(leg.roll - kPi / 2) < 1e-12);
    CHECK(std::abs(leg.a[1] - 2.575) < 1e-12);  // band centre height
    CHECK(leg.a[0] >= posts[0].u - 0.5 - 1e-9);
    CHECK(leg.b[0] <= posts[0].u + 0.48 + 1e-9);
    if (leg.spray_on) {
      const double len = (leg.b - leg.a).norm();
      CHECK(std::abs(leg.duration - len / timing.pass_speed) < 1e-12);
    }
  }
}

TEST_CASE("whole-wall plan accounts areas and spray time exactly") {
  const RobotParams& p = testsupport::params();
  const PlanTiming timing;
  const std::vector<OpeningRect> door{{1.9, 2.3, 0.0, 2.1}};
  const WallPlan plan = plan_wall(0, 4.0, 2.7, door, p.spray, timing);

  CHECK(std::abs(plan.paintable_area - (4.0 * 2.7 - 0.4 * 2.1)) < 1e-9);
  CHECK(std::abs(plan.opening_area - 0.84) < 1e-9);
  CHECK(plan.posts.size() == 5);
  CHECK(plan.planned_spray_time > 0.0);

  // pure application rate: one 0.25 m x 2.45 m pass per 10 s stroke
  const double pure = 0.25 * 2.45 / timing.stroke_duration * 3600.0;
  CHECK(std::abs(pure - 220.5) < 1e-9);
}

TEST_CASE("plan serialization emits well-formed documents") {
  const RobotParams& p = testsupport::params();
  PaintPlan plan;
  plan.timing = PlanTiming{};
  for (int w = 0; w < 4; ++w)
    plan.walls.push_back(plan_wall(w, 4.0, 2.7, {}, p.spray, plan.timing));

  const std::string js = plan_to_json(plan);
  CHECK(js.find("\"walls\"") != std::string::npos);
  const std::string svg = plan_to_svg(plan);
  CHECK(svg.find("<svg") != std::string::npos);
}

}  // TEST_SUITE
