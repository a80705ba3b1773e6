#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robopainter/geometry.hpp"
#include "robopainter/params.hpp"

namespace robopainter {

// Rest-to-rest scalar profile q(t) = q0 + (q1-q0)(10 tau^3 - 15 tau^4 + 6 tau^5),
// tau = t/T. Velocity and acceleration vanish at both ends; C2 inside.
struct QuinticSegment {
  double q0 = 0.0;
  double q1 = 0.0;
  double duration = 1.0;
  // polynomial coefficients of q(tau), constant..5th
  double coeff[6] = {0, 0, 0, 0, 0, 0};

  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;

  // |v|_max = 1.875 |q1-q0| / T, reached at t = T/2
  static constexpr double kPeakVelocityFactor = 1.875;
};

// throws PlanError(BadDuration) if T <= 0
QuinticSegment quintic_segment(double q0, double q1, double T);

struct QuinticSample {
  double position, velocity, acceleration;
};
QuinticSample sample(const QuinticSegment& seg, double t);

// Symmetric trapezoidal speed profile over a signed distance (triangular when
// the distance is too short to reach vmax). Used for base hops.
struct TrapezoidProfile {
  double distance = 0.0;
  double vmax = 0.5;
  double accel = 1.0;

  double duration() const;
  double position(double t) const;
  double velocity(double t) const;
};

enum class StripSection { Core, Outline };

// One planned swath on a wall, in wall coordinates (u along the wall from its
// start corner, z up). Core strips are vertical; the outline strip is the
// single horizontal band above the core region.
struct PaintStrip {
  int wall = 0;
  StripSection section = StripSection::Core;
  double u = 0.0;           // lateral centre (core); wall midpoint (outline)
  double width = 0.25;      // effective painted width
  double z_bottom = 0.0;    // painted band extent
  double z_top = 2.45;
  double roll = 0.0;        // spray-gun roll: 0 core, pi/2 outline
  // spray-on intervals after clipping around openings:
  // core -> z intervals of the nozzle travel; outline -> u intervals
  std::vector<std::pair<double, double>> runs;
};

// A straight tip leg on the wall plane, nozzle path from a to b (wall coords
// (u, z)), quintic-timed over `duration`.
struct TipLeg {
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  double t0 = 0.0;  // start time relative to the enclosing sequence
  double duration = 0.0;
  bool spray_on = false;
  double roll = 0.0;
  int strip_index = -1;  // index into WallPlan::strips, -1 for transits
};

struct BasePost {
  double u = 0.0;          // station along the wall
  double distance = 0.60;  // axle centre to wall
  std::vector<int> strip_indices;
};

struct PostPlan {
  BasePost post;
  std::vector<TipLeg> core_legs;     // boustrophedon strokes + shifts
  std::vector<TipLeg> outline_legs;  // this post's share of the top band
  double core_spray_time = 0.0;      // planned spray-on seconds at this post
  double outline_spray_time = 0.0;
};

struct WallPlan {
  int wall = 0;
  double length = 0.0;
  double height = 0.0;
  double core_top = 2.45;
  std::vector<PaintStrip> strips;  // core strips then the outline strip
  std::vector<PostPlan> posts;
  double paintable_area = 0.0;  // wall minus openings
  double opening_area = 0.0;
  double planned_spray_time = 0.0;
};

// Knobs pinned by the coverage economics; exposed for tests and what-ifs.
struct PlanTiming {
  double stroke_duration = 10.0;  // s per full-height core pass
  double pass_speed = 0.245;      // m/s average tip speed (core and outline)
  double shift_duration = 0.5;    // s per lateral shift between strokes
  double hop_vmax = 0.5;          // base travel caps between posts
  double hop_accel = 1.0;
  double base_standoff = 0.60;    // axle centre to wall while painting
};

// opening rectangle in wall coordinates
struct OpeningRect {
  double u0 = 0, u1 = 0, z0 = 0, z1 = 0;
};

// Divide one wall into 0.25 m strips on a 0.24 m pitch (1 cm overlap), the
// last strip right-aligned; adds the rolled outline band above 2.45 m when
// the wall is taller. Strips whose centreline crosses an opening get their
// runs clipped. Throws PlanError (WallTooNarrow / WallTooTall).
std::vector<PaintStrip> plan_wall_strips(double width, double height,
                                         const std::vector<OpeningRect>& openings);

// Group core strips four at a time onto base posts centred on each group.
// `standoff` is the nozzle-to-wall working distance and must lie in the
// validated window [0.10, 0.25] (PlanError::BadStandoff otherwise); the base
// itself parks `base_distance` from the wall. Throws
// PlanError(StripOutOfRange) if any strip ends up > 0.5 m from its post.
std::vector<BasePost> plan_base_posts(const std::vector<PaintStrip>& strips, double standoff,
                                      double base_distance);

// Boustrophedon nozzle legs (up, shift, down, shift...) for the strips of one
// post; 10 s per full-height pass, spray on only inside strip runs.
std::vector<TipLeg> plan_core_path(const std::vector<PaintStrip>& strips, const BasePost& post,
                                   double core_top, const PlanTiming& timing);

// This post's horizontal share of the outline band: nozzle sweep clipped to
// +-0.48 m of the post station, at the band centre height, roll pi/2.
std::vector<TipLeg> plan_outline_path(const PaintStrip& outline, const BasePost& post,
                                      double u_from, double u_to, double wall_height,
                                      const PlanTiming& timing);

WallPlan plan_wall(int wall, double length, double height,
                   const std::vector<OpeningRect>& openings, const SprayParams& spray,
                   const PlanTiming& timing);

struct PaintPlan {
  std::vector<WallPlan> walls;
  PlanTiming timing;
  double total_paintable_area = 0.0;
  double total_planned_spray_time = 0.0;
  // headline planning figures
  double pure_paint_rate = 0.0;  // strip area / stroke time, m^2/h
};

std::string plan_to_json(const PaintPlan& plan);
std::string plan_to_svg(const PaintPlan& plan);

}  // namespace robopainter
