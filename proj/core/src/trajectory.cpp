#include "robopainter/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "robopainter/error.hpp"

namespace robopainter {

namespace {
constexpr double kEps = 1e-9;
constexpr double kStripWidth = 0.25;
constexpr double kStripPitch = 0.24;
constexpr double kCoreTopMax = 2.45;
constexpr double kWallHeightMax = 2.70;
constexpr double kOutlineReach = 0.48;  // nozzle lateral travel per post
constexpr double kPi = 3.14159265358979323846;
}  // namespace

// ----------------------------------------------------------------- quintic

QuinticSegment quintic_segment(double q0, double q1, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw PlanError(PlanError::Kind::BadDuration,
                    "segment duration must be positive, got " + std::to_string(T));
  }
  QuinticSegment s;
  s.q0 = q0;
  s.q1 = q1;
  s.duration = T;
  const double d = q1 - q0;
  s.coeff[0] = q0;
  s.coeff[1] = 0.0;
  s.coeff[2] = 0.0;
  s.coeff[3] = 10.0 * d;
  s.coeff[4] = -15.0 * d;
  s.coeff[5] = 6.0 * d;
  return s;
}

double QuinticSegment::position(double t) const {
  const double tau = std::clamp(t / duration, 0.0, 1.0);
  double acc = 0.0;
  for (int i = 5; i >= 0; --i) acc = acc * tau + coeff[i];
  return acc;
}

double QuinticSegment::velocity(double t) const {
  if (t < 0.0 || t > duration) return 0.0;
  const double tau = t / duration;
  double acc = 0.0;
  for (int i = 5; i >= 1; --i) acc = acc * tau + i * coeff[i];
  return acc / duration;
}

double QuinticSegment::acceleration(double t) const {
  if (t < 0.0 || t > duration) return 0.0;
  const double tau = t / duration;
  double acc = 0.0;
  for (int i = 5; i >= 2; --i) acc = acc * tau + i * (i - 1) * coeff[i];
  return acc / (duration * duration);
}

QuinticSample sample(const QuinticSegment& seg, double t) {
  return {seg.position(t), seg.velocity(t), seg.acceleration(t)};
}

// --------------------------------------------------------------- trapezoid

double TrapezoidProfile::duration() const {
  const double d = std::abs(distance);
  if (d < kEps) return 0.0;
  const double d_ramp = vmax * vmax / accel;  // accelerate + decelerate
  if (d >= d_ramp) {
    return 2.0 * vmax / accel + (d - d_ramp) / vmax;
  }
  return 2.0 * std::sqrt(d / accel);  // triangular
}

double TrapezoidProfile::position(double t) const {
  const double d = std::abs(distance);
  const double sgn = distance < 0 ? -1.0 : 1.0;
  if (d < kEps || t <= 0.0) return 0.0;
  const double d_ramp = vmax * vmax / accel;
  double t_acc, v_pk;
  if (d >= d_ramp) {
    t_acc = vmax / accel;
    v_pk = vmax;
  } else {
    t_acc = std::sqrt(d / accel);
    v_pk = accel * t_acc;
  }
  const double T = duration();
  if (t >= T) return distance;
  double p;
  if (t < t_acc) {
    p = 0.5 * accel * t * t;
  } else if (t < T - t_acc) {
    p = 0.5 * v_pk * t_acc + v_pk * (t - t_acc);
  } else {
    const double tr = T - t;
    p = d - 0.5 * accel * tr * tr;
  }
  return sgn * p;
}

double TrapezoidProfile::velocity(double t) const {
  const double d = std::abs(distance);
  const double sgn = distance < 0 ? -1.0 : 1.0;
  if (d < kEps || t <= 0.0) return 0.0;
  const double d_ramp = vmax * vmax / accel;
  double t_acc, v_pk;
  if (d >= d_ramp) {
    t_acc = vmax / accel;
    v_pk = vmax;
  } else {
    t_acc = std::sqrt(d / accel);
    v_pk = accel * t_acc;
  }
  const double T = duration();
  if (t >= T) return 0.0;
  double v;
  if (t < t_acc) {
    v = accel * t;
  } else if (t < T - t_acc) {
    v = v_pk;
  } else {
    v = accel * (T - t);
  }
  return sgn * v;
}

// ------------------------------------------------------------------ strips

namespace {

// subtract a closed interval from a sorted disjoint run list
void subtract_interval(std::vector<std::pair<double, double>>& runs, double lo, double hi) {
  std::vector<std::pair<double, double>> out;
  for (const auto& [a, b] : runs) {
    if (hi <= a + kEps || lo >= b - kEps) {
      out.emplace_back(a, b);
      continue;
    }
    if (lo > a + kEps) out.emplace_back(a, std::min(lo, b));
    if (hi < b - kEps) out.emplace_back(std::max(hi, a), b);
  }
  // drop slivers
  runs.clear();
  for (const auto& r : out) {
    if (r.second - r.first > 1e-3) runs.push_back(r);
  }
}

}  // namespace

std::vector<PaintStrip> plan_wall_strips(double width, double height,
                                         const std::vector<OpeningRect>& openings) {
  if (width < kStripWidth - kEps) {
    throw PlanError(PlanError::Kind::WallTooNarrow,
                    "wall " + std::to_string(width) + " m is narrower than one strip (0.25 m)");
  }
  if (height > kWallHeightMax + kEps || height <= 0.0) {
    throw PlanError(PlanError::Kind::WallTooTall,
                    "wall height " + std::to_string(height) + " m outside (0, 2.70] m");
  }
  const double core_top = std::min(height, kCoreTopMax);

  int n = 1;
  if (width > kStripWidth + kEps) {
    n = 1 + static_cast<int>(std::ceil((width - kStripWidth) / kStripPitch - kEps));
  }

  std::vector<PaintStrip> strips;
  strips.reserve(n + 1);
  for (int j = 0; j < n; ++j) {
    PaintStrip s;
    s.section = StripSection::Core;
    s.u = (j == n - 1) ? width - kStripWidth / 2 : kStripWidth / 2 + j * kStripPitch;
    s.width = kStripWidth;
    s.z_bottom = 0.0;
    s.z_top = core_top;
    s.roll = 0.0;
    s.runs = {{0.0, core_top}};
    for (const auto& o : openings) {
      if (s.u >= o.u0 - kEps && s.u <= o.u1 + kEps) {
        subtract_interval(s.runs, o.z0, o.z1);
      }
    }
    strips.push_back(std::move(s));
  }

  // Cut-in seams. A strip whose centre falls inside an opening's span is
  // clipped across its whole width, so the wall flank just beyond the
  // opening edge stays dry wherever the nearest full-height fan falls
  // short. Add a dedicated column tight against each such edge (its fan
  // grazes the opening by at most the usual inter-strip overlap).
  const double fan_half = kStripWidth - kStripPitch / 2;
  std::vector<double> seams;
  for (const auto& o : openings) {
    double left_fan = -1.0, right_fan = width + 1.0;
    for (const auto& s : strips) {
      if (s.u < o.u0 - kEps) left_fan = std::max(left_fan, s.u + fan_half);
      if (s.u > o.u1 + kEps) right_fan = std::min(right_fan, s.u - fan_half);
    }
    if (o.u0 > kEps && left_fan < o.u0 - 0.004) seams.push_back(o.u0 - kStripWidth / 2);
    if (o.u1 < width - kEps && right_fan > o.u1 + 0.004) seams.push_back(o.u1 + kStripWidth / 2);
  }
  for (double u : seams) {
    u = std::clamp(u, kStripWidth / 2, width - kStripWidth / 2);
    bool redundant = false;
    for (const auto& s : strips) redundant = redundant || std::abs(s.u - u) < 0.02;
    if (redundant) continue;
    PaintStrip s;
    s.section = StripSection::Core;
    s.u = u;
    s.width = kStripWidth;
    s.z_bottom = 0.0;
    s.z_top = core_top;
    s.roll = 0.0;
    s.runs = {{0.0, core_top}};
    for (const auto& o : openings) {
      if (s.u >= o.u0 - kEps && s.u <= o.u1 + kEps) {
        subtract_interval(s.runs, o.z0, o.z1);
      }
    }
    if (!s.runs.empty()) strips.push_back(std::move(s));
  }
  std::sort(strips.begin(), strips.end(),
            [](const PaintStrip& a, const PaintStrip& b) { return a.u < b.u; });

  if (height > core_top + kEps) {
    PaintStrip band;
    band.section = StripSection::Outline;
    band.u = width / 2;
    band.width = height - core_top;
    band.z_bottom = core_top;
    band.z_top = height;
    band.roll = kPi / 2;
    band.runs = {{0.0, width}};
    for (const auto& o : openings) {
      if (o.z1 > core_top + kEps) {  // opening intrudes into the band
        subtract_interval(band.runs, o.u0, o.u1);
      }
    }
    strips.push_back(std::move(band));
  }
  return strips;
}

std::vector<BasePost> plan_base_posts(const std::vector<PaintStrip>& strips, double standoff,
                                      double base_distance) {
  if (standoff < 0.10 - kEps || standoff > 0.25 + kEps) {
    throw PlanError(PlanError::Kind::BadStandoff,
                    "spray standoff " + std::to_string(standoff) + " m outside [0.10, 0.25] m");
  }
  std::vector<int> core;
  for (std::size_t i = 0; i < strips.size(); ++i) {
    if (strips[i].section == StripSection::Core) core.push_back(static_cast<int>(i));
  }
  std::vector<BasePost> posts;
  for (std::size_t g = 0; g < core.size(); g += 4) {
    const std::size_t end = std::min(g + 4, core.size());
    BasePost p;
    p.distance = base_distance;
    double sum = 0.0;
    for (std::size_t k = g; k < end; ++k) {
      p.strip_indices.push_back(core[k]);
      sum += strips[core[k]].u;
    }
    p.u = sum / static_cast<double>(end - g);
    for (int idx : p.strip_indices) {
      if (std::abs(strips[idx].u - p.u) > 0.5 + kEps) {
        throw PlanError(PlanError::Kind::StripOutOfRange,
                        "strip at u=" + std::to_string(strips[idx].u) + " is " +
                            std::to_string(std::abs(strips[idx].u - p.u)) +
                            " m from its post (limit 0.5 m)");
      }
    }
    posts.push_back(std::move(p));
  }
  return posts;
}

namespace {

// split a monotone travel [z_from, z_to] at run boundaries; spray on inside runs
std::vector<TipLeg> split_travel(double fixed_u, double z_from, double z_to,
                                 const std::vector<std::pair<double, double>>& runs, double speed,
                                 double roll, int strip_index, bool vertical) {
  std::vector<double> cuts;
  const double lo = std::min(z_from, z_to), hi = std::max(z_from, z_to);
  cuts.push_back(lo);
  for (const auto& [a, b] : runs) {
    if (a > lo + kEps && a < hi - kEps) cuts.push_back(a);
    if (b > lo + kEps && b < hi - kEps) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  const bool ascending = z_to > z_from;
  if (!ascending) std::reverse(cuts.begin(), cuts.end());

  std::vector<TipLeg> legs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (std::abs(b - a) < kEps) continue;
    const double mid = 0.5 * (a + b);
    bool on = false;
    for (const auto& r : runs) {
      if (mid > r.first - kEps && mid < r.second + kEps) {
        on = true;
        break;
      }
    }
    TipLeg leg;
    leg.a = vertical ? Eigen::Vector2d(fixed_u, a) : Eigen::Vector2d(a, fixed_u);
    leg.b = vertical ? Eigen::Vector2d(fixed_u, b) : Eigen::Vector2d(b, fixed_u);
    leg.duration = std::abs(b - a) / speed;
    leg.spray_on = on;
    leg.roll = roll;
    leg.strip_index = strip_index;
    legs.push_back(leg);
  }
  return legs;
}

void assign_times(std::vector<TipLeg>& legs, double t0 = 0.0) {
  double t = t0;
  for (auto& leg : legs) {
    leg.t0 = t;
    t += leg.duration;
  }
}

}  // namespace

std::vector<TipLeg> plan_core_path(const std::vector<PaintStrip>& strips, const BasePost& post,
                                   double core_top, const PlanTiming& timing) {
  std::vector<TipLeg> legs;
  bool up = true;  // boustrophedon: up, shift, down, shift...
  for (std::size_t k = 0; k < post.strip_indices.size(); ++k) {
    const int idx = post.strip_indices[k];
    const PaintStrip& s = strips[idx];
    const double z_from = up ? 0.0 : core_top;
    const double z_to = up ? core_top : 0.0;
    auto pass = split_travel(s.u, z_from, z_to, s.runs, timing.pass_speed, s.roll, idx, true);
    legs.insert(legs.end(), pass.begin(), pass.end());
    if (k + 1 < post.strip_indices.size()) {
      const PaintStrip& nxt = strips[post.strip_indices[k + 1]];
      TipLeg shift;
      shift.a = Eigen::Vector2d(s.u, z_to);
      shift.b = Eigen::Vector2d(nxt.u, z_to);
      shift.duration = timing.shift_duration;
      shift.spray_on = false;
      shift.roll = 0.0;
      shift.strip_index = -1;
      legs.push_back(shift);
    }
    up = !up;
  }
  assign_times(legs);
  return legs;
}

std::vector<TipLeg> plan_outline_path(const PaintStrip& outline, const BasePost& post,
                                      double u_from, double u_to, double wall_height,
                                      const PlanTiming& timing) {
  (void)post;
  const double z_c = 0.5 * (outline.z_bottom + wall_height);
  auto legs =
      split_travel(z_c, u_from, u_to, outline.runs, timing.pass_speed, outline.roll, -1, false);
  for (auto& leg : legs) leg.strip_index = -2;  // outline marker
  assign_times(legs);
  return legs;
}

WallPlan plan_wall(int wall, double length, double height,
                   const std::vector<OpeningRect>& openings, const SprayParams& spray,
                   const PlanTiming& timing) {
  WallPlan plan;
  plan.wall = wall;
  plan.length = length;
  plan.height = height;
  plan.core_top = std::min(height, kCoreTopMax);
  plan.strips = plan_wall_strips(length, height, openings);
  for (auto& s : plan.strips) s.wall = wall;

  auto posts = plan_base_posts(plan.strips, spray.standoff, timing.base_standoff);

  int outline_idx = -1;
  for (std::size_t i = 0; i < plan.strips.size(); ++i) {
    if (plan.strips[i].section == StripSection::Outline) outline_idx = static_cast<int>(i);
  }

  double boundary = 0.0;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    PostPlan pp;
    pp.post = posts[i];
    pp.core_legs = plan_core_path(plan.strips, posts[i], plan.core_top, timing);
    for (const auto& leg : pp.core_legs) {
      if (leg.spray_on) pp.core_spray_time += leg.duration;
    }
    if (outline_idx >= 0) {
      const double lo = boundary;
      double hi = (i + 1 == posts.size()) ? length
                                          : std::min(posts[i].u + kOutlineReach, length);
      hi = std::max(hi, lo);
      if (std::abs(lo - posts[i].u) > 0.5 + kEps || std::abs(hi - posts[i].u) > 0.5 + kEps) {
        throw PlanError(PlanError::Kind::StripOutOfRange,
                        "outline segment [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] exceeds 0.5 m lateral reach of post u=" + std::to_string(posts[i].u));
      }
      pp.outline_legs =
          plan_outline_path(plan.strips[outline_idx], posts[i], lo, hi, height, timing);
      for (const auto& leg : pp.outline_legs) {
        if (leg.spray_on) pp.outline_spray_time += leg.duration;
      }
      boundary = hi;
    }
    plan.planned_spray_time += pp.core_spray_time + pp.outline_spray_time;
    plan.posts.push_back(std::move(pp));
  }

  double open_area = 0.0;
  for (const auto& o : openings) {
    const double w = std::max(0.0, std::min(o.u1, length) - std::max(o.u0, 0.0));
    const double h = std::max(0.0, std::min(o.z1, height) - std::max(o.z0, 0.0));
    open_area += w * h;
  }
  plan.opening_area = open_area;
  plan.paintable_area = length * height - open_area;
  return plan;
}

std::string plan_to_json(const PaintPlan& plan) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["pure_paint_rate_m2h"] = plan.pure_paint_rate;
  j["total_paintable_area_m2"] = plan.total_paintable_area;
  j["planned_spray_time_s"] = plan.total_planned_spray_time;
  j["timing"] = {{"stroke_duration_s", plan.timing.stroke_duration},
                 {"pass_speed_ms", plan.timing.pass_speed},
                 {"shift_duration_s", plan.timing.shift_duration},
                 {"hop_vmax_ms", plan.timing.hop_vmax},
                 {"hop_accel_ms2", plan.timing.hop_accel},
                 {"base_standoff_m", plan.timing.base_standoff}};
  j["walls"] = nlohmann::json::array();
  for (const auto& w : plan.walls) {
    nlohmann::json jw;
    jw["wall"] = w.wall;
    jw["length_m"] = w.length;
    jw["height_m"] = w.height;
    jw["core_top_m"] = w.core_top;
    jw["paintable_area_m2"] = w.paintable_area;
    jw["opening_area_m2"] = w.opening_area;
    jw["planned_spray_time_s"] = w.planned_spray_time;
    jw["strips"] = nlohmann::json::array();
    for (const auto& s : w.strips) {
      nlohmann::json js;
      js["section"] = s.section == StripSection::Core ? "core" : "outline";
      js["u_m"] = s.u;
      js["width_m"] = s.width;
      js["z_bottom_m"] = s.z_bottom;
      js["z_top_m"] = s.z_top;
      js["roll_rad"] = s.roll;
      js["runs"] = s.runs;
      jw["strips"].push_back(js);
    }
    jw["posts"] = nlohmann::json::array();
    for (const auto& p : w.posts) {
      nlohmann::json jp;
      jp["u_m"] = p.post.u;
      jp["distance_m"] = p.post.distance;
      jp["strips"] = p.post.strip_indices;
      jp["core_spray_time_s"] = p.core_spray_time;
      jp["outline_spray_time_s"] = p.outline_spray_time;
      jw["posts"].push_back(jp);
    }
    j["walls"].push_back(jw);
  }
  return j.dump(2);
}

std::string plan_to_svg(const PaintPlan& plan) {
  // walls rendered side by side, 100 px per metre, origin bottom-left per wall
  const double s = 100.0;
  double x_off = 20.0;
  double max_h = 0.0;
  for (const auto& w : plan.walls) max_h = std::max(max_h, w.height);
  const double top = 20.0, base_y = top + max_h * s;
  std::ostringstream svg;
  double total_w = 20.0;
  for (const auto& w : plan.walls) total_w += w.length * s + 40.0;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << total_w << "' height='"
      << base_y + 60.0 << "'>\n";
  for (const auto& w : plan.walls) {
    auto X = [&](double u) { return x_off + u * s; };
    auto Y = [&](double z) { return base_y - z * s; };
    svg << "<rect x='" << X(0) << "' y='" << Y(w.height) << "' width='" << w.length * s
        << "' height='" << w.height * s << "' fill='#f8f8f4' stroke='#333'/>\n";
    for (const auto& strip : w.strips) {
      if (strip.section == StripSection::Core) {
        for (const auto& [z0, z1] : strip.runs) {
          svg << "<rect x='" << X(strip.u - strip.width / 2) << "' y='" << Y(z1) << "' width='"
              << strip.width * s << "' height='" << (z1 - z0) * s
              << "' fill='#8ecae6' fill-opacity='0.5' stroke='#126782' stroke-width='0.5'/>\n";
        }
      } else {
        for (const auto& [u0, u1] : strip.runs) {
          svg << "<rect x='" << X(u0) << "' y='" << Y(strip.z_top) << "' width='" << (u1 - u0) * s
              << "' height='" << (strip.z_top - strip.z_bottom) * s
              << "' fill='#ffb703' fill-opacity='0.5' stroke='#b06f00' stroke-width='0.5'/>\n";
        }
      }
    }
    for (const auto& p : w.posts) {
      svg << "<circle cx='" << X(p.post.u) << "' cy='" << base_y + 18 << "' r='5' fill='#d62828'/>\n";
    }
    svg << "<text x='" << X(0) << "' y='" << base_y + 45 << "' font-family='sans-serif' "
        << "font-size='14'>wall " << w.wall << " (" << w.length << " m x " << w.height
        << " m)</text>\n";
    x_off += w.length * s + 40.0;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace robopainter
