#include "robopainter/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace robopainter {

CoverageGrid::CoverageGrid(double length, double height, const std::vector<OpeningRect>& openings,
                           double cell)
    : length_(length), height_(height), cell_(cell), openings_(openings) {
  cols_ = std::max(1, static_cast<int>(std::lround(length / cell)));
  rows_ = std::max(1, static_cast<int>(std::lround(height / cell)));
  cells_.assign(static_cast<std::size_t>(cols_) * rows_, 0);
  for (int cz = 0; cz < rows_; ++cz) {
    const double z = (cz + 0.5) * cell_;
    for (int cu = 0; cu < cols_; ++cu) {
      const double u = (cu + 0.5) * cell_;
      for (const auto& o : openings_) {
        if (u > o.u0 && u < o.u1 && z > o.z0 && z < o.z1) {
          cells_[index(cu, cz)] = 2;
          break;
        }
      }
    }
  }
}

void CoverageGrid::paint_rect(double u0, double u1, double z0, double z1) {
  if (u1 < u0) std::swap(u0, u1);
  if (z1 < z0) std::swap(z0, z1);
  const int cu0 = std::max(0, static_cast<int>(std::floor(u0 / cell_)));
  const int cu1 = std::min(cols_ - 1, static_cast<int>(std::floor(u1 / cell_)));
  const int cz0 = std::max(0, static_cast<int>(std::floor(z0 / cell_)));
  const int cz1 = std::min(rows_ - 1, static_cast<int>(std::floor(z1 / cell_)));
  for (int cz = cz0; cz <= cz1; ++cz) {
    const double z = (cz + 0.5) * cell_;
    if (z < z0 || z > z1) continue;
    for (int cu = cu0; cu <= cu1; ++cu) {
      const double u = (cu + 0.5) * cell_;
      if (u < u0 || u > u1) continue;
      auto& c = cells_[index(cu, cz)];
      if (c == 0) c = 1;
    }
  }
}

void CoverageGrid::paint_sweep(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double hu,
                               double hz) {
  // the footprint stays axis-aligned; legs are axis-aligned too, so the swept
  // region is the bounding box of the two footprint rectangles
  const double u0 = std::min(a.x(), b.x()) - hu;
  const double u1 = std::max(a.x(), b.x()) + hu;
  const double z0 = std::min(a.y(), b.y()) - hz;
  const double z1 = std::max(a.y(), b.y()) + hz;
  paint_rect(u0, u1, z0, z1);
}

bool CoverageGrid::painted(double u, double z) const {
  const int cu = static_cast<int>(std::floor(u / cell_));
  const int cz = static_cast<int>(std::floor(z / cell_));
  if (cu < 0 || cu >= cols_ || cz < 0 || cz >= rows_) return false;
  return cells_[index(cu, cz)] == 1;
}

bool CoverageGrid::in_opening(double u, double z) const {
  for (const auto& o : openings_) {
    if (u > o.u0 && u < o.u1 && z > o.z0 && z < o.z1) return true;
  }
  return false;
}

double CoverageGrid::paintable_area() const {
  std::size_t n = 0;
  for (auto c : cells_) {
    if (c != 2) ++n;
  }
  return static_cast<double>(n) * cell_ * cell_;
}

double CoverageGrid::painted_area() const {
  std::size_t n = 0;
  for (auto c : cells_) {
    if (c == 1) ++n;
  }
  return static_cast<double>(n) * cell_ * cell_;
}

double CoverageGrid::covered_fraction() const {
  const double pa = paintable_area();
  return pa > 0.0 ? painted_area() / pa : 1.0;
}

void rasterize_wall_plan(CoverageGrid& grid, const WallPlan& plan, const SprayParams& spray) {
  // footprint half-extents: pattern_width across the travel direction,
  // pattern_height along it
  const double hw = spray.pattern_width / 2;
  const double hh = spray.pattern_height / 2;
  for (const auto& post : plan.posts) {
    for (const auto& leg : post.core_legs) {
      if (leg.spray_on) grid.paint_sweep(leg.a, leg.b, hw, hh);
    }
    for (const auto& leg : post.outline_legs) {
      if (leg.spray_on) grid.paint_sweep(leg.a, leg.b, hh, hw);  // rolled 90 degrees
    }
  }
}

std::string coverage_to_svg(const std::vector<CoverageGrid>& grids,
                            const std::vector<WallPlan>& plans) {
  const double s = 100.0;  // px per metre
  double max_h = 0.0, total_w = 20.0;
  for (const auto& g : grids) {
    max_h = std::max(max_h, g.height());
    total_w += g.length() * s + 40.0;
  }
  const double top = 20.0, base_y = top + max_h * s;
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << total_w << "' height='"
      << base_y + 60.0 << "'>\n";
  double x_off = 20.0;
  for (std::size_t k = 0; k < grids.size(); ++k) {
    const auto& g = grids[k];
    auto X = [&](double u) { return x_off + u * s; };
    auto Y = [&](double z) { return base_y - z * s; };
    svg << "<rect x='" << X(0) << "' y='" << Y(g.height()) << "' width='" << g.length() * s
        << "' height='" << g.height() * s << "' fill='#e8e4da' stroke='#333'/>\n";
    // painted cells, merged row-wise into horizontal spans to keep the SVG small
    for (int cz = 0; cz < g.rows(); ++cz) {
      int cu = 0;
      while (cu < g.cols()) {
        const double u = (cu + 0.5) * g.cell();
        const double z = (cz + 0.5) * g.cell();
        if (g.painted(u, z)) {
          int end = cu;
          while (end + 1 < g.cols() && g.painted((end + 1.5) * g.cell(), z)) ++end;
          svg << "<rect x='" << X(cu * g.cell()) << "' y='" << Y((cz + 1) * g.cell())
              << "' width='" << (end - cu + 1) * g.cell() * s << "' height='" << g.cell() * s
              << "' fill='#2a9d8f'/>\n";
          cu = end + 1;
        } else {
          ++cu;
        }
      }
    }
    const int wall_id = k < plans.size() ? plans[k].wall : static_cast<int>(k);
    svg << "<text x='" << X(0) << "' y='" << base_y + 40
        << "' font-family='sans-serif' font-size='14'>wall " << wall_id << " covered "
        << g.covered_fraction() * 100.0 << "%</text>\n";
    x_off += g.length() * s + 40.0;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace robopainter
