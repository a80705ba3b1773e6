#pragma once

#include <string>
#include <vector>

#include "robopainter/room.hpp"
#include "robopainter/trajectory.hpp"

namespace robopainter {

// 1 cm raster of one wall face. A cell counts as painted when its centre has
// been swept by the spray footprint and does not lie inside an opening.
class CoverageGrid {
 public:
  CoverageGrid(double length, double height, const std::vector<OpeningRect>& openings,
               double cell = 0.01);

  // Mark the rectangle [u0,u1] x [z0,z1] (wall coords) as painted.
  void paint_rect(double u0, double u1, double z0, double z1);

  // Sweep of an axis-aligned spray footprint whose centre moves from a to b:
  // footprint half-extents (hu, hz) about the nozzle point.
  void paint_sweep(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double hu, double hz);

  bool painted(double u, double z) const;
  bool in_opening(double u, double z) const;

  double paintable_area() const;  // wall minus openings
  double painted_area() const;
  double covered_fraction() const;  // painted / paintable

  double length() const { return length_; }
  double height() const { return height_; }
  double cell() const { return cell_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }

 private:
  int index(int cu, int cz) const { return cz * cols_ + cu; }
  double length_, height_, cell_;
  int cols_, rows_;
  std::vector<OpeningRect> openings_;
  std::vector<unsigned char> cells_;  // 0 clear, 1 painted, 2 opening
};

// Rasterise a plan under perfect execution: every spray-on leg sweeps the
// physical footprint (pattern_width wide across travel, pattern_height along).
void rasterize_wall_plan(CoverageGrid& grid, const WallPlan& plan, const SprayParams& spray);

// SVG rendering of walls side by side: openings, strip outlines, painted area.
std::string coverage_to_svg(const std::vector<CoverageGrid>& grids,
                            const std::vector<WallPlan>& plans);

}  // namespace robopainter
