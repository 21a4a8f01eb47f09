#pragma once

#include <cstdint>
#include <vector>

#include "fraclap/grid.hpp"

namespace fraclap {

// Indicator of the domain on the grid. Shapes must keep a margin of at least
// L/2 to the box boundary so that the periodic truncation stays a controlled
// tail effect.
struct DomainMask {
  GridSpec grid;
  std::vector<std::uint8_t> inside;
  double margin = 0.0;    // distance from the shape to the box boundary
  double inradius = 0.0;  // radius of the largest centered ball in the shape
  bool origin_inside = false;
  std::size_t count = 0;  // number of interior nodes
};

DomainMask make_ball_mask(const GridSpec& g, double radius,
                          const std::vector<double>& center = {});
DomainMask make_cube_mask(const GridSpec& g, double half_width,
                          const std::vector<double>& center = {});
DomainMask make_annulus_mask(const GridSpec& g, double r_inner, double r_outer,
                             const std::vector<double>& center = {});

// Zero the field outside the mask (idempotent).
Field project_support(const Field& u, const DomainMask& mask);
void project_support_in_place(Field& u, const DomainMask& mask);

// |x|^{-2s}, with the origin node carrying the cell average of the weight
// computed by 16-point tensor Gauss-Legendre quadrature.
struct HardyWeight {
  GridSpec grid;
  double s = 0.0;
  std::vector<double> values;
};

HardyWeight hardy_weight(const GridSpec& g, double s);

// sum_x w(x) u(x)^2 h^n
double weighted_norm_sq(const Field& u, const HardyWeight& w);

}  // namespace fraclap
