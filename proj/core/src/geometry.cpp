#include "fraclap/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fraclap {

namespace {

std::vector<double> resolve_center(const GridSpec& g, const std::vector<double>& center) {
  if (center.empty()) return std::vector<double>(g.n, 0.0);
  if (static_cast<int>(center.size()) != g.n)
    throw std::invalid_argument("mask center dimension mismatch");
  return center;
}

// The shape must stay inside [-L/2, L/2]^n so the distance to the box
// boundary (the periodization margin) is at least L/2.
void check_margin(const GridSpec& g, double margin) {
  if (margin < g.L / 2.0 - 1e-12)
    throw std::invalid_argument(
        "mask violates the margin rule: shape must keep distance >= L/2 to "
        "the box boundary (margin = " + std::to_string(margin) + ")");
}

template <typename Pred>
DomainMask build_mask(const GridSpec& g, Pred&& inside_pred, double margin,
                      double inradius, const std::vector<double>& c) {
  check_margin(g, margin);
  DomainMask mask;
  mask.grid = g;
  mask.margin = margin;
  mask.inradius = inradius;
  mask.inside.assign(g.size(), 0);
  int idx[4];
  double x[4];
  for (std::size_t f = 0; f < mask.inside.size(); ++f) {
    unravel(g, f, idx);
    for (int d = 0; d < g.n; ++d) x[d] = g.x(idx[d]) - c[d];
    if (inside_pred(x)) {
      mask.inside[f] = 1;
      ++mask.count;
    }
  }
  if (mask.count == 0)
    throw std::invalid_argument("mask has no interior node on this grid");
  std::size_t origin = 0;
  for (int d = 0; d < g.n; ++d) origin = origin * g.N + g.origin_index();
  mask.origin_inside = mask.inside[origin] != 0;
  return mask;
}

double norm2(const double* x, int n) {
  double r2 = 0.0;
  for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
  return std::sqrt(r2);
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_q.
void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(q);
  weights.resize(q);
  for (int i = 0; i < q; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= q; ++j) {
        double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = q * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int j = 2; j <= q; ++j) {
      double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    double dp = q * (t * p1 - p0) / (t * t - 1.0);
    nodes[i] = t;
    weights[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

}  // namespace

DomainMask make_ball_mask(const GridSpec& g, double radius,
                          const std::vector<double>& center) {
  if (!(radius > 0)) throw std::invalid_argument("ball radius must be > 0");
  auto c = resolve_center(g, center);
  double extent = 0.0;
  for (int d = 0; d < g.n; ++d) extent = std::max(extent, std::abs(c[d]) + radius);
  return build_mask(
      g, [&](const double* x) { return norm2(x, g.n) <= radius; },
      g.L - extent, radius, c);
}

DomainMask make_cube_mask(const GridSpec& g, double half_width,
                          const std::vector<double>& center) {
  if (!(half_width > 0)) throw std::invalid_argument("cube half-width must be > 0");
  auto c = resolve_center(g, center);
  double extent = 0.0;
  for (int d = 0; d < g.n; ++d) extent = std::max(extent, std::abs(c[d]) + half_width);
  return build_mask(
      g,
      [&](const double* x) {
        for (int d = 0; d < g.n; ++d)
          if (std::abs(x[d]) > half_width) return false;
        return true;
      },
      g.L - extent, half_width, c);
}

DomainMask make_annulus_mask(const GridSpec& g, double r_inner, double r_outer,
                             const std::vector<double>& center) {
  if (!(0 < r_inner && r_inner < r_outer))
    throw std::invalid_argument("annulus requires 0 < r_inner < r_outer");
  auto c = resolve_center(g, center);
  double extent = 0.0;
  for (int d = 0; d < g.n; ++d) extent = std::max(extent, std::abs(c[d]) + r_outer);
  return build_mask(
      g,
      [&](const double* x) {
        double r = norm2(x, g.n);
        return r >= r_inner && r <= r_outer;
      },
      g.L - extent, (r_outer - r_inner) / 2.0, c);
}

Field project_support(const Field& u, const DomainMask& mask) {
  Field out = u;
  project_support_in_place(out, mask);
  return out;
}

void project_support_in_place(Field& u, const DomainMask& mask) {
  if (!(u.grid == mask.grid))
    throw std::invalid_argument("project_support: field/mask grid mismatch");
  for (std::size_t i = 0; i < u.values.size(); ++i)
    if (!mask.inside[i]) u.values[i] = 0.0;
}

HardyWeight hardy_weight(const GridSpec& g, double s) {
  if (s < 0.0) throw std::invalid_argument("hardy_weight: s must be >= 0");
  if (2.0 * s >= g.n)
    throw std::invalid_argument("hardy_weight: requires 2s < n for integrability");
  HardyWeight w;
  w.grid = g;
  w.s = s;
  if (s == 0.0) {
    w.values.assign(g.size(), 1.0);
    return w;
  }
  auto r = radius_table(g);
  w.values.resize(g.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    w.values[i] = r[i] > 0.0 ? std::pow(r[i], -2.0 * s) : 0.0;

  // Origin cell [-h/2, h/2]^n: replace the singular point value by the cell
  // average of |x|^{-2s}. Writing the integral in polar form and pushing the
  // radial part through exactly leaves a smooth integral over the cube faces,
  //   int_cell |x|^{-2s} dx = 2n/(n-2s) * (h/2) * int_face (h^2/4+|y|^2)^{-s} dy,
  // which tensor Gauss-Legendre with 16 points per axis resolves to near
  // machine precision (nodes never at 0).
  constexpr int q = 16;
  std::vector<double> nodes, weights;
  gauss_legendre(q, nodes, weights);
  double half = g.h() / 2.0;
  double face = 0.0;
  if (g.n == 1) {
    face = std::pow(half * half, -s);
  } else {
    int idx[4] = {0, 0, 0, 0};
    std::size_t total = 1;
    for (int d = 0; d < g.n - 1; ++d) total *= q;
    for (std::size_t f = 0; f < total; ++f) {
      double r2 = half * half, wt = 1.0;
      for (int d = 0; d < g.n - 1; ++d) {
        double yd = nodes[idx[d]] * half;
        r2 += yd * yd;
        wt *= weights[idx[d]] * half;
      }
      face += wt * std::pow(r2, -s);
      for (int d = g.n - 2; d >= 0; --d) {
        if (++idx[d] < q) break;
        idx[d] = 0;
      }
    }
  }
  double acc = 2.0 * g.n / (g.n - 2.0 * s) * half * face;
  double hn = std::pow(g.h(), g.n);
  std::size_t origin = 0;
  for (int d = 0; d < g.n; ++d) origin = origin * g.N + g.origin_index();
  w.values[origin] = acc / hn;
  return w;
}

double weighted_norm_sq(const Field& u, const HardyWeight& w) {
  if (!(u.grid == w.grid))
    throw std::invalid_argument("weighted_norm_sq: field/weight grid mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i)
    acc += w.values[i] * u.values[i] * u.values[i];
  return acc * std::pow(u.grid.h(), u.grid.n);
}

}  // namespace fraclap
