#include "fraclap/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclap {

namespace {

// Walk the frequency lattice in flat order, calling f(flat, |k|^2).
template <typename F>
void for_each_k2(const GridSpec& g, F&& f) {
  double axis[4096];
  std::vector<double> big;
  const double* ax;
  if (g.N <= 4096) {
    for (int i = 0; i < g.N; ++i) axis[i] = g.k(i) * g.k(i);
    ax = axis;
  } else {
    big.resize(g.N);
    for (int i = 0; i < g.N; ++i) big[i] = g.k(i) * g.k(i);
    ax = big.data();
  }
  int idx[4] = {0, 0, 0, 0};
  std::size_t total = g.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    double k2 = 0.0;
    for (int d = 0; d < g.n; ++d) k2 += ax[idx[d]];
    f(flat, k2);
    for (int d = g.n - 1; d >= 0; --d) {
      if (++idx[d] < g.N) break;
      idx[d] = 0;
    }
  }
}

double multiplier_value(double k2, double a) {
  if (a == 0.0) return 1.0;
  if (k2 == 0.0) return 0.0;  // limit of |k|^{2a} for a > 0
  if (a == 1.0) return k2;
  return std::pow(k2, a);
}

}  // namespace

std::vector<double> fraclap_multiplier(const GridSpec& g, double a) {
  if (a < 0.0) throw std::invalid_argument("fraclap_multiplier: order a must be >= 0");
  std::vector<double> mult(g.size());
  for_each_k2(g, [&](std::size_t f, double k2) { mult[f] = multiplier_value(k2, a); });
  return mult;
}

Field apply_multiplier(const Field& u, const std::vector<double>& mult) {
  if (mult.size() != u.values.size())
    throw std::invalid_argument("apply_multiplier: multiplier/grid size mismatch");
  std::vector<std::complex<double>> buf(u.values.begin(), u.values.end());
  dft_forward(u.grid, buf);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= mult[i];
  dft_backward(u.grid, buf);
  Field out{u.grid, std::vector<double>(buf.size())};
  for (std::size_t i = 0; i < buf.size(); ++i) out.values[i] = buf[i].real();
  return out;
}

Field apply_fraclap(const Field& u, double a) {
  if (a < 0.0) throw std::invalid_argument("apply_fraclap: order a must be >= 0");
  if (a == 0.0) return u;
  std::vector<std::complex<double>> buf(u.values.begin(), u.values.end());
  dft_forward(u.grid, buf);
  for_each_k2(u.grid, [&](std::size_t f, double k2) { buf[f] *= multiplier_value(k2, a); });
  dft_backward(u.grid, buf);
  Field out{u.grid, std::vector<double>(buf.size())};
  for (std::size_t i = 0; i < buf.size(); ++i) out.values[i] = buf[i].real();
  return out;
}

double seminorm_sq(const Field& u, double a) {
  if (a < 0.0) throw std::invalid_argument("seminorm_sq: order a must be >= 0");
  std::vector<std::complex<double>> buf(u.values.begin(), u.values.end());
  dft_forward(u.grid, buf);
  double scale2 = std::pow(u.grid.h() / u.grid.N, u.grid.n);
  double acc = 0.0;
  for_each_k2(u.grid, [&](std::size_t f, double k2) {
    acc += multiplier_value(k2, a) * std::norm(buf[f]);
  });
  return acc * scale2;
}

double quad_form(const Field& u, const std::vector<double>& mult) {
  if (mult.size() != u.values.size())
    throw std::invalid_argument("quad_form: multiplier/grid size mismatch");
  std::vector<std::complex<double>> buf(u.values.begin(), u.values.end());
  dft_forward(u.grid, buf);
  double scale2 = std::pow(u.grid.h() / u.grid.N, u.grid.n);
  double acc = 0.0;
  for (std::size_t i = 0; i < buf.size(); ++i) acc += mult[i] * std::norm(buf[i]);
  return acc * scale2;
}

double lp_norm(const Field& u, double p) {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  double hn = std::pow(u.grid.h(), u.grid.n);
  double acc = 0.0;
  if (p == 2.0) {
    for (double v : u.values) acc += v * v;
  } else {
    for (double v : u.values) acc += std::pow(std::abs(v), p);
  }
  return std::pow(acc * hn, 1.0 / p);
}

Field dilate(const Field& u, int R) {
  const GridSpec& g = u.grid;
  if (R < 2 || g.N % R != 0)
    throw std::invalid_argument("dilate: R must be an integer >= 2 dividing N");
  Field out = make_field(g);
  // Node i sits at x = -L + i h; R x lands on node j = N(1-R)/2 + R i.
  long shift = static_cast<long>(g.N) * (1 - R) / 2;
  int idx[4];
  for (std::size_t f = 0; f < out.values.size(); ++f) {
    unravel(g, f, idx);
    std::size_t src = 0;
    bool in_box = true;
    for (int d = 0; d < g.n; ++d) {
      long j = shift + static_cast<long>(R) * idx[d];
      if (j < 0 || j >= g.N) {
        in_box = false;
        break;
      }
      src = src * g.N + static_cast<std::size_t>(j);
    }
    if (in_box) out.values[f] = u.values[src];
  }
  return out;
}

}  // namespace fraclap
