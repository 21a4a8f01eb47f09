#include "fraclap/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fraclap {

namespace {
constexpr std::size_t kMaxTotalPoints = std::size_t{1} << 27;

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }
}  // namespace

std::size_t grid_memory_budget() { return kMaxTotalPoints; }

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(N);
  return total;
}

double GridSpec::k(int i) const {
  int z = i < N / 2 ? i : i - N;
  return M_PI / L * z;
}

GridSpec make_grid(int n, int N, double L) {
  if (n < 1 || n > 4)
    throw std::invalid_argument("make_grid: n must be in {1,2,3,4}, got " +
                                std::to_string(n));
  if (!is_power_of_two(N) || N < 8)
    throw std::invalid_argument(
        "make_grid: N must be a power of two >= 8, got " + std::to_string(N));
  if (!(L > 0.0)) throw std::invalid_argument("make_grid: L must be > 0");
  GridSpec g{n, N, L};
  double logp = n * std::log2(static_cast<double>(N));
  if (logp > 62 || g.size() > kMaxTotalPoints)
    throw std::invalid_argument("make_grid: N^n exceeds the memory budget");
  return g;
}

Field make_field(const GridSpec& g) { return Field{g, std::vector<double>(g.size(), 0.0)}; }

void unravel(const GridSpec& g, std::size_t flat, int* idx) {
  for (int d = g.n - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % g.N);
    flat /= g.N;
  }
}

std::vector<double> radius_table(const GridSpec& g) {
  std::vector<double> out(g.size());
  int idx[4] = {0, 0, 0, 0};
  for (std::size_t f = 0; f < out.size(); ++f) {
    double r2 = 0.0;
    for (int d = 0; d < g.n; ++d) {
      double xd = g.x(idx[d]);
      r2 += xd * xd;
    }
    out[f] = std::sqrt(r2);
    for (int d = g.n - 1; d >= 0; --d) {
      if (++idx[d] < g.N) break;
      idx[d] = 0;
    }
  }
  return out;
}

std::vector<double> k2_table(const GridSpec& g) {
  std::vector<double> axis(g.N);
  for (int i = 0; i < g.N; ++i) axis[i] = g.k(i) * g.k(i);
  std::vector<double> out(g.size());
  int idx[4] = {0, 0, 0, 0};
  for (std::size_t f = 0; f < out.size(); ++f) {
    double k2 = 0.0;
    for (int d = 0; d < g.n; ++d) k2 += axis[idx[d]];
    out[f] = k2;
    for (int d = g.n - 1; d >= 0; --d) {
      if (++idx[d] < g.N) break;
      idx[d] = 0;
    }
  }
  return out;
}

}  // namespace fraclap
