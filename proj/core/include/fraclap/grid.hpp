#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fraclap {

// Uniform discretization of the periodic box [-L, L)^n with N nodes per
// axis. The frequency lattice is k = (pi/L) z with integer z in [-N/2, N/2),
// stored in FFT order (nonnegative z first).
struct GridSpec {
  int n = 0;
  int N = 0;
  double L = 0.0;

  double h() const { return 2.0 * L / N; }
  std::size_t size() const;
  double x(int i) const { return -L + i * h(); }
  double k(int i) const;
  int origin_index() const { return N / 2; }  // axis index of the node x = 0

  bool operator==(const GridSpec&) const = default;
};

// Validates and returns a GridSpec. Rejects n outside {1,..,4}, N not a
// power of two or < 8, L <= 0, and total point counts over the memory budget.
GridSpec make_grid(int n, int N, double L);

std::size_t grid_memory_budget();  // max total points accepted by make_grid

struct Field {
  GridSpec grid;
  std::vector<double> values;
};

struct SpectralField {
  GridSpec grid;
  std::vector<std::complex<double>> coeff;
};

Field make_field(const GridSpec& g);  // zero-initialized

// Decode a flat row-major index into per-axis indices (idx must hold g.n).
void unravel(const GridSpec& g, std::size_t flat, int* idx);

// Per-node |x| and per-frequency |k|^2, both flat row-major.
std::vector<double> radius_table(const GridSpec& g);
std::vector<double> k2_table(const GridSpec& g);

}  // namespace fraclap
