#pragma once

#include "fraclap/fft.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

// (-Delta)^a via the multiplier |k|^{2a}; the k = 0 coefficient is scaled by
// 0 for a > 0 and by 1 for a = 0.
Field apply_fraclap(const Field& u, double a);

// sum_k |k|^{2a} |uhat_k|^2; equals the squared discrete L2 norm at a = 0.
double seminorm_sq(const Field& u, double a);

// (sum_x |u|^p h^n)^{1/p}
double lp_norm(const Field& u, double p);

// u(R x) sampled on the same grid, zero where R x falls outside the box.
// R must be an integer >= 2 dividing N.
Field dilate(const Field& u, int R);

// Precomputed-multiplier fast paths shared by the iterative solvers.
std::vector<double> fraclap_multiplier(const GridSpec& g, double a);
Field apply_multiplier(const Field& u, const std::vector<double>& mult);
// sum_k mult_k |uhat_k|^2 with the Parseval-normalized transform.
double quad_form(const Field& u, const std::vector<double>& mult);

}  // namespace fraclap
