#pragma once

#include "fraclap/grid.hpp"

namespace fraclap {

// Normalization is fixed so that discrete Parseval reads
//   sum_x u(x)^2 h^n == sum_k |uhat_k|^2 .
SpectralField transform(const Field& u);
Field inverse_transform(const SpectralField& su);

// Raw in-place c2c transforms used by the operator kernels. Forward is the
// plain DFT; backward includes the 1/N^n factor so backward(forward(x)) == x.
void dft_forward(const GridSpec& g, std::vector<std::complex<double>>& buf);
void dft_backward(const GridSpec& g, std::vector<std::complex<double>>& buf);

}  // namespace fraclap
