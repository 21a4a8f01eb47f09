#include "fraclap/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fraclap {

namespace {

// Plans are cached per (n, N) and created under a lock (FFTW planning is not
// thread-safe; execution via fftw_execute_dft is). FFTW_ESTIMATE keeps plan
// selection deterministic, FFTW_UNALIGNED lets us run on caller buffers.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

PlanPair& get_plans(const GridSpec& g) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(g.n, g.N);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<std::complex<double>> scratch(g.size());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  int dims[4];
  for (int d = 0; d < g.n; ++d) dims[d] = g.N;
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.fwd = fftw_plan_dft(g.n, dims, buf, buf, FFTW_FORWARD, flags);
  p.bwd = fftw_plan_dft(g.n, dims, buf, buf, FFTW_BACKWARD, flags);
  if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
  return cache.emplace(key, p).first->second;
}

void check_finite_size(const GridSpec& g, std::size_t len) {
  if (len != g.size()) throw std::invalid_argument("fft: buffer/grid size mismatch");
}

}  // namespace

void dft_forward(const GridSpec& g, std::vector<std::complex<double>>& buf) {
  check_finite_size(g, buf.size());
  auto& plans = get_plans(g);
  auto* b = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(plans.fwd, b, b);
}

void dft_backward(const GridSpec& g, std::vector<std::complex<double>>& buf) {
  check_finite_size(g, buf.size());
  auto& plans = get_plans(g);
  auto* b = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(plans.bwd, b, b);
  double inv = 1.0 / static_cast<double>(g.size());
  for (auto& c : buf) c *= inv;
}

SpectralField transform(const Field& u) {
  std::vector<std::complex<double>> buf(u.values.begin(), u.values.end());
  dft_forward(u.grid, buf);
  double c = std::pow(u.grid.h() / u.grid.N, u.grid.n * 0.5);
  for (auto& z : buf) z *= c;
  return SpectralField{u.grid, std::move(buf)};
}

Field inverse_transform(const SpectralField& su) {
  std::vector<std::complex<double>> buf = su.coeff;
  double c = std::pow(su.grid.h() / su.grid.N, su.grid.n * 0.5);
  for (auto& z : buf) z /= c;
  dft_backward(su.grid, buf);
  Field out{su.grid, std::vector<double>(su.coeff.size())};
  for (std::size_t i = 0; i < buf.size(); ++i) out.values[i] = buf[i].real();
  return out;
}

}  // namespace fraclap
