#include "fraclap/eigensolver.hpp"

#include <cmath>
#include <stdexcept>

#include "fraclap/spectral.hpp"

namespace fraclap {

namespace {

double inner_hn(const Field& a, const Field& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) acc += a.values[i] * b.values[i];
  return acc * std::pow(a.grid.h(), a.grid.n);
}

double l2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

void mask_in_place(Field& u, const DomainMask& mask) {
  for (std::size_t i = 0; i < u.values.size(); ++i)
    if (!mask.inside[i]) u.values[i] = 0.0;
}

// Smallest eigenvalue of the 2x2 pencil (A2, B2) and its eigenvector.
// Returns false when the pencil is numerically degenerate (u and w parallel).
bool pencil_2x2(double a00, double a01, double a11, double b00, double b01,
                double b11, double& lam, double& alpha, double& beta) {
  double c2 = b00 * b11 - b01 * b01;
  double c1 = a00 * b11 + a11 * b00 - 2.0 * a01 * b01;
  double c0 = a00 * a11 - a01 * a01;
  if (!(c2 > 1e-300)) return false;
  double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) disc = 0.0;
  lam = (c1 > 0.0) ? 2.0 * c0 / (c1 + std::sqrt(disc))
                   : (c1 - std::sqrt(disc)) / (2.0 * c2);
  // Row of (A2 - lam B2) with the larger leading entry gives the null vector.
  double r0 = a00 - lam * b00, r1 = a01 - lam * b01, r2 = a11 - lam * b11;
  if (std::abs(r0) >= std::abs(r2)) {
    alpha = -r1;
    beta = r0;
  } else {
    alpha = r2;
    beta = -r1;
  }
  double nrm = std::hypot(alpha, beta);
  if (!(nrm > 0.0)) return false;
  alpha /= nrm;
  beta /= nrm;
  if (alpha < 0.0) {
    alpha = -alpha;
    beta = -beta;
  }
  return true;
}

}  // namespace

EigenResult poincare_lambda1(const GridSpec& g, const DomainMask& mask,
                             double m, double s, Variant variant, double tol,
                             int max_iter) {
  // Same parameter box as validate(), except s = m is admitted: the Hardy
  // constant is itself the smallest Rayleigh value of the m-form against the
  // |x|^{-2m} weight.
  if (g.n < 1 || g.n > 4)
    throw std::invalid_argument("params: n must be in {1,2,3,4}");
  if (!(s >= 0.0)) throw std::invalid_argument("params: requires s >= 0");
  if (!(s <= m)) throw std::invalid_argument("params: requires s < m");
  if (!(m < g.n / 2.0)) throw std::invalid_argument("params: requires m < n/2");
  if (variant == Variant::hardy && !mask.origin_inside)
    throw std::invalid_argument("hardy variant: origin not in the domain");
  if (!(g == mask.grid)) throw std::invalid_argument("poincare_lambda1: grid/mask mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("poincare_lambda1: tol must be > 0");

  auto Lm = fraclap_multiplier(g, m);
  std::vector<double> P(Lm.size());
  for (std::size_t i = 0; i < P.size(); ++i) P[i] = 1.0 / (1.0 + Lm[i]);

  std::vector<double> Ls;
  HardyWeight w;
  bool b_identity = false;
  if (variant == Variant::spectral) {
    if (s > 0.0)
      Ls = fraclap_multiplier(g, s);
    else
      b_identity = true;
  } else {
    w = hardy_weight(g, s);
  }
  auto applyB = [&](const Field& u) {
    if (b_identity) return u;
    if (variant == Variant::spectral) return apply_multiplier(u, Ls);
    Field out = u;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= w.values[i];
    return out;
  };

  // Deterministic start: preconditioner-mollified mask indicator.
  Field u{g, std::vector<double>(g.size())};
  for (std::size_t i = 0; i < u.values.size(); ++i)
    u.values[i] = mask.inside[i] ? 1.0 : 0.0;
  u = apply_multiplier(u, P);
  mask_in_place(u, mask);

  Field Au = apply_multiplier(u, Lm);
  Field Bu = applyB(u);
  double b00 = inner_hn(Bu, u);
  if (!(b00 > 0.0)) throw std::runtime_error("poincare_lambda1: degenerate start");
  {
    double inv = 1.0 / std::sqrt(b00);
    for (auto& v : u.values) v *= inv;
    for (auto& v : Au.values) v *= inv;
    for (auto& v : Bu.values) v *= inv;
  }

  double q_prev = 0.0;
  int stable = 0;
  double q = 0.0, res = 0.0;
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    // Refresh Au, Bu from scratch periodically to stop fp drift from the
    // incremental updates below.
    if (it > 0 && it % 64 == 0) {
      Au = apply_multiplier(u, Lm);
      Bu = applyB(u);
    }
    double a00 = inner_hn(Au, u);
    b00 = inner_hn(Bu, u);
    q = a00 / b00;

    Field r{g, std::vector<double>(g.size())};
    for (std::size_t i = 0; i < r.values.size(); ++i)
      r.values[i] = mask.inside[i] ? Au.values[i] - q * Bu.values[i] : 0.0;
    res = l2(r.values) / l2(u.values);

    if (it > 0 && std::abs(q - q_prev) < tol * std::abs(q))
      ++stable;
    else
      stable = 0;
    q_prev = q;
    if (stable >= 5 && res <= tol * std::abs(q)) {
      converged = true;
      break;
    }

    Field dir = apply_multiplier(r, P);
    mask_in_place(dir, mask);
    Field Aw = apply_multiplier(dir, Lm);
    Field Bw = applyB(dir);
    double a01 = inner_hn(Au, dir);
    double a11 = inner_hn(Aw, dir);
    double b01 = inner_hn(Bu, dir);
    double b11 = inner_hn(Bw, dir);
    double lam, alpha, beta;
    if (!pencil_2x2(a00, a01, a11, b00, b01, b11, lam, alpha, beta)) break;

    for (std::size_t i = 0; i < u.values.size(); ++i) {
      u.values[i] = alpha * u.values[i] + beta * dir.values[i];
      Au.values[i] = alpha * Au.values[i] + beta * Aw.values[i];
      Bu.values[i] = alpha * Bu.values[i] + beta * Bw.values[i];
    }
    double d = inner_hn(Bu, u);
    if (!(d > 0.0)) throw std::runtime_error("poincare_lambda1: lost positivity of D");
    double inv = 1.0 / std::sqrt(d);
    for (auto& v : u.values) v *= inv;
    for (auto& v : Au.values) v *= inv;
    for (auto& v : Bu.values) v *= inv;
  }

  EigenResult result;
  result.lambda1 = q;
  result.eigenfield = std::move(u);
  result.residual = res;
  result.iterations = it;
  result.converged = converged;
  if (!(result.lambda1 > 0.0))
    throw std::runtime_error("poincare_lambda1: nonpositive eigenvalue estimate");
  return result;
}

nlohmann::json to_json(const EigenResult& r) {
  return {{"lambda1", r.lambda1},
          {"residual", r.residual},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"grid", {{"n", r.eigenfield.grid.n},
                    {"N", r.eigenfield.grid.N},
                    {"L", r.eigenfield.grid.L},
                    {"h", r.eigenfield.grid.h()}}}};
}

}  // namespace fraclap
