#pragma once

#include <nlohmann/json.hpp>

#include "fraclap/functionals.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

struct EigenResult {
  double lambda1 = 0.0;
  Field eigenfield;      // unit D-norm, supported in the mask
  double residual = 0.0; // ||A u - lambda B u||_2 / ||u||_2 on the mask
  int iterations = 0;
  bool converged = false;
};

// Smallest generalized Rayleigh value of seminorm_sq(.,m) against
// D = seminorm_sq(.,s) (spectral) or the |x|^{-2s}-weighted L2 norm (hardy),
// over fields supported in the mask. Projected steepest descent on the
// quotient, preconditioned by (1 + |k|^{2m})^{-1}, with the step length
// chosen by exact minimization over span{u, direction}; deterministic start
// from the preconditioner-mollified mask indicator. Converges when the
// relative quotient change stays below tol for 5 consecutive steps and the
// residual certificate residual <= tol * lambda1 holds.
//
// Throws on invalid parameters; exceeding max_iter returns the best iterate
// with converged = false.
EigenResult poincare_lambda1(const GridSpec& g, const DomainMask& mask,
                             double m, double s, Variant variant,
                             double tol = 1e-8, int max_iter = 20000);

nlohmann::json to_json(const EigenResult& r);

}  // namespace fraclap
